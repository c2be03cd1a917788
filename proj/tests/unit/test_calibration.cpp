#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "helpers.hpp"
#include "tvr/calibration.hpp"

using namespace tvr;

namespace {

NormalFit nf(double mu, double sigma)
{
  return {mu, sigma, 100};
}

double closed_form(const NormalFit& tall, const NormalFit& shorter)
{
  return (shorter.mu * tall.sigma + tall.mu * shorter.sigma) / (shorter.sigma + tall.sigma);
}

std::vector<Scenario> snapshots(std::size_t n, double tall_fraction, std::uint64_t seed)
{
  RoadConfig road;
  road.length = 5000.0;
  road.density = kDensityMedium;
  road.tall_fraction = tall_fraction;
  std::vector<Scenario> out;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(generate(road, seed + k));
  }
  return out;
}

}  // namespace

TEST_CASE("normal fit")
{
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const NormalFit f = fit_normal(v);
  CHECK(f.mu == 2.5);
  CHECK(f.sigma == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(f.n_samples == 4);
  CHECK_THROWS_AS(fit_normal(std::vector<double>{1.0}), InsufficientSamples);
  CHECK_THROWS_AS(fit_normal(std::vector<double>{2.0, 2.0, 2.0}), InsufficientSamples);

  Rng rng(17);
  std::normal_distribution<double> n(50.0, 20.0);
  std::vector<double> big(100000);
  for (double& x : big) {
    x = n(rng);
  }
  const NormalFit g = fit_normal(big);
  CHECK(std::abs(g.mu - 50.0) < 0.3);
  CHECK(std::abs(g.sigma - 20.0) < 0.3);
}

TEST_CASE("threshold root examples")
{
  CHECK(solve_xmax(nf(-210.0, 80.0), nf(-50.0, 30.0)) == doctest::Approx(-1030.0 / 11.0).epsilon(1e-9));
  CHECK(solve_xmax(nf(0.0, 0.01), nf(40.0, 10.0)) == doctest::Approx(0.03996003996).epsilon(1e-7));
  CHECK(solve_xmax(nf(12.5, 7.0), nf(12.5, 7.0)) == doctest::Approx(12.5).epsilon(1e-9));
  CHECK_THROWS_AS(solve_xmax(nf(0.0, 0.0), nf(1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(solve_xmax(nf(0.0, 1.0), nf(1.0, -1.0)), std::invalid_argument);
}

TEST_CASE("threshold root properties")
{
  Rng rng(3);
  std::uniform_real_distribution<double> mu(-300.0, 300.0);
  std::uniform_real_distribution<double> sd(0.5, 150.0);
  for (int k = 0; k < 300; ++k) {
    const NormalFit t = nf(mu(rng), sd(rng));
    const NormalFit s = nf(mu(rng), sd(rng));
    const double x = solve_xmax(t, s);

    const double residual = normal_cdf((x - s.mu) / s.sigma) - q_function((x - t.mu) / t.sigma);
    CHECK(std::abs(residual) < 1e-9);
    CHECK(x == doctest::Approx(closed_form(t, s)).epsilon(1e-6).scale(1.0));

    // Mirroring every mean mirrors the root; the balance is symmetric in the two fits.
    CHECK(solve_xmax(nf(-t.mu, t.sigma), nf(-s.mu, s.sigma)) == doctest::Approx(-x).epsilon(1e-6).scale(1.0));
    CHECK(solve_xmax(s, t) == doctest::Approx(x).epsilon(1e-6).scale(1.0));

    // A coarse grid finds the same sign change within one step.
    const double step = 0.5;
    double lo = std::min(t.mu, s.mu) - 10.0 * std::max(t.sigma, s.sigma);
    double prev = threshold_balance(lo, t, s);
    double grid_root = std::nan("");
    for (double g = lo + step; g <= std::max(t.mu, s.mu) + 10.0 * std::max(t.sigma, s.sigma); g += step) {
      const double cur = threshold_balance(g, t, s);
      if ((prev < 0.0) != (cur < 0.0)) {
        grid_root = g;
        break;
      }
      prev = cur;
    }
    REQUIRE_FALSE(std::isnan(grid_root));
    CHECK(std::abs(grid_root - x) <= step);
  }
}

TEST_CASE("balance function shape")
{
  const NormalFit t = nf(-20.0, 40.0);
  const NormalFit s = nf(100.0, 60.0);
  double last = -2.0;
  for (double x = -400.0; x <= 400.0; x += 5.0) {
    const double g = threshold_balance(x, t, s);
    CHECK(g >= last);
    CHECK(g >= -1.0);
    CHECK(g <= 1.0);
    last = g;
  }
}

TEST_CASE("difference samples")
{
  const ChannelParams p;

  SUBCASE("no tall vehicles means no samples")
  {
    const auto scen = snapshots(2, 0.0, 10);
    CHECK(collect_samples(std::span<const Scenario>(scen), p, 300, 1).empty());
  }

  SUBCASE("deterministic and tagged with the power")
  {
    const auto scen = snapshots(2, 0.3, 20);
    const auto a = collect_samples(std::span<const Scenario>(scen), p, 300, 5);
    const auto b = collect_samples(std::span<const Scenario>(scen), p, 300, 5);
    REQUIRE(!a.empty());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].value == b[i].value);
      CHECK(a[i].label == b[i].label);
      CHECK(a[i].power == p.tx_power);
    }
    CHECK(a.size() <= 300);
  }

  SUBCASE("prepared and raw snapshots agree")
  {
    const auto scen = snapshots(2, 0.3, 30);
    const auto prep = prepare(scen, p, 20.0);
    const auto a = collect_samples(std::span<const PreparedScenario>(prep), p, 200, 8);
    const auto b = collect_samples(std::span<const Scenario>(scen), p, 200, 8);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].value == b[i].value);
    }
  }

  CHECK_THROWS_AS(collect_samples(std::span<const Scenario>(), p, 10, 1), std::invalid_argument);
}

TEST_CASE("power-averaged x_max")
{
  const ChannelParams p;
  const auto scen = snapshots(2, 0.3, 40);
  const auto prep = prepare(scen, p, 12.0);
  const std::vector<double> powers{6.0, 12.0};
  const XmaxEstimate est = average_xmax(prep, powers, p, 300, 3);
  REQUIRE(est.used.size() + est.skipped_powers.size() == powers.size());
  REQUIRE(!est.used.empty());

  double sum = 0.0;
  for (const PowerMean& pm : est.used) {
    std::vector<double> tall;
    std::size_t n_short = 0;
    for (const auto& s : est.samples) {
      if (s.power != pm.power) {
        continue;
      }
      if (s.label == BestRelay::TallBest) {
        tall.push_back(s.value);
      } else {
        ++n_short;
      }
    }
    CHECK(pm.n_tall_best == tall.size());
    CHECK(pm.n_short_best == n_short);
    CHECK(pm.mean_tall_best == doctest::Approx(mean(tall)));
    sum += pm.mean_tall_best;
  }
  CHECK(est.x_max == doctest::Approx(sum / static_cast<double>(est.used.size())));

  const auto none = snapshots(1, 0.0, 50);
  const auto prep_none = prepare(none, p, 12.0);
  CHECK_THROWS_AS(average_xmax(prep_none, powers, p, 100, 3), InsufficientSamples);
  CHECK_THROWS_AS(average_xmax(prep, std::vector<double>{}, p, 100, 3), std::invalid_argument);
}

TEST_CASE("samples csv")
{
  const std::vector<LabeledDifferenceSample> s{{12.5, BestRelay::TallBest, 10.0}, {-3.0, BestRelay::ShortBest, 7.0}};
  std::ostringstream out;
  write_samples_csv(out, s);
  CHECK(out.str() == "power_dbm,value_m,label\n10,12.5,tall_best\n7,-3,short_best\n");
}
