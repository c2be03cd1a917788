#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "helpers.hpp"
#include "tvr/scenario.hpp"

using namespace tvr;
using tvr::test::car;

namespace {

RoadConfig road_at(double density, double tall_fraction = 0.1436)
{
  RoadConfig r;
  r.density = density;
  r.tall_fraction = tall_fraction;
  return r;
}

std::string to_csv(const Scenario& s)
{
  std::ostringstream out;
  write_csv(out, s);
  return out.str();
}

}  // namespace

TEST_CASE("vehicle count at medium density")
{
  // Per lane the mean pitch is one mean gap plus one mean vehicle length.
  const RoadConfig road = road_at(kDensityMedium);
  const double mean_len = 0.1436 * 6.3 + (1.0 - 0.1436) * 4.2;
  const double expected = 4.0 * 13500.0 / (1000.0 / kDensityMedium + mean_len);
  CHECK(expected == doctest::Approx(391.8).epsilon(0.001));

  double total = 0.0;
  const int runs = 50;
  for (int k = 0; k < runs; ++k) {
    total += static_cast<double>(generate(road, 100 + k).size());
  }
  const double avg = total / runs;
  CHECK(avg == doctest::Approx(expected).epsilon(0.02));
  CHECK(avg == doctest::Approx(405.0).epsilon(0.05));
}

TEST_CASE("generated snapshot invariants")
{
  const Scenario s = generate(road_at(kDensityHigh, 0.3), 7);
  const auto vs = s.vehicles();
  REQUIRE(vs.size() > 100);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const Vehicle& v = vs[i];
    CHECK(v.center.x - 0.5 * v.length >= 0.0);
    CHECK(v.center.x + 0.5 * v.length <= s.road().length);
    CHECK(v.height > 0.0);
    CHECK(v.center.y == doctest::Approx((v.lane + 0.5) * 3.5));
    if (v.cls == VehicleClass::Tall) {
      CHECK(v.length == 6.3);
    } else {
      CHECK(v.length == 4.2);
    }
    CHECK(s.at(v.id).id == v.id);
    CHECK(s.index_of(v.id) == i);
  }
  for (double g : lane_gaps(s)) {
    CHECK(g >= 0.0);
  }
  CHECK_FALSE(s.index_of(-1).has_value());
  CHECK_THROWS_AS(s.at(-1), std::out_of_range);
}

TEST_CASE("no tall vehicles without a tall fraction")
{
  const Scenario s = generate(road_at(kDensityHigh, 0.0), 3);
  CHECK(std::none_of(s.vehicles().begin(), s.vehicles().end(),
                     [](const Vehicle& v) { return v.cls == VehicleClass::Tall; }));
}

TEST_CASE("tall fraction and heights")
{
  std::size_t tall = 0;
  std::size_t n = 0;
  std::vector<double> tall_h;
  std::vector<double> short_h;
  for (std::uint64_t seed = 0; n < 100000; ++seed) {
    const Scenario s = generate(road_at(kDensityHigh), seed);
    for (const Vehicle& v : s.vehicles()) {
      ++n;
      if (v.cls == VehicleClass::Tall) {
        ++tall;
        tall_h.push_back(v.height);
      } else {
        short_h.push_back(v.height);
      }
    }
  }
  CHECK(static_cast<double>(tall) / static_cast<double>(n) == doctest::Approx(0.1436).epsilon(0.07));
  CHECK(std::abs(static_cast<double>(tall) / static_cast<double>(n) - 0.1436) < 0.01);
  CHECK(mean(tall_h) == doctest::Approx(3.35).epsilon(0.01));
  CHECK(mean(short_h) == doctest::Approx(1.5).epsilon(0.01));
  CHECK(sample_stddev(short_h) == doctest::Approx(0.08).epsilon(0.05));
}

TEST_CASE("lane gaps are exponential")
{
  std::vector<double> gaps;
  for (std::uint64_t seed = 0; gaps.size() < 8000; ++seed) {
    const auto g = lane_gaps(generate(road_at(kDensityMedium), 500 + seed));
    gaps.insert(gaps.end(), g.begin(), g.end());
  }
  const double mu = 1000.0 / kDensityMedium;
  CHECK(mean(gaps) == doctest::Approx(mu).epsilon(0.05));

  std::sort(gaps.begin(), gaps.end());
  const double n = static_cast<double>(gaps.size());
  double d = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double f = 1.0 - std::exp(-gaps[i] / mu);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
  }
  CHECK(d < 1.63 / std::sqrt(n));
}

TEST_CASE("generation is deterministic per seed")
{
  const RoadConfig road = road_at(kDensityLow);
  CHECK(to_csv(generate(road, 42)) == to_csv(generate(road, 42)));
  CHECK(to_csv(generate(road, 42)) != to_csv(generate(road, 43)));
}

TEST_CASE("road validation")
{
  RoadConfig r;
  CHECK_NOTHROW(r.validate());
  r.density = 0.0;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r = RoadConfig{};
  r.tall_fraction = 1.5;
  CHECK_THROWS_AS(generate(r, 1), std::invalid_argument);
  r = RoadConfig{};
  r.lanes = 0;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("scenario csv")
{
  SUBCASE("header only")
  {
    std::istringstream in("id,x_m,y_m,heading_deg,length_m,width_m,height_m\n");
    CHECK(read_csv(in).size() == 0);
  }

  SUBCASE("non-positive height names the row")
  {
    std::istringstream in("id,x_m,y_m,heading_deg,length_m,width_m,height_m\n"
                          "1,10,1.75,0,4.2,1.8,1.5\n"
                          "2,40,1.75,0,4.2,1.8,-1\n");
    try {
      read_csv(in);
      FAIL("expected a CsvError");
    } catch (const CsvError& e) {
      CHECK(e.row() == 2);
    }
  }

  SUBCASE("class inferred from height")
  {
    std::istringstream in("id,x_m,y_m,heading_deg,length_m,width_m,height_m\n"
                          "1,10,1.75,0,4.2,1.8,1.5\n"
                          "2,40,5.25,0,6.3,2.0,3.4\n");
    const Scenario s = read_csv(in);
    CHECK(s.at(1).cls == VehicleClass::Short);
    CHECK(s.at(2).cls == VehicleClass::Tall);
    CHECK(s.at(2).lane == 1);
  }

  SUBCASE("explicit class wins")
  {
    std::istringstream in("id,x_m,y_m,heading_deg,length_m,width_m,height_m,class\n"
                          "1,10,1.75,0,4.2,1.8,2.5,short\n");
    CHECK(read_csv(in).at(1).cls == VehicleClass::Short);
  }

  SUBCASE("malformed input")
  {
    std::istringstream bad_header("id,x,y\n");
    CHECK_THROWS_AS(read_csv(bad_header), CsvError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), CsvError);
    std::istringstream bad_number("id,x_m,y_m,heading_deg,length_m,width_m,height_m\n1,ten,1.75,0,4.2,1.8,1.5\n");
    CHECK_THROWS_AS(read_csv(bad_number), CsvError);
    std::istringstream bad_class("id,x_m,y_m,heading_deg,length_m,width_m,height_m,class\n1,1,1.75,0,4.2,1.8,1.5,bus\n");
    CHECK_THROWS_AS(read_csv(bad_class), CsvError);
    std::istringstream short_row("id,x_m,y_m,heading_deg,length_m,width_m,height_m\n1,1,1.75\n");
    CHECK_THROWS_AS(read_csv(short_row), CsvError);
    std::istringstream dup("id,x_m,y_m,heading_deg,length_m,width_m,height_m\n1,1,1.75,0,4.2,1.8,1.5\n1,9,1.75,0,4.2,1.8,1.5\n");
    CHECK_THROWS_AS(read_csv(dup), std::invalid_argument);
  }

  SUBCASE("round trip")
  {
    const Scenario s = generate(road_at(kDensityMedium, 0.3), 11);
    std::istringstream in(to_csv(s));
    const Scenario back = read_csv(in);
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Vehicle& a = s.vehicles()[i];
      const Vehicle& b = back.at(a.id);
      CHECK(a.center.x == b.center.x);
      CHECK(a.center.y == b.center.y);
      CHECK(a.height == b.height);
      CHECK(a.length == b.length);
      CHECK(a.lane == b.lane);
      CHECK(a.cls == b.cls);
    }
    CHECK(to_csv(back) == to_csv(s));
  }

  SUBCASE("files")
  {
    tvr::test::TempDir dir("scenario");
    const Scenario s = generate(road_at(kDensityLow), 5);
    save_csv(dir.path() / "s.csv", s);
    CHECK(to_csv(load_csv(dir.path() / "s.csv")) == to_csv(s));
    CHECK_THROWS_AS(load_csv(dir.path() / "missing.csv"), std::runtime_error);
  }
}

TEST_CASE("nearest-neighbor spacing")
{
  SUBCASE("two vehicles")
  {
    const Scenario s({car(1, 0.0), car(2, 40.0)}, RoadConfig{}, 0);
    const auto sp = spacing_samples(s);
    REQUIRE(sp.size() == 2);
    CHECK(sp[0] == 40.0);
    CHECK(sp[1] == 40.0);
  }

  SUBCASE("three vehicles")
  {
    const Scenario s({car(1, 0.0), car(2, 100.0), car(3, 250.0)}, RoadConfig{}, 0);
    const auto sp = spacing_samples(s);
    REQUIRE(sp.size() == 3);
    CHECK(sp[0] == 100.0);
    CHECK(sp[1] == 100.0);
    CHECK(sp[2] == 150.0);
  }

  SUBCASE("matches brute force across lanes")
  {
    const Scenario s = generate(road_at(kDensityMedium), 21);
    const auto vs = s.vehicles();
    const auto sp = spacing_samples(s);
    for (std::size_t i = 0; i < vs.size(); ++i) {
      double best = 1e18;
      for (std::size_t j = 0; j < vs.size(); ++j) {
        if (i != j) {
          best = std::min(best, distance(vs[i].center, vs[j].center));
        }
      }
      CHECK(sp[i] == best);
    }
  }

  CHECK_THROWS_AS(spacing_samples(Scenario({car(1, 0.0)}, RoadConfig{}, 0)), std::invalid_argument);
}
