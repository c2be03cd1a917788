#include "tvr/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "tvr/stats.hpp"

namespace tvr {

const char* to_string(BestRelay label)
{
  return label == BestRelay::TallBest ? "tall_best" : "short_best";
}

std::vector<PreparedScenario> prepare(std::span<const Scenario> scenarios, const ChannelParams& params,
                                      double max_tx_power)
{
  ChannelParams widest = params;
  widest.tx_power = std::max(max_tx_power, params.tx_power);
  std::vector<PreparedScenario> out;
  out.reserve(scenarios.size());
  for (const Scenario& s : scenarios) {
    out.push_back({&s, PathLossCache(s.vehicles(), widest.frequency, widest.max_path_loss())});
  }
  return out;
}

namespace {

struct FarthestPair {
  std::optional<VehicleId> tall;
  std::optional<VehicleId> shorter;
};

FarthestPair farthest_by_class(const NeighborTable& table, VehicleId tx, VehicleId dest)
{
  const Vec2 d = table.node(table.index_of(dest)).center;
  FarthestPair out;
  double best_tall = 0.0;
  double best_short = 0.0;
  for (VehicleId id : forward_set(table, tx, dest)) {
    const auto& node = table.node(table.index_of(id));
    const double r = distance(node.center, d);
    auto& slot = node.cls == VehicleClass::Tall ? out.tall : out.shorter;
    double& best = node.cls == VehicleClass::Tall ? best_tall : best_short;
    if (!slot || r < best || (r == best && id < *slot)) {
      slot = id;
      best = r;
    }
  }
  return out;
}

}  // namespace

std::vector<LabeledDifferenceSample> collect_samples(std::span<const PreparedScenario> scenarios,
                                                     const ChannelParams& params, std::size_t n_pairs,
                                                     std::uint64_t seed)
{
  if (scenarios.empty()) {
    throw std::invalid_argument("collect_samples: no scenarios");
  }
  std::vector<NeighborTable> tables;
  tables.reserve(scenarios.size());
  for (const auto& p : scenarios) {
    tables.push_back(build_neighbor_table(*p.scenario, p.cache, params));
  }

  const Strategy completion = Strategy::farthest();
  std::vector<LabeledDifferenceSample> samples;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const NeighborTable& table = tables[k % tables.size()];
    Rng rng = derive_rng(seed, k);
    const auto pair = sample_non_neighbor_pairs(table, 1, rng);
    if (pair.empty()) {
      continue;
    }
    const auto [src, dst] = pair.front();
    const FarthestPair far = farthest_by_class(table, src, dst);
    if (!far.tall || !far.shorter) {
      continue;
    }
    const RouteResult via_tall = build_route_via(table, src, *far.tall, dst, completion);
    const RouteResult via_short = build_route_via(table, src, *far.shorter, dst, completion);
    if (!via_tall.ok() && !via_short.ok()) {
      continue;
    }
    BestRelay label;
    if (via_tall.ok() && (!via_short.ok() || via_tall.route.hop_count() < via_short.route.hop_count())) {
      label = BestRelay::TallBest;
    } else if (via_short.ok() && (!via_tall.ok() || via_short.route.hop_count() < via_tall.route.hop_count())) {
      label = BestRelay::ShortBest;
    } else {
      continue;
    }
    const Vec2 tx = table.node(table.index_of(src)).center;
    const double value = distance(tx, table.node(table.index_of(*far.shorter)).center) -
                         distance(tx, table.node(table.index_of(*far.tall)).center);
    samples.push_back({value, label, params.tx_power});
  }
  return samples;
}

std::vector<LabeledDifferenceSample> collect_samples(std::span<const Scenario> scenarios,
                                                     const ChannelParams& params, std::size_t n_pairs,
                                                     std::uint64_t seed)
{
  const auto prepared = prepare(scenarios, params, params.tx_power);
  return collect_samples(std::span<const PreparedScenario>(prepared), params, n_pairs, seed);
}

NormalFit fit_normal(std::span<const double> samples)
{
  if (samples.size() < 2) {
    throw InsufficientSamples("fit_normal: need at least two samples");
  }
  const double sd = sample_stddev(samples);
  if (!(sd > 0.0)) {
    throw InsufficientSamples("fit_normal: samples have zero spread");
  }
  return {mean(samples), sd, samples.size()};
}

namespace {

std::string bracket_message(double lo, double hi, double g_lo, double g_hi)
{
  std::ostringstream os;
  os << "solve_xmax: no sign change on [" << lo << ", " << hi << "], g = (" << g_lo << ", " << g_hi << ")";
  return os.str();
}

}  // namespace

NoRoot::NoRoot(double lo_, double hi_, double g_lo_, double g_hi_)
    : std::runtime_error(bracket_message(lo_, hi_, g_lo_, g_hi_)), lo(lo_), hi(hi_), g_lo(g_lo_), g_hi(g_hi_)
{
}

double threshold_balance(double x, const NormalFit& tall, const NormalFit& shorter)
{
  const double a = (x - shorter.mu) / shorter.sigma;
  const double b = (x - tall.mu) / tall.sigma;
  // Phi(a) - Q(b) == Phi(b) - Q(a); take the form whose terms are tails so
  // the difference keeps its precision when both probabilities are near 1.
  const double phi_a = normal_cdf(a);
  const double q_b = q_function(b);
  if (phi_a + q_b <= 1.0) {
    return phi_a - q_b;
  }
  return normal_cdf(b) - q_function(a);
}

namespace {

// Sign of the balance even where both tails underflow: Q is decreasing, so
// Phi(a) - Q(b) = Q(-a) - Q(b) has the sign of a + b.
double balance_side(double x, const NormalFit& tall, const NormalFit& shorter)
{
  const double g = threshold_balance(x, tall, shorter);
  if (g != 0.0) {
    return g;
  }
  return (x - shorter.mu) / shorter.sigma + (x - tall.mu) / tall.sigma;
}

}  // namespace

double solve_xmax(const NormalFit& tall, const NormalFit& shorter)
{
  if (!(tall.sigma > 0.0) || !(shorter.sigma > 0.0)) {
    throw std::invalid_argument("solve_xmax: standard deviations must be positive");
  }
  const double spread = 10.0 * std::max(tall.sigma, shorter.sigma);
  double lo = std::min(tall.mu, shorter.mu) - spread;
  double hi = std::max(tall.mu, shorter.mu) + spread;
  const double g_lo = balance_side(lo, tall, shorter);
  const double g_hi = balance_side(hi, tall, shorter);
  if (g_lo == 0.0) {
    return lo;
  }
  if (g_hi == 0.0) {
    return hi;
  }
  if ((g_lo < 0.0) == (g_hi < 0.0)) {
    throw NoRoot(lo, hi, g_lo, g_hi);
  }
  const bool rising = g_lo < 0.0;
  for (int iter = 0; iter < 4096; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    const double g = balance_side(mid, tall, shorter);
    if (g == 0.0) {
      return mid;
    }
    if ((g < 0.0) == rising) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  const double residual = threshold_balance(x, tall, shorter);
  if (!(std::abs(residual) < 1e-9)) {
    throw NoRoot(lo, hi, threshold_balance(lo, tall, shorter), threshold_balance(hi, tall, shorter));
  }
  return x;
}

XmaxEstimate average_xmax(std::span<const PreparedScenario> scenarios, std::span<const double> powers,
                          const ChannelParams& params, std::size_t n_pairs_per_power, std::uint64_t seed)
{
  if (powers.empty()) {
    throw std::invalid_argument("average_xmax: no transmit powers");
  }
  XmaxEstimate est;
  double sum = 0.0;
  for (double p : powers) {
    ChannelParams at = params;
    at.tx_power = p;
    auto samples = collect_samples(scenarios, at, n_pairs_per_power, seed);
    std::vector<double> tall_values;
    std::size_t n_short = 0;
    for (const auto& s : samples) {
      if (s.label == BestRelay::TallBest) {
        tall_values.push_back(s.value);
      } else {
        ++n_short;
      }
    }
    if (tall_values.empty()) {
      est.skipped_powers.push_back(p);
    } else {
      const double m = mean(tall_values);
      est.used.push_back({p, m, tall_values.size(), n_short});
      sum += m;
    }
    est.samples.insert(est.samples.end(), samples.begin(), samples.end());
  }
  if (est.used.empty()) {
    throw InsufficientSamples("average_xmax: no power produced a tall-best sample");
  }
  est.x_max = sum / static_cast<double>(est.used.size());
  return est;
}

void write_samples_csv(std::ostream& out, std::span<const LabeledDifferenceSample> samples)
{
  out << "power_dbm,value_m,label\n";
  for (const auto& s : samples) {
    out << format_double(s.power) << ',' << format_double(s.value) << ',' << to_string(s.label) << '\n';
  }
}

}  // namespace tvr
