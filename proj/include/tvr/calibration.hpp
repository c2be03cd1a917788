#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "tvr/channel.hpp"
#include "tvr/routing.hpp"
#include "tvr/scenario.hpp"

namespace tvr {

struct NormalFit {
  double mu = 0.0;
  double sigma = 0.0;
  std::size_t n_samples = 0;
};

enum class BestRelay { TallBest, ShortBest };

const char* to_string(BestRelay label);

/// dist(Tx, Far_Short) - dist(Tx, Far_Tall) for one source-destination pair,
/// labelled by which first relay leads to strictly fewer end-to-end hops.
struct LabeledDifferenceSample {
  double value = 0.0;
  BestRelay label = BestRelay::TallBest;
  double power = 0.0;  ///< transmit power, dBm
};

/// A snapshot prepared for a power sweep: its loss terms are computed once.
struct PreparedScenario {
  const Scenario* scenario = nullptr;
  PathLossCache cache;
};

/// Builds loss caches that cover every transmit power up to `max_tx_power`.
std::vector<PreparedScenario> prepare(std::span<const Scenario> scenarios, const ChannelParams& params,
                                      double max_tx_power);

/// Samples `n_pairs` non-neighbor pairs spread round-robin over the snapshots
/// and, when the source sees both a tall and a short farthest forward
/// neighbor, completes one route through each with FarthestNeighbor. Ties and
/// double failures are dropped. Pair k draws from its own RNG stream.
std::vector<LabeledDifferenceSample> collect_samples(std::span<const PreparedScenario> scenarios,
                                                     const ChannelParams& params, std::size_t n_pairs,
                                                     std::uint64_t seed);
std::vector<LabeledDifferenceSample> collect_samples(std::span<const Scenario> scenarios,
                                                     const ChannelParams& params, std::size_t n_pairs,
                                                     std::uint64_t seed);

class InsufficientSamples : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sample mean and unbiased standard deviation. Throws InsufficientSamples
/// for fewer than two values or zero spread.
NormalFit fit_normal(std::span<const double> samples);

class NoRoot : public std::runtime_error {
public:
  NoRoot(double lo, double hi, double g_lo, double g_hi);
  double lo, hi, g_lo, g_hi;
};

/// g(x) = Phi((x - mu_s)/sigma_s) - Q((x - mu_t)/sigma_t); non-negative where
/// a tall relay is at least as likely to be the better choice.
double threshold_balance(double x, const NormalFit& tall, const NormalFit& shorter);

/// Solves 1 - Q((x - mu_s)/sigma_s) = Q((x - mu_t)/sigma_t) by bisection.
double solve_xmax(const NormalFit& tall, const NormalFit& shorter);

struct PowerMean {
  double power = 0.0;
  double mean_tall_best = 0.0;  ///< E[t | power]
  std::size_t n_tall_best = 0;
  std::size_t n_short_best = 0;
};

struct XmaxEstimate {
  double x_max = 0.0;
  std::vector<PowerMean> used;
  std::vector<double> skipped_powers;  ///< powers without a single TallBest sample
  std::vector<LabeledDifferenceSample> samples;
};

/// Average over `powers` of the mean TallBest difference at each power.
/// Powers without TallBest samples are skipped; throws InsufficientSamples
/// when every power is skipped.
XmaxEstimate average_xmax(std::span<const PreparedScenario> scenarios, std::span<const double> powers,
                          const ChannelParams& params, std::size_t n_pairs_per_power, std::uint64_t seed);

/// `power_dbm,value_m,label` rows.
void write_samples_csv(std::ostream& out, std::span<const LabeledDifferenceSample> samples);

}  // namespace tvr
