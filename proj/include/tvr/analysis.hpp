#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tvr/calibration.hpp"
#include "tvr/channel.hpp"
#include "tvr/routing.hpp"
#include "tvr/scenario.hpp"

namespace tvr {

// ---------------------------------------------------------------------------
// Tall relay availability

/// Probability of at least one tall vehicle within a window of length x_max
/// when tall vehicles form a Poisson process of rate gamma * lambda_s per meter.
double tall_relay_prob_analytic(double gamma, double lambda_s, double x_max);

struct TallRelayEstimate {
  double probability = 0.0;
  std::size_t vehicles = 0;  ///< vehicles whose window lies fully on the road
};

/// Share of vehicles with at least one other tall vehicle whose longitudinal
/// offset ahead of them lies in [R - x_max, R]. Vehicles whose window runs
/// past the end of the road are not counted.
TallRelayEstimate tall_relay_prob_empirical(std::span<const Scenario> scenarios, double range, double x_max);

// ---------------------------------------------------------------------------
// PDR versus distance

enum class Pairing { CarCar, VanX };

const char* to_string(Pairing pairing);

struct PdrBin {
  double center = 0.0;
  double pdr = 0.0;
  std::size_t n_samples = 0;
  bool flagged = false;  ///< fewer samples than the reporting floor
};

struct PdrCurve {
  double bin_width = 20.0;
  std::vector<PdrBin> bins;  ///< ascending centers, empty bins omitted
};

struct PdrOptions {
  double bin_width = 20.0;
  double max_distance = 2000.0;
  bool nlos_only = false;
  std::size_t reporting_floor = 40;
};

/// Mean link delivery probability per distance bin over every vehicle pair of
/// the requested class combination (CarCar: both short; VanX: at least one tall).
PdrCurve pdr_vs_distance(std::span<const Scenario> scenarios, const ChannelParams& params, Pairing pairing,
                         const PdrOptions& options = {});

/// Largest distance at which the piecewise-linear curve through the bin
/// centers is at or above `target_pdr`; nullopt if it never is.
std::optional<double> effective_range(const PdrCurve& curve, double target_pdr, bool skip_flagged = false);

// ---------------------------------------------------------------------------
// Strategy comparison

struct StrategyStats {
  Strategy strategy;
  std::size_t succeeded = 0;
  std::size_t best = 0;
  std::size_t hop_sum = 0;

  double mean_hops() const;
};

struct PowerComparison {
  double power = 0.0;
  std::size_t pairs = 0;
  std::size_t all_failed = 0;  ///< pairs no strategy could route
  std::vector<StrategyStats> per_strategy;

  /// 100 * best / pairs that at least one strategy routed.
  double best_route_pct(std::size_t strategy_index) const;
  double failure_rate(std::size_t strategy_index) const;
};

struct StrategySummary {
  Strategy strategy;
  double best_route_pct_mean = 0.0;
  double best_route_pct_std = 0.0;  ///< across powers
  double mean_hops = 0.0;
  double failure_rate = 0.0;
};

struct RouteRecord {
  std::size_t scenario = 0;
  double power = 0.0;
  Route route;
};

struct ComparisonReport {
  std::string label;
  std::vector<PowerComparison> per_power;
  std::vector<StrategySummary> summary;
  std::vector<std::vector<RouteRecord>> routes;  ///< successful routes per strategy, when kept
};

struct CompareOptions {
  std::size_t n_pairs = 2000;  ///< per power, spread round-robin over the snapshots
  std::uint64_t seed = 1;
  std::size_t hop_cap = kDefaultHopCap;
  bool keep_routes = false;
  std::string label;
};

/// Runs every strategy on the identical set of non-neighbor pairs at each
/// power and counts how often each attains the minimum hop count.
ComparisonReport compare_strategies(std::span<const PreparedScenario> scenarios, std::span<const double> powers,
                                    std::span<const Strategy> strategies, const ChannelParams& params,
                                    const CompareOptions& options);

// ---------------------------------------------------------------------------
// Link and relay statistics

struct ObstructionHistogram {
  std::vector<std::size_t> counts;  ///< counts[k]: links with k obstructing vehicles

  void add(int obstacles);
  std::size_t total() const;
  double zero_share() const;
};

struct ObstructionReport {
  ObstructionHistogram selected;   ///< hops chosen by the routes
  ObstructionHistogram all_links;  ///< every unordered above-threshold link
};

ObstructionReport chosen_link_obstructions(std::span<const Route> routes, std::span<const NeighborTable> tables);

/// Percentage of vehicles acting as an interior relay in at least one route.
double relay_usage(std::span<const Route> routes, std::size_t vehicle_count);
double relay_usage(std::span<const RouteRecord> routes, std::size_t vehicle_count);

// ---------------------------------------------------------------------------
// CSV output

void write_pdr_curve_csv(std::ostream& out, const PdrCurve& curve);
void write_comparison_csv(std::ostream& out, std::span<const ComparisonReport> reports);
void write_comparison_summary_csv(std::ostream& out, std::span<const ComparisonReport> reports);

struct ObstructionSeries {
  double power = 0.0;
  std::string links;  ///< strategy name, or "all" for every above-threshold link
  ObstructionHistogram histogram;
};

void write_obstruction_csv(std::ostream& out, std::span<const ObstructionSeries> series);

struct RelayUsageRow {
  std::string label;
  double power = 0.0;
  std::string strategy;
  double percent = 0.0;
};

/// Exact percentages are written; reports round them to whole percent.
void write_relay_usage_csv(std::ostream& out, std::span<const RelayUsageRow> rows);

struct LosRatioRow {
  std::size_t snapshot = 0;
  VehicleId id = 0;
  VehicleClass cls = VehicleClass::Short;
  double ratio = 0.0;
};

/// per_vehicle_los_ratio over several snapshots, tagged with class.
std::vector<LosRatioRow> los_ratio_rows(std::span<const Scenario> scenarios, double range, double wavelength);

double median_los_ratio(std::span<const LosRatioRow> rows, VehicleClass cls);

/// `snapshot,vehicle_id,class,los_ratio,cdf` with the class-wise empirical CDF.
void write_los_ratio_csv(std::ostream& out, std::span<const LosRatioRow> rows);

}  // namespace tvr
