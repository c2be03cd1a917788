#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tvr/channel.hpp"
#include "tvr/scenario.hpp"
#include "tvr/stats.hpp"

namespace tvr {

struct Neighbor {
  std::size_t index = 0;  ///< position in the scenario's vehicle list
  VehicleId id = 0;
  double distance = 0.0;  ///< 2-D center distance
  LinkBudget budget;
  VehicleClass cls = VehicleClass::Short;
};

/// Who hears whom above the sensitivity threshold. Immutable once built; it
/// keeps its own copy of the node positions so it does not borrow the scenario.
class NeighborTable {
public:
  struct Node {
    VehicleId id = 0;
    Vec2 center;
    VehicleClass cls = VehicleClass::Short;
  };

  NeighborTable(std::vector<Node> nodes, std::vector<std::vector<Neighbor>> neighbors);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t index) const { return nodes_[index]; }
  std::span<const Node> nodes() const { return nodes_; }

  /// Neighbors of vehicle `index`, ordered by index.
  std::span<const Neighbor> neighbors(std::size_t index) const { return neighbors_[index]; }
  const Neighbor* find(std::size_t from, std::size_t to) const;
  bool are_neighbors(std::size_t from, std::size_t to) const { return find(from, to) != nullptr; }

  std::size_t index_of(VehicleId id) const;
  std::size_t link_count() const;

private:
  std::vector<Node> nodes_;
  std::vector<std::vector<Neighbor>> neighbors_;
  std::unordered_map<VehicleId, std::size_t> index_;
};

/// Evaluates every ordered pair through the channel model without shadowing.
NeighborTable build_neighbor_table(const Scenario& scenario, const ChannelParams& params);

/// Same relation from precomputed loss terms; identical to the direct build
/// whenever the cache covers every pair that can reach the threshold.
NeighborTable build_neighbor_table(const Scenario& scenario, const PathLossCache& cache,
                                   const ChannelParams& params);

enum class StrategyKind { FarthestNeighbor, MostNewNeighbors, TallVehicleRelaying };

struct Strategy {
  StrategyKind kind = StrategyKind::FarthestNeighbor;
  double x_max = 50.0;  ///< only used by TVR

  static Strategy farthest() { return {StrategyKind::FarthestNeighbor, 0.0}; }
  static Strategy most_new() { return {StrategyKind::MostNewNeighbors, 0.0}; }
  static Strategy tvr(double x_max = 50.0) { return {StrategyKind::TallVehicleRelaying, x_max}; }

  std::string name() const;
};

/// Parses "farthest", "mostnew" or "tvr" (case-insensitive).
Strategy parse_strategy(const std::string& text, double x_max);

/// Neighbors of `tx` strictly closer to `destination` than `tx` itself.
std::vector<VehicleId> forward_set(const NeighborTable& table, VehicleId tx, VehicleId destination);

std::optional<VehicleId> select_farthest(const NeighborTable& table, VehicleId tx, VehicleId destination);
std::optional<VehicleId> select_most_new(const NeighborTable& table, VehicleId tx, VehicleId destination);
std::optional<VehicleId> select_tvr(const NeighborTable& table, VehicleId tx, VehicleId destination,
                                    double x_max);
std::optional<VehicleId> select_next_hop(const NeighborTable& table, VehicleId tx, VehicleId destination,
                                         const Strategy& strategy);

enum class RouteFailure { LocalMaximum, HopCapExceeded };

const char* to_string(RouteFailure failure);

inline constexpr std::size_t kDefaultHopCap = 100;

struct Route {
  VehicleId source = 0;
  VehicleId destination = 0;
  std::vector<VehicleId> hops;    ///< source first; destination last on success
  std::vector<LinkBudget> links;  ///< links[i] joins hops[i] and hops[i+1]
  Strategy strategy;

  std::size_t hop_count() const { return links.size(); }
};

/// A route attempt. On failure `route` holds the path up to the point where
/// forwarding stopped.
struct RouteResult {
  Route route;
  std::optional<RouteFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Greedy geographic forwarding. The destination is taken directly as soon
/// as it is a neighbor of the current holder; otherwise the strategy picks.
RouteResult build_route(const NeighborTable& table, VehicleId source, VehicleId destination,
                        const Strategy& strategy, std::size_t hop_cap = kDefaultHopCap);

/// As build_route but with the first relay imposed; the rest follows `strategy`.
/// `first_hop` must be a forward neighbor of `source`.
RouteResult build_route_via(const NeighborTable& table, VehicleId source, VehicleId first_hop,
                            VehicleId destination, const Strategy& strategy,
                            std::size_t hop_cap = kDefaultHopCap);

struct StrategyOutcome {
  Strategy strategy;
  RouteResult result;
  bool best = false;  ///< attains the minimum hop count among successes
};

struct BestRouteReport {
  std::vector<StrategyOutcome> outcomes;  ///< same order as the requested strategies
  std::size_t min_hops = 0;
};

class AllStrategiesFailed : public std::runtime_error {
public:
  AllStrategiesFailed() : std::runtime_error("every strategy failed to reach the destination") {}
};

/// Runs every strategy on the same pair and flags the ones reaching the
/// fewest hops. Throws AllStrategiesFailed when none succeeds.
BestRouteReport best_route_hops(const NeighborTable& table, VehicleId source, VehicleId destination,
                                std::span<const Strategy> strategies, std::size_t hop_cap = kDefaultHopCap);

/// Uniformly drawn ordered pairs that are not direct neighbors. Returns fewer
/// than `count` pairs when the snapshot has too few candidates.
std::vector<std::pair<VehicleId, VehicleId>> sample_non_neighbor_pairs(const NeighborTable& table,
                                                                        std::size_t count, Rng& rng);

}  // namespace tvr
