#include "tvr/routing.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace tvr {

NeighborTable::NeighborTable(std::vector<Node> nodes, std::vector<std::vector<Neighbor>> neighbors)
    : nodes_(std::move(nodes)), neighbors_(std::move(neighbors))
{
  if (nodes_.size() != neighbors_.size()) {
    throw std::invalid_argument("neighbor table: node and adjacency sizes differ");
  }
  for (auto& list : neighbors_) {
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
  }
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    index_.emplace(nodes_[i].id, i);
  }
}

const Neighbor* NeighborTable::find(std::size_t from, std::size_t to) const
{
  const auto& list = neighbors_[from];
  const auto it = std::lower_bound(list.begin(), list.end(), to,
                                   [](const Neighbor& n, std::size_t idx) { return n.index < idx; });
  return (it != list.end() && it->index == to) ? &*it : nullptr;
}

std::size_t NeighborTable::index_of(VehicleId id) const
{
  const auto it = index_.find(id);
  if (it == index_.end()) {
    throw std::out_of_range("neighbor table: unknown vehicle id " + std::to_string(id));
  }
  return it->second;
}

std::size_t NeighborTable::link_count() const
{
  std::size_t n = 0;
  for (const auto& list : neighbors_) {
    n += list.size();
  }
  return n;
}

namespace {

std::vector<NeighborTable::Node> nodes_of(const Scenario& scenario)
{
  std::vector<NeighborTable::Node> nodes;
  nodes.reserve(scenario.size());
  for (const Vehicle& v : scenario.vehicles()) {
    nodes.push_back({v.id, v.center, v.cls});
  }
  return nodes;
}

void add_link(std::vector<std::vector<Neighbor>>& adj, const Scenario& scenario, std::size_t from, std::size_t to,
              const LinkBudget& budget)
{
  const Vehicle& v = scenario.vehicles()[to];
  const Vehicle& u = scenario.vehicles()[from];
  adj[from].push_back({to, v.id, distance(u.center, v.center), budget, v.cls});
}

}  // namespace

NeighborTable build_neighbor_table(const Scenario& scenario, const ChannelParams& params)
{
  params.validate();
  const auto vs = scenario.vehicles();
  std::vector<std::vector<Neighbor>> adj(vs.size());
  for (std::size_t a = 0; a < vs.size(); ++a) {
    for (std::size_t b = 0; b < vs.size(); ++b) {
      if (a == b) {
        continue;
      }
      const LinkBudget budget = received_power(vs[a], vs[b], vs, params);
      if (budget.received_power >= params.sensitivity) {
        add_link(adj, scenario, a, b, budget);
      }
    }
  }
  return NeighborTable(nodes_of(scenario), std::move(adj));
}

NeighborTable build_neighbor_table(const Scenario& scenario, const PathLossCache& cache,
                                   const ChannelParams& params)
{
  params.validate();
  if (cache.vehicle_count() != scenario.size() || cache.frequency() != params.frequency) {
    throw std::invalid_argument("neighbor table: path loss cache built for a different snapshot or frequency");
  }
  if (params.max_path_loss() > cache.max_path_loss()) {
    throw std::invalid_argument("neighbor table: path loss cache does not cover this transmit power");
  }
  std::vector<std::vector<Neighbor>> adj(scenario.size());
  for (const auto& e : cache.entries()) {
    const LinkBudget budget = make_budget(e.distance, e.free_space_loss, e.obstruction_loss, e.obstacles, params);
    if (budget.received_power >= params.sensitivity) {
      add_link(adj, scenario, e.a, e.b, budget);
      add_link(adj, scenario, e.b, e.a, budget);
    }
  }
  return NeighborTable(nodes_of(scenario), std::move(adj));
}

std::string Strategy::name() const
{
  switch (kind) {
    case StrategyKind::FarthestNeighbor:
      return "farthest";
    case StrategyKind::MostNewNeighbors:
      return "mostnew";
    case StrategyKind::TallVehicleRelaying:
      return "tvr";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& text, double x_max)
{
  std::string s;
  for (char c : text) {
    if (c != '-' && c != '_') {
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (s == "farthest" || s == "farthestneighbor") {
    return Strategy::farthest();
  }
  if (s == "mostnew" || s == "mostnewneighbors") {
    return Strategy::most_new();
  }
  if (s == "tvr") {
    if (!(x_max >= 0.0)) {
      throw std::invalid_argument("tvr: x_max must be non-negative");
    }
    return Strategy::tvr(x_max);
  }
  throw std::invalid_argument("unknown strategy '" + text + "'");
}

const char* to_string(RouteFailure failure)
{
  return failure == RouteFailure::LocalMaximum ? "local_maximum" : "hop_cap_exceeded";
}

namespace {

using Index = std::size_t;
constexpr Index kNone = static_cast<Index>(-1);

double dist_to(const NeighborTable& t, Index a, Index dest)
{
  return distance(t.node(a).center, t.node(dest).center);
}

// (distance to destination, id) ordering shared by every selector.
bool closer(const NeighborTable& t, Index a, Index b, Index dest)
{
  const double da = dist_to(t, a, dest);
  const double db = dist_to(t, b, dest);
  return da < db || (da == db && t.node(a).id < t.node(b).id);
}

std::vector<Index> forward_indices(const NeighborTable& t, Index tx, Index dest)
{
  const double own = dist_to(t, tx, dest);
  std::vector<Index> out;
  for (const Neighbor& n : t.neighbors(tx)) {
    if (dist_to(t, n.index, dest) < own) {
      out.push_back(n.index);
    }
  }
  return out;
}

Index farthest_of(const NeighborTable& t, std::span<const Index> candidates, Index dest)
{
  Index best = kNone;
  for (Index c : candidates) {
    if (best == kNone || closer(t, c, best, dest)) {
      best = c;
    }
  }
  return best;
}

Index pick_farthest(const NeighborTable& t, Index tx, Index dest)
{
  const auto fwd = forward_indices(t, tx, dest);
  return farthest_of(t, fwd, dest);
}

Index pick_most_new(const NeighborTable& t, Index tx, Index dest)
{
  const auto fwd = forward_indices(t, tx, dest);
  if (fwd.empty()) {
    return kNone;
  }
  std::vector<char> covered(t.size(), 0);
  for (Index f : fwd) {
    covered[f] = 1;
  }
  Index best = kNone;
  std::size_t best_new = 0;
  for (Index x : fwd) {
    std::size_t fresh = 0;
    for (Index y : forward_indices(t, x, dest)) {
      fresh += covered[y] ? 0 : 1;
    }
    if (best == kNone || fresh > best_new || (fresh == best_new && closer(t, x, best, dest))) {
      best = x;
      best_new = fresh;
    }
  }
  return best;
}

Index pick_tvr(const NeighborTable& t, Index tx, Index dest, double x_max)
{
  const auto fwd = forward_indices(t, tx, dest);
  std::vector<Index> tall;
  std::vector<Index> shorts;
  for (Index f : fwd) {
    (t.node(f).cls == VehicleClass::Tall ? tall : shorts).push_back(f);
  }
  const Index far_tall = farthest_of(t, tall, dest);
  const Index far_short = farthest_of(t, shorts, dest);
  if (far_tall == kNone) {
    return far_short;
  }
  if (far_short == kNone) {
    return far_tall;
  }
  const double margin = dist_to(t, tx, far_short) - dist_to(t, tx, far_tall);
  return margin <= x_max ? far_tall : far_short;
}

Index pick(const NeighborTable& t, Index tx, Index dest, const Strategy& s)
{
  switch (s.kind) {
    case StrategyKind::FarthestNeighbor:
      return pick_farthest(t, tx, dest);
    case StrategyKind::MostNewNeighbors:
      return pick_most_new(t, tx, dest);
    case StrategyKind::TallVehicleRelaying:
      return pick_tvr(t, tx, dest, s.x_max);
  }
  return kNone;
}

std::optional<VehicleId> as_id(const NeighborTable& t, Index i)
{
  if (i == kNone) {
    return std::nullopt;
  }
  return t.node(i).id;
}

// Continues greedy forwarding from the last hop of `route`.
RouteResult forward(const NeighborTable& t, Route route, Index current, Index dest, const Strategy& s,
                    std::size_t hop_cap)
{
  auto append = [&](Index from, Index to) {
    route.hops.push_back(t.node(to).id);
    route.links.push_back(t.find(from, to)->budget);
  };
  for (;;) {
    if (current == dest) {
      return {std::move(route), std::nullopt};
    }
    if (route.hop_count() >= hop_cap) {
      return {std::move(route), RouteFailure::HopCapExceeded};
    }
    if (t.are_neighbors(current, dest)) {
      append(current, dest);
      current = dest;
      continue;
    }
    const Index next = pick(t, current, dest, s);
    if (next == kNone) {
      return {std::move(route), RouteFailure::LocalMaximum};
    }
    append(current, next);
    current = next;
  }
}

}  // namespace

std::vector<VehicleId> forward_set(const NeighborTable& table, VehicleId tx, VehicleId destination)
{
  std::vector<VehicleId> ids;
  for (Index i : forward_indices(table, table.index_of(tx), table.index_of(destination))) {
    ids.push_back(table.node(i).id);
  }
  return ids;
}

std::optional<VehicleId> select_farthest(const NeighborTable& table, VehicleId tx, VehicleId destination)
{
  return as_id(table, pick_farthest(table, table.index_of(tx), table.index_of(destination)));
}

std::optional<VehicleId> select_most_new(const NeighborTable& table, VehicleId tx, VehicleId destination)
{
  return as_id(table, pick_most_new(table, table.index_of(tx), table.index_of(destination)));
}

std::optional<VehicleId> select_tvr(const NeighborTable& table, VehicleId tx, VehicleId destination,
                                    double x_max)
{
  if (!(x_max >= 0.0)) {
    throw std::invalid_argument("select_tvr: x_max must be non-negative");
  }
  return as_id(table, pick_tvr(table, table.index_of(tx), table.index_of(destination), x_max));
}

std::optional<VehicleId> select_next_hop(const NeighborTable& table, VehicleId tx, VehicleId destination,
                                         const Strategy& strategy)
{
  return as_id(table, pick(table, table.index_of(tx), table.index_of(destination), strategy));
}

RouteResult build_route(const NeighborTable& table, VehicleId source, VehicleId destination,
                        const Strategy& strategy, std::size_t hop_cap)
{
  if (source == destination) {
    throw std::invalid_argument("build_route: source equals destination");
  }
  Route route{source, destination, {source}, {}, strategy};
  return forward(table, std::move(route), table.index_of(source), table.index_of(destination), strategy, hop_cap);
}

RouteResult build_route_via(const NeighborTable& table, VehicleId source, VehicleId first_hop,
                            VehicleId destination, const Strategy& strategy, std::size_t hop_cap)
{
  if (source == destination) {
    throw std::invalid_argument("build_route_via: source equals destination");
  }
  const Index s = table.index_of(source);
  const Index f = table.index_of(first_hop);
  const Index d = table.index_of(destination);
  const Neighbor* link = table.find(s, f);
  if (link == nullptr || !(dist_to(table, f, d) < dist_to(table, s, d))) {
    throw std::invalid_argument("build_route_via: first hop is not a forward neighbor of the source");
  }
  Route route{source, destination, {source, first_hop}, {link->budget}, strategy};
  return forward(table, std::move(route), f, d, strategy, hop_cap);
}

BestRouteReport best_route_hops(const NeighborTable& table, VehicleId source, VehicleId destination,
                                std::span<const Strategy> strategies, std::size_t hop_cap)
{
  BestRouteReport report;
  std::optional<std::size_t> min_hops;
  for (const Strategy& s : strategies) {
    StrategyOutcome o{s, build_route(table, source, destination, s, hop_cap), false};
    if (o.result.ok() && (!min_hops || o.result.route.hop_count() < *min_hops)) {
      min_hops = o.result.route.hop_count();
    }
    report.outcomes.push_back(std::move(o));
  }
  if (!min_hops) {
    throw AllStrategiesFailed();
  }
  report.min_hops = *min_hops;
  for (auto& o : report.outcomes) {
    o.best = o.result.ok() && o.result.route.hop_count() == *min_hops;
  }
  return report;
}

std::vector<std::pair<VehicleId, VehicleId>> sample_non_neighbor_pairs(const NeighborTable& table,
                                                                        std::size_t count, Rng& rng)
{
  std::vector<std::pair<VehicleId, VehicleId>> pairs;
  if (table.size() < 2) {
    return pairs;
  }
  std::uniform_int_distribution<std::size_t> pick_node(0, table.size() - 1);
  const std::size_t max_attempts = 100 * count + 1000;
  for (std::size_t attempt = 0; attempt < max_attempts && pairs.size() < count; ++attempt) {
    const std::size_t s = pick_node(rng);
    const std::size_t d = pick_node(rng);
    if (s == d || table.are_neighbors(s, d)) {
      continue;
    }
    pairs.emplace_back(table.node(s).id, table.node(d).id);
  }
  return pairs;
}

}  // namespace tvr
