#include "tvr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "tvr/stats.hpp"

namespace tvr {

double tall_relay_prob_analytic(double gamma, double lambda_s, double x_max)
{
  if (!(gamma >= 0.0) || !(lambda_s >= 0.0) || !(x_max >= 0.0)) {
    throw std::domain_error("tall_relay_prob_analytic: arguments must be non-negative");
  }
  return -std::expm1(-gamma * lambda_s * x_max);
}

TallRelayEstimate tall_relay_prob_empirical(std::span<const Scenario> scenarios, double range, double x_max)
{
  if (!(x_max >= 0.0) || !(x_max <= range)) {
    throw std::domain_error("tall_relay_prob_empirical: need 0 <= x_max <= R");
  }
  const double near = range - x_max;
  std::size_t hits = 0;
  std::size_t counted = 0;
  for (const Scenario& s : scenarios) {
    std::vector<double> tall_x;
    for (const Vehicle& v : s.vehicles()) {
      if (v.cls == VehicleClass::Tall) {
        tall_x.push_back(v.center.x);
      }
    }
    std::sort(tall_x.begin(), tall_x.end());
    for (const Vehicle& v : s.vehicles()) {
      if (v.center.x + range > s.road().length) {
        continue;
      }
      ++counted;
      const auto lo = std::lower_bound(tall_x.begin(), tall_x.end(), v.center.x + near);
      const auto hi = std::upper_bound(tall_x.begin(), tall_x.end(), v.center.x + range);
      auto in_window = static_cast<std::size_t>(hi - lo);
      // A tall vehicle never relays for itself.
      if (v.cls == VehicleClass::Tall && near <= 0.0) {
        --in_window;
      }
      hits += in_window > 0 ? 1 : 0;
    }
  }
  TallRelayEstimate est;
  est.vehicles = counted;
  est.probability = counted > 0 ? static_cast<double>(hits) / static_cast<double>(counted) : 0.0;
  return est;
}

const char* to_string(Pairing pairing)
{
  return pairing == Pairing::CarCar ? "car_car" : "van_x";
}

PdrCurve pdr_vs_distance(std::span<const Scenario> scenarios, const ChannelParams& params, Pairing pairing,
                         const PdrOptions& options)
{
  if (!(options.bin_width > 0.0)) {
    throw std::invalid_argument("pdr_vs_distance: bin width must be positive");
  }
  std::map<long, std::pair<double, std::size_t>> acc;  // bin -> (pdr sum, count)
  for (const Scenario& s : scenarios) {
    const auto vs = s.vehicles();
    for (std::size_t a = 0; a < vs.size(); ++a) {
      for (std::size_t b = a + 1; b < vs.size(); ++b) {
        const int tall = (vs[a].cls == VehicleClass::Tall ? 1 : 0) + (vs[b].cls == VehicleClass::Tall ? 1 : 0);
        if ((pairing == Pairing::CarCar) != (tall == 0)) {
          continue;
        }
        if (distance(vs[a].center, vs[b].center) > options.max_distance) {
          continue;
        }
        const LinkBudget budget = received_power(vs[a], vs[b], vs, params);
        if (options.nlos_only && budget.los) {
          continue;
        }
        auto& slot = acc[static_cast<long>(std::floor(budget.distance / options.bin_width))];
        slot.first += link_pdr(budget, params);
        ++slot.second;
      }
    }
  }
  PdrCurve curve;
  curve.bin_width = options.bin_width;
  for (const auto& [bin, sum] : acc) {
    PdrBin b;
    b.center = (static_cast<double>(bin) + 0.5) * options.bin_width;
    b.pdr = sum.first / static_cast<double>(sum.second);
    b.n_samples = sum.second;
    b.flagged = sum.second < options.reporting_floor;
    curve.bins.push_back(b);
  }
  return curve;
}

std::optional<double> effective_range(const PdrCurve& curve, double target_pdr, bool skip_flagged)
{
  if (!(target_pdr > 0.0) || !(target_pdr <= 1.0)) {
    throw std::domain_error("effective_range: target must lie in (0, 1]");
  }
  std::vector<PdrBin> pts;
  for (const auto& b : curve.bins) {
    if (b.n_samples > 0 && !(skip_flagged && b.flagged)) {
      pts.push_back(b);
    }
  }
  if (pts.empty()) {
    return std::nullopt;
  }
  if (pts.back().pdr >= target_pdr) {
    return pts.back().center;
  }
  for (std::size_t k = pts.size() - 1; k-- > 0;) {
    // pts[k + 1] is below the target here.
    if (pts[k].pdr >= target_pdr) {
      const double frac = (pts[k].pdr - target_pdr) / (pts[k].pdr - pts[k + 1].pdr);
      return pts[k].center + frac * (pts[k + 1].center - pts[k].center);
    }
  }
  return std::nullopt;
}

double StrategyStats::mean_hops() const
{
  return succeeded > 0 ? static_cast<double>(hop_sum) / static_cast<double>(succeeded) : 0.0;
}

double PowerComparison::best_route_pct(std::size_t i) const
{
  const std::size_t routed = pairs - all_failed;
  return routed > 0 ? 100.0 * static_cast<double>(per_strategy.at(i).best) / static_cast<double>(routed) : 0.0;
}

double PowerComparison::failure_rate(std::size_t i) const
{
  return pairs > 0 ? static_cast<double>(pairs - per_strategy.at(i).succeeded) / static_cast<double>(pairs) : 0.0;
}

ComparisonReport compare_strategies(std::span<const PreparedScenario> scenarios, std::span<const double> powers,
                                    std::span<const Strategy> strategies, const ChannelParams& params,
                                    const CompareOptions& options)
{
  if (strategies.empty()) {
    throw std::invalid_argument("compare_strategies: no strategies");
  }
  if (scenarios.empty()) {
    throw std::invalid_argument("compare_strategies: no scenarios");
  }
  ComparisonReport report;
  report.label = options.label;
  if (options.keep_routes) {
    report.routes.resize(strategies.size());
  }

  for (double power : powers) {
    ChannelParams at = params;
    at.tx_power = power;
    std::vector<NeighborTable> tables;
    tables.reserve(scenarios.size());
    for (const auto& p : scenarios) {
      tables.push_back(build_neighbor_table(*p.scenario, p.cache, at));
    }

    PowerComparison pc;
    pc.power = power;
    for (const Strategy& s : strategies) {
      pc.per_strategy.push_back({s, 0, 0, 0});
    }
    for (std::size_t k = 0; k < options.n_pairs; ++k) {
      const std::size_t si = k % tables.size();
      Rng rng = derive_rng(options.seed, k);
      const auto pair = sample_non_neighbor_pairs(tables[si], 1, rng);
      if (pair.empty()) {
        continue;
      }
      ++pc.pairs;
      try {
        auto best = best_route_hops(tables[si], pair.front().first, pair.front().second, strategies, options.hop_cap);
        for (std::size_t i = 0; i < best.outcomes.size(); ++i) {
          auto& o = best.outcomes[i];
          if (!o.result.ok()) {
            continue;
          }
          auto& st = pc.per_strategy[i];
          ++st.succeeded;
          st.hop_sum += o.result.route.hop_count();
          st.best += o.best ? 1 : 0;
          if (options.keep_routes) {
            report.routes[i].push_back({si, power, std::move(o.result.route)});
          }
        }
      } catch (const AllStrategiesFailed&) {
        ++pc.all_failed;
      }
    }
    report.per_power.push_back(std::move(pc));
  }

  for (std::size_t i = 0; i < strategies.size(); ++i) {
    StrategySummary sum;
    sum.strategy = strategies[i];
    std::vector<double> pct;
    std::size_t hops = 0;
    std::size_t ok = 0;
    std::size_t pairs = 0;
    for (const auto& pc : report.per_power) {
      pct.push_back(pc.best_route_pct(i));
      hops += pc.per_strategy[i].hop_sum;
      ok += pc.per_strategy[i].succeeded;
      pairs += pc.pairs;
    }
    if (!pct.empty()) {
      sum.best_route_pct_mean = mean(pct);
      sum.best_route_pct_std = pct.size() > 1 ? sample_stddev(pct) : 0.0;
    }
    sum.mean_hops = ok > 0 ? static_cast<double>(hops) / static_cast<double>(ok) : 0.0;
    sum.failure_rate = pairs > 0 ? static_cast<double>(pairs - ok) / static_cast<double>(pairs) : 0.0;
    report.summary.push_back(sum);
  }
  return report;
}

void ObstructionHistogram::add(int obstacles)
{
  const auto k = static_cast<std::size_t>(std::max(obstacles, 0));
  if (counts.size() <= k) {
    counts.resize(k + 1, 0);
  }
  ++counts[k];
}

std::size_t ObstructionHistogram::total() const
{
  std::size_t n = 0;
  for (auto c : counts) {
    n += c;
  }
  return n;
}

double ObstructionHistogram::zero_share() const
{
  const std::size_t n = total();
  return n > 0 && !counts.empty() ? static_cast<double>(counts[0]) / static_cast<double>(n) : 0.0;
}

ObstructionReport chosen_link_obstructions(std::span<const Route> routes, std::span<const NeighborTable> tables)
{
  ObstructionReport report;
  for (const Route& r : routes) {
    for (const LinkBudget& l : r.links) {
      report.selected.add(l.obstacles);
    }
  }
  for (const NeighborTable& t : tables) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (const Neighbor& n : t.neighbors(i)) {
        if (n.index > i) {
          report.all_links.add(n.budget.obstacles);
        }
      }
    }
  }
  return report;
}

double relay_usage(std::span<const Route> routes, std::size_t vehicle_count)
{
  if (vehicle_count == 0) {
    throw std::invalid_argument("relay_usage: no vehicles");
  }
  std::set<VehicleId> relays;
  for (const Route& r : routes) {
    for (std::size_t i = 1; i + 1 < r.hops.size(); ++i) {
      relays.insert(r.hops[i]);
    }
  }
  return 100.0 * static_cast<double>(relays.size()) / static_cast<double>(vehicle_count);
}

double relay_usage(std::span<const RouteRecord> routes, std::size_t vehicle_count)
{
  if (vehicle_count == 0) {
    throw std::invalid_argument("relay_usage: no vehicles");
  }
  std::set<std::pair<std::size_t, VehicleId>> relays;
  for (const RouteRecord& rec : routes) {
    const auto& hops = rec.route.hops;
    for (std::size_t i = 1; i + 1 < hops.size(); ++i) {
      relays.emplace(rec.scenario, hops[i]);
    }
  }
  return 100.0 * static_cast<double>(relays.size()) / static_cast<double>(vehicle_count);
}

void write_pdr_curve_csv(std::ostream& out, const PdrCurve& curve)
{
  out << "bin_center_m,pdr,n_samples,flagged\n";
  for (const auto& b : curve.bins) {
    out << format_double(b.center) << ',' << format_double(b.pdr) << ',' << b.n_samples << ','
        << (b.flagged ? 1 : 0) << '\n';
  }
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonReport> reports)
{
  out << "density,power_dbm,strategy,pairs,succeeded,best,best_route_pct,mean_hops,failure_rate,failures\n";
  for (const auto& r : reports) {
    for (const auto& pc : r.per_power) {
      for (std::size_t i = 0; i < pc.per_strategy.size(); ++i) {
        const auto& st = pc.per_strategy[i];
        out << r.label << ',' << format_double(pc.power) << ',' << st.strategy.name() << ',' << pc.pairs << ','
            << st.succeeded << ',' << st.best << ',' << format_double(pc.best_route_pct(i)) << ','
            << format_double(st.mean_hops()) << ',' << format_double(pc.failure_rate(i)) << ',' << pc.all_failed
            << '\n';
      }
    }
  }
}

void write_comparison_summary_csv(std::ostream& out, std::span<const ComparisonReport> reports)
{
  out << "density,strategy,best_route_pct_mean,best_route_pct_std,mean_hops,failure_rate\n";
  for (const auto& r : reports) {
    for (const auto& s : r.summary) {
      out << r.label << ',' << s.strategy.name() << ',' << format_double(s.best_route_pct_mean) << ','
          << format_double(s.best_route_pct_std) << ',' << format_double(s.mean_hops) << ','
          << format_double(s.failure_rate) << '\n';
    }
  }
}

void write_obstruction_csv(std::ostream& out, std::span<const ObstructionSeries> series)
{
  out << "power_dbm,links,obstructing_vehicles,count,share\n";
  for (const auto& s : series) {
    const double total = static_cast<double>(s.histogram.total());
    for (std::size_t k = 0; k < s.histogram.counts.size(); ++k) {
      const std::size_t c = s.histogram.counts[k];
      out << format_double(s.power) << ',' << s.links << ',' << k << ',' << c << ','
          << format_double(total > 0 ? static_cast<double>(c) / total : 0.0) << '\n';
    }
  }
}

void write_relay_usage_csv(std::ostream& out, std::span<const RelayUsageRow> rows)
{
  out << "density,power_dbm,strategy,relay_pct,relay_pct_rounded\n";
  for (const auto& r : rows) {
    out << r.label << ',' << format_double(r.power) << ',' << r.strategy << ',' << format_double(r.percent) << ','
        << std::lround(r.percent) << '\n';
  }
}

std::vector<LosRatioRow> los_ratio_rows(std::span<const Scenario> scenarios, double range, double wavelength)
{
  std::vector<LosRatioRow> rows;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const Scenario& s = scenarios[k];
    for (const auto& [id, ratio] : per_vehicle_los_ratio(s.vehicles(), range, wavelength)) {
      rows.push_back({k, id, s.at(id).cls, ratio});
    }
  }
  return rows;
}

double median_los_ratio(std::span<const LosRatioRow> rows, VehicleClass cls)
{
  std::vector<double> v;
  for (const auto& r : rows) {
    if (r.cls == cls) {
      v.push_back(r.ratio);
    }
  }
  if (v.empty()) {
    throw std::invalid_argument("median_los_ratio: no vehicle of the requested class");
  }
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_los_ratio_csv(std::ostream& out, std::span<const LosRatioRow> rows)
{
  std::map<VehicleClass, std::vector<double>> sorted;
  for (const auto& r : rows) {
    sorted[r.cls].push_back(r.ratio);
  }
  for (auto& [cls, v] : sorted) {
    std::sort(v.begin(), v.end());
  }
  out << "snapshot,vehicle_id,class,los_ratio,cdf\n";
  for (const auto& r : rows) {
    const auto& v = sorted[r.cls];
    const auto le = std::upper_bound(v.begin(), v.end(), r.ratio) - v.begin();
    out << r.snapshot << ',' << r.id << ',' << to_string(r.cls) << ',' << format_double(r.ratio) << ','
        << format_double(static_cast<double>(le) / static_cast<double>(v.size())) << '\n';
  }
}

}  // namespace tvr
