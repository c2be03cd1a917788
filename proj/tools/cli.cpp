#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tvr/analysis.hpp"
#include "tvr/calibration.hpp"
#include "tvr/channel.hpp"
#include "tvr/routing.hpp"
#include "tvr/scenario.hpp"
#include "tvr/stats.hpp"

namespace tvr::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string density = "medium";
  std::vector<double> powers;
  std::size_t pairs = 2000;
  double xmax = 50.0;
  double sigma = 0.0;
  std::size_t snapshots = 10;
  std::string strategies = "farthest,mostnew,tvr";
  double gamma = RoadConfig{}.tall_fraction;
  std::vector<std::string> inputs;
  double los_range = 750.0;
  double relay_range = 500.0;
  std::string write_config;

  bool sigma_given = false;
  bool snapshots_given = false;
};

std::optional<double> parse_density(const std::string& text)
{
  if (text == "low") {
    return kDensityLow;
  }
  if (text == "medium") {
    return kDensityMedium;
  }
  if (text == "high") {
    return kDensityHigh;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(value > 0.0)) {
    return std::nullopt;
  }
  return value;
}

std::vector<Strategy> parse_strategies(const std::string& list, double x_max)
{
  std::vector<Strategy> out;
  std::istringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) {
      out.push_back(parse_strategy(item, x_max));
    }
  }
  if (out.empty()) {
    throw std::invalid_argument("no strategies given");
  }
  return out;
}

fs::path output_dir(const Options& opt)
{
  const fs::path dir(opt.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string() +
                             (ec ? ": " + ec.message() : std::string{}));
  }
  return dir;
}

template <typename Writer>
fs::path write_file(const fs::path& path, Writer&& writer)
{
  std::ofstream file(path);
  if (!file) {
    throw std::runtime_error("cannot write " + path.string());
  }
  writer(file);
  file.close();
  if (!file) {
    throw std::runtime_error("failed writing " + path.string());
  }
  return path;
}

RoadConfig road_for(const Options& opt)
{
  RoadConfig road;
  road.density = *parse_density(opt.density);
  road.tall_fraction = opt.gamma;
  return road;
}

ChannelParams channel_for(const Options& opt, double default_sigma)
{
  ChannelParams params;
  params.shadowing_sigma = opt.sigma_given ? opt.sigma : default_sigma;
  params.validate();
  return params;
}

std::vector<Scenario> scenarios_for(const Options& opt)
{
  std::vector<Scenario> out;
  if (!opt.inputs.empty()) {
    for (const auto& path : opt.inputs) {
      out.push_back(load_csv(path));
    }
    return out;
  }
  const RoadConfig road = road_for(opt);
  for (std::size_t k = 0; k < opt.snapshots; ++k) {
    out.push_back(generate(road, opt.seed + k));
  }
  return out;
}

std::string label_for(const Options& opt)
{
  return opt.inputs.empty() ? opt.density : std::string("input");
}

std::vector<double> powers_or(const Options& opt, std::vector<double> fallback)
{
  return opt.powers.empty() ? fallback : opt.powers;
}

std::string fixed(double v, int digits)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

void cmd_generate(Options opt, std::ostream& out)
{
  if (!opt.snapshots_given) {
    opt.snapshots = 1;
  }
  opt.inputs.clear();
  const fs::path dir = output_dir(opt);
  const auto scenarios = scenarios_for(opt);
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const std::string name = scenarios.size() == 1 ? "scenario.csv" : "scenario_" + std::to_string(k) + ".csv";
    const auto path = write_file(dir / name, [&](std::ostream& f) { write_csv(f, scenarios[k]); });
    out << path.string() << ": " << scenarios[k].size() << " vehicles\n";
  }
}

void cmd_calibrate(const Options& opt, std::ostream& out, std::ostream& err)
{
  std::vector<double> sweep;
  for (int p = 1; p <= 20; ++p) {
    sweep.push_back(p);
  }
  const auto powers = powers_or(opt, sweep);
  const ChannelParams params = channel_for(opt, 0.0);
  const fs::path dir = output_dir(opt);
  const auto scenarios = scenarios_for(opt);
  const auto prepared = prepare(scenarios, params, *std::max_element(powers.begin(), powers.end()));
  const XmaxEstimate est = average_xmax(prepared, powers, params, opt.pairs, opt.seed);

  for (double p : est.skipped_powers) {
    err << "power " << format_double(p) << " dBm skipped: no tall-best samples\n";
  }
  write_file(dir / "calibration_samples.csv", [&](std::ostream& f) { write_samples_csv(f, est.samples); });
  write_file(dir / "xmax.csv", [&](std::ostream& f) {
    f << "power_dbm,mean_tall_best_m,n_tall_best,n_short_best,fit_root_m\n";
    for (const PowerMean& pm : est.used) {
      std::vector<double> tall;
      std::vector<double> shorter;
      for (const auto& s : est.samples) {
        if (s.power == pm.power) {
          (s.label == BestRelay::TallBest ? tall : shorter).push_back(s.value);
        }
      }
      std::string root;
      try {
        root = format_double(solve_xmax(fit_normal(tall), fit_normal(shorter)));
      } catch (const InsufficientSamples& e) {
        err << "power " << format_double(pm.power) << " dBm: " << e.what() << '\n';
      } catch (const NoRoot& e) {
        err << "power " << format_double(pm.power) << " dBm: " << e.what() << '\n';
      }
      f << format_double(pm.power) << ',' << format_double(pm.mean_tall_best) << ',' << pm.n_tall_best << ','
        << pm.n_short_best << ',' << root << '\n';
    }
  });
  out << "power_dbm  E[t|power]_m  tall_best  short_best\n";
  for (const PowerMean& pm : est.used) {
    out << std::setw(9) << format_double(pm.power) << "  " << std::setw(12) << fixed(pm.mean_tall_best, 2) << "  "
        << std::setw(9) << pm.n_tall_best << "  " << std::setw(10) << pm.n_short_best << '\n';
  }
  out << "x_max = " << fixed(est.x_max, 2) << " m over " << est.used.size() << " powers\n";
}

void cmd_evaluate(const Options& opt, std::ostream& out)
{
  const auto powers = powers_or(opt, {5.0, 10.0, 15.0});
  const auto strategies = parse_strategies(opt.strategies, opt.xmax);
  const ChannelParams params = channel_for(opt, 0.0);
  const fs::path dir = output_dir(opt);
  const auto scenarios = scenarios_for(opt);
  const auto prepared = prepare(scenarios, params, *std::max_element(powers.begin(), powers.end()));

  CompareOptions copt;
  copt.n_pairs = opt.pairs;
  copt.seed = opt.seed;
  copt.keep_routes = true;
  copt.label = label_for(opt);
  const std::vector<ComparisonReport> reports{compare_strategies(prepared, powers, strategies, params, copt)};
  const ComparisonReport& report = reports.front();

  std::size_t vehicles = 0;
  for (const auto& s : scenarios) {
    vehicles += s.size();
  }
  std::vector<ObstructionSeries> series;
  std::vector<RelayUsageRow> usage;
  for (double p : powers) {
    ChannelParams at = params;
    at.tx_power = p;
    std::vector<NeighborTable> tables;
    for (const auto& ps : prepared) {
      tables.push_back(build_neighbor_table(*ps.scenario, ps.cache, at));
    }
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      std::vector<Route> routes;
      std::vector<RouteRecord> records;
      for (const auto& rec : report.routes[i]) {
        if (rec.power == p) {
          routes.push_back(rec.route);
          records.push_back(rec);
        }
      }
      ObstructionReport obs = chosen_link_obstructions(routes, tables);
      if (i == 0) {
        series.push_back({p, "all", obs.all_links});
      }
      series.push_back({p, strategies[i].name(), std::move(obs.selected)});
      usage.push_back({copt.label, p, strategies[i].name(), relay_usage(records, vehicles)});
    }
  }

  write_file(dir / "comparison.csv", [&](std::ostream& f) { write_comparison_csv(f, reports); });
  write_file(dir / "comparison_summary.csv", [&](std::ostream& f) { write_comparison_summary_csv(f, reports); });
  write_file(dir / "obstructions.csv", [&](std::ostream& f) { write_obstruction_csv(f, series); });
  write_file(dir / "relay_usage.csv", [&](std::ostream& f) { write_relay_usage_csv(f, usage); });

  out << "strategy   best_route_pct  std    mean_hops  failure_rate\n";
  for (const auto& s : report.summary) {
    out << std::left << std::setw(9) << s.strategy.name() << std::right << "  " << std::setw(14)
        << fixed(s.best_route_pct_mean, 2) << "  " << std::setw(5) << fixed(s.best_route_pct_std, 2) << "  "
        << std::setw(9) << fixed(s.mean_hops, 2) << "  " << std::setw(12) << fixed(s.failure_rate, 4) << '\n';
  }
  std::size_t failures = 0;
  for (const auto& pc : report.per_power) {
    failures += pc.all_failed;
  }
  out << "pairs no strategy could route: " << failures << '\n';
}

void cmd_analyze(const Options& opt, std::ostream& out)
{
  const ChannelParams base = channel_for(opt, 3.0);
  ChannelParams params = base;
  params.tx_power = opt.powers.empty() ? base.tx_power : opt.powers.front();
  if (!(opt.los_range > 0.0) || !(opt.relay_range > 0.0)) {
    throw std::invalid_argument("ranges must be positive");
  }
  const fs::path dir = output_dir(opt);
  const auto scenarios = scenarios_for(opt);

  const auto rows = los_ratio_rows(scenarios, opt.los_range, params.wavelength());
  write_file(dir / "los_ratio.csv", [&](std::ostream& f) { write_los_ratio_csv(f, rows); });

  const RoadConfig& road = scenarios.front().road();
  write_file(dir / "tall_relay_prob.csv", [&](std::ostream& f) {
    f << "x_max_m,analytic,empirical,vehicles\n";
    for (int k = 0; k <= 20; ++k) {
      const double x = 10.0 * k;
      if (x > opt.relay_range) {
        break;
      }
      const auto emp = tall_relay_prob_empirical(scenarios, opt.relay_range, x);
      f << format_double(x) << ','
        << format_double(tall_relay_prob_analytic(road.tall_fraction, road.linear_density(), x)) << ','
        << format_double(emp.probability) << ',' << emp.vehicles << '\n';
    }
  });

  struct Curve {
    const char* name;
    Pairing pairing;
    bool nlos;
    PdrCurve curve;
  };
  std::vector<Curve> curves{{"car_car", Pairing::CarCar, false, {}},
                            {"van_x", Pairing::VanX, false, {}},
                            {"car_car_nlos", Pairing::CarCar, true, {}},
                            {"van_x_nlos", Pairing::VanX, true, {}}};
  for (auto& c : curves) {
    PdrOptions popt;
    popt.nlos_only = c.nlos;
    c.curve = pdr_vs_distance(scenarios, params, c.pairing, popt);
    write_file(dir / (std::string("pdr_") + c.name + ".csv"), [&](std::ostream& f) { write_pdr_curve_csv(f, c.curve); });
  }
  write_file(dir / "effective_range.csv", [&](std::ostream& f) {
    f << "target_pdr";
    for (const auto& c : curves) {
      f << ',' << c.name << "_m";
    }
    f << '\n';
    for (int k = 50; k <= 99; k += k < 95 ? 5 : 4) {
      const double target = k / 100.0;
      f << format_double(target);
      for (const auto& c : curves) {
        const auto r = effective_range(c.curve, target, true);
        f << ',' << (r ? format_double(*r) : std::string{});
      }
      f << '\n';
    }
  });

  out << "vehicles with in-range neighbors: " << rows.size() << '\n';
  for (VehicleClass cls : {VehicleClass::Tall, VehicleClass::Short}) {
    const bool any = std::any_of(rows.begin(), rows.end(), [&](const LosRatioRow& r) { return r.cls == cls; });
    if (any) {
      out << "median LOS ratio (" << to_string(cls) << "): " << fixed(median_los_ratio(rows, cls), 3) << '\n';
    }
  }
  const auto van = effective_range(curves[3].curve, 0.9, true);
  const auto car = effective_range(curves[2].curve, 0.9, true);
  out << "NLOS effective range at PDR 0.9: van_x " << (van ? fixed(*van, 1) + " m" : "none") << ", car_car "
      << (car ? fixed(*car, 1) + " m" : "none") << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  Options opt;
  CLI::App app{"Tall vehicle relaying simulator", "tvr_sim"};
  app.set_config("--config", "", "INI-style file of key = value settings; flags override it");
  app.require_subcommand(1);

  app.add_option("--seed", opt.seed, "Base seed; snapshot k uses seed + k")->required();
  app.add_option("--out", opt.out, "Output directory")->capture_default_str();
  app.add_option("--density", opt.density, "low, medium, high or vehicles/km/lane")
      ->capture_default_str()
      ->check(CLI::Validator(
          [](std::string& v) { return parse_density(v) ? std::string{} : "expected low, medium, high or a positive number"; },
          "DENSITY"));
  app.add_option("--power", opt.powers, "Transmit power in dBm (repeatable)");
  app.add_option("--pairs", opt.pairs, "Source-destination pairs per power")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--xmax", opt.xmax, "TVR threshold in meters")->capture_default_str()->check(CLI::NonNegativeNumber);
  auto* sigma = app.add_option("--sigma", opt.sigma, "Shadowing standard deviation in dB (analyze defaults to 3)")
                    ->check(CLI::NonNegativeNumber);
  auto* snapshots = app.add_option("--snapshots", opt.snapshots, "Generated snapshots (generate defaults to 1)")
                        ->capture_default_str()
                        ->check(CLI::PositiveNumber);
  app.add_option("--strategies", opt.strategies, "Comma-separated subset of farthest,mostnew,tvr")->capture_default_str();
  app.add_option("--gamma", opt.gamma, "Tall vehicle fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  app.add_option("--input", opt.inputs, "Scenario CSV to use instead of generated snapshots (repeatable)")
      ->check(CLI::ExistingFile);
  app.add_option("--los-range", opt.los_range, "Neighborhood radius for LOS ratios, meters")->capture_default_str();
  app.add_option("--relay-range", opt.relay_range, "Range R of the tall relay window, meters")->capture_default_str();
  app.add_option("--write-config", opt.write_config, "Write the effective settings to this file")->configurable(false);

  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic snapshot as CSV");
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Estimate x_max over a power sweep");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare relay strategies");
  auto* analyze_cmd = app.add_subcommand("analyze", "Emit LOS ratio, tall relay, PDR and range data");
  for (auto* sub : {generate_cmd, calibrate_cmd, evaluate_cmd, analyze_cmd}) {
    sub->fallthrough();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  opt.sigma_given = sigma->count() > 0;
  opt.snapshots_given = snapshots->count() > 0;

  try {
    if (!opt.write_config.empty()) {
      const fs::path parent = fs::path(opt.write_config).parent_path();
      if (!parent.empty()) {
        fs::create_directories(parent);
      }
      write_file(opt.write_config, [&](std::ostream& f) { f << app.config_to_str(false, false); });
    }
    if (generate_cmd->parsed()) {
      cmd_generate(opt, out);
    } else if (calibrate_cmd->parsed()) {
      cmd_calibrate(opt, out, err);
    } else if (evaluate_cmd->parsed()) {
      cmd_evaluate(opt, out);
    } else {
      cmd_analyze(opt, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace tvr::cli
