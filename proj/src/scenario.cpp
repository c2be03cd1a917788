#include "tvr/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "tvr/stats.hpp"

namespace tvr {

void RoadConfig::validate() const
{
  if (!(length > 0.0) || lanes < 1 || !(lane_width > 0.0)) {
    throw std::invalid_argument("road: length, lanes and lane width must be positive");
  }
  if (!(density > 0.0)) {
    throw std::invalid_argument("road: density must be positive");
  }
  if (!(tall_fraction >= 0.0 && tall_fraction <= 1.0)) {
    throw std::invalid_argument("road: tall fraction must lie in [0, 1]");
  }
  if (!(tall_height.stddev > 0.0) || !(short_height.stddev > 0.0)) {
    throw std::invalid_argument("road: height standard deviations must be positive");
  }
  if (!(tall_height.mean > 0.0) || !(short_height.mean > 0.0)) {
    throw std::invalid_argument("road: mean heights must be positive");
  }
  for (const Footprint& f : {tall_dims, short_dims}) {
    if (!(f.length > 0.0) || !(f.width > 0.0)) {
      throw std::invalid_argument("road: vehicle footprints must be positive");
    }
  }
  if (!(antenna_offset >= 0.0)) {
    throw std::invalid_argument("road: antenna offset must be non-negative");
  }
}

Scenario::Scenario(std::vector<Vehicle> vehicles, RoadConfig road, std::uint64_t seed)
    : vehicles_(std::move(vehicles)), road_(road), seed_(seed)
{
  std::stable_sort(vehicles_.begin(), vehicles_.end(), [](const Vehicle& a, const Vehicle& b) {
    return a.lane < b.lane || (a.lane == b.lane && a.center.x < b.center.x);
  });
  index_.reserve(vehicles_.size());
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    if (!index_.emplace(vehicles_[i].id, i).second) {
      throw std::invalid_argument("scenario: duplicate vehicle id " + std::to_string(vehicles_[i].id));
    }
  }
}

std::optional<std::size_t> Scenario::index_of(VehicleId id) const
{
  const auto it = index_.find(id);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

const Vehicle& Scenario::at(VehicleId id) const
{
  const auto idx = index_of(id);
  if (!idx) {
    throw std::out_of_range("scenario: unknown vehicle id " + std::to_string(id));
  }
  return vehicles_[*idx];
}

Scenario generate(const RoadConfig& config, std::uint64_t seed)
{
  config.validate();
  Rng rng(seed);
  std::exponential_distribution<double> gap(config.density / 1000.0);
  std::bernoulli_distribution is_tall(config.tall_fraction);
  std::normal_distribution<double> tall_h(config.tall_height.mean, config.tall_height.stddev);
  std::normal_distribution<double> short_h(config.short_height.mean, config.short_height.stddev);

  std::vector<Vehicle> vehicles;
  VehicleId next_id = 0;
  for (int lane = 0; lane < config.lanes; ++lane) {
    double front_of_previous = 0.0;
    for (;;) {
      const double rear = front_of_previous + gap(rng);
      const bool tall = is_tall(rng);
      double height = 0.0;
      do {
        height = tall ? tall_h(rng) : short_h(rng);
      } while (!(height > 0.0));
      const Footprint dims = tall ? config.tall_dims : config.short_dims;
      if (rear + dims.length > config.length) {
        break;
      }
      Vehicle v;
      v.id = next_id++;
      v.center = {rear + 0.5 * dims.length, (lane + 0.5) * config.lane_width};
      v.lane = lane;
      v.length = dims.length;
      v.width = dims.width;
      v.height = height;
      v.cls = tall ? VehicleClass::Tall : VehicleClass::Short;
      v.antenna_offset = config.antenna_offset;
      vehicles.push_back(v);
      front_of_previous = rear + dims.length;
    }
  }
  return Scenario(std::move(vehicles), config, seed);
}

CsvError::CsvError(std::size_t row, const std::string& what)
    : std::runtime_error("csv row " + std::to_string(row) + ": " + what), row_(row)
{
}

namespace {

std::vector<std::string> split(const std::string& line)
{
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

std::string trim(std::string s)
{
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

template <typename T>
T parse_number(const std::string& text, std::size_t row, const char* column)
{
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw CsvError(row, std::string("cannot parse ") + column + " from '" + text + "'");
  }
  return value;
}

}  // namespace

Scenario read_csv(std::istream& in, double lane_width, double antenna_offset)
{
  static const std::vector<std::string> kColumns{"id",      "x_m",      "y_m",     "heading_deg",
                                                 "length_m", "width_m", "height_m"};
  std::string line;
  if (!std::getline(in, line)) {
    throw CsvError(0, "missing header");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  std::vector<std::string> header = split(line);
  for (auto& h : header) {
    h = trim(h);
  }
  const bool has_class = header.size() == kColumns.size() + 1 && header.back() == "class";
  if (!std::equal(kColumns.begin(), kColumns.end(), header.begin(), header.begin() + std::min(header.size(), kColumns.size())) ||
      (header.size() != kColumns.size() && !has_class)) {
    throw CsvError(0, "header must be id,x_m,y_m,heading_deg,length_m,width_m,height_m[,class]");
  }

  std::vector<Vehicle> vehicles;
  std::size_t row = 0;
  double max_front = 0.0;
  int max_lane = 0;
  std::size_t tall_count = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (trim(line).empty()) {
      continue;
    }
    auto fields = split(line);
    if (fields.size() != header.size()) {
      throw CsvError(row, "expected " + std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
    }
    for (auto& f : fields) {
      f = trim(f);
    }
    Vehicle v;
    v.id = parse_number<VehicleId>(fields[0], row, "id");
    v.center = {parse_number<double>(fields[1], row, "x_m"), parse_number<double>(fields[2], row, "y_m")};
    const double heading = parse_number<double>(fields[3], row, "heading_deg") * std::numbers::pi / 180.0;
    v.heading = {std::cos(heading), std::sin(heading)};
    v.length = parse_number<double>(fields[4], row, "length_m");
    v.width = parse_number<double>(fields[5], row, "width_m");
    v.height = parse_number<double>(fields[6], row, "height_m");
    if (!(v.length > 0.0) || !(v.width > 0.0) || !(v.height > 0.0)) {
      throw CsvError(row, "vehicle dimensions must be positive");
    }
    const std::string cls = has_class ? fields[7] : std::string{};
    if (cls == "tall") {
      v.cls = VehicleClass::Tall;
    } else if (cls == "short") {
      v.cls = VehicleClass::Short;
    } else if (cls.empty()) {
      v.cls = v.height > 2.0 ? VehicleClass::Tall : VehicleClass::Short;
    } else {
      throw CsvError(row, "class must be 'tall' or 'short', got '" + cls + "'");
    }
    v.lane = std::max(0, static_cast<int>(std::floor(v.center.y / lane_width)));
    v.antenna_offset = antenna_offset;
    max_front = std::max(max_front, v.center.x + 0.5 * v.length);
    max_lane = std::max(max_lane, v.lane);
    tall_count += v.cls == VehicleClass::Tall ? 1 : 0;
    vehicles.push_back(v);
  }

  RoadConfig road;
  road.lane_width = lane_width;
  road.antenna_offset = antenna_offset;
  if (!vehicles.empty()) {
    road.length = max_front;
    road.lanes = max_lane + 1;
    road.density = static_cast<double>(vehicles.size()) / road.lanes / (road.length / 1000.0);
    road.tall_fraction = static_cast<double>(tall_count) / static_cast<double>(vehicles.size());
  }
  return Scenario(std::move(vehicles), road, 0);
}

Scenario load_csv(const std::filesystem::path& path, double lane_width, double antenna_offset)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return read_csv(in, lane_width, antenna_offset);
}

void write_csv(std::ostream& out, const Scenario& scenario)
{
  out << "id,x_m,y_m,heading_deg,length_m,width_m,height_m,class\n";
  for (const Vehicle& v : scenario.vehicles()) {
    const double heading = std::atan2(v.heading.y, v.heading.x) * 180.0 / std::numbers::pi;
    out << v.id << ',' << format_double(v.center.x) << ',' << format_double(v.center.y) << ','
        << format_double(heading) << ',' << format_double(v.length) << ',' << format_double(v.width) << ','
        << format_double(v.height) << ',' << to_string(v.cls) << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Scenario& scenario)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  write_csv(out, scenario);
}

std::vector<double> spacing_samples(const Scenario& scenario)
{
  const auto vs = scenario.vehicles();
  if (vs.size() < 2) {
    throw std::invalid_argument("spacing_samples: need at least two vehicles");
  }
  // Sweep in x order; the nearest neighbor is found by scanning outwards until
  // the longitudinal gap alone exceeds the best distance so far.
  std::vector<std::size_t> order(vs.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vs[a].center.x < vs[b].center.x; });

  std::vector<double> nearest(vs.size(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Vehicle& v = vs[order[k]];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = k + 1; j < order.size() && vs[order[j]].center.x - v.center.x <= best; ++j) {
      best = std::min(best, distance(v.center, vs[order[j]].center));
    }
    for (std::size_t j = k; j-- > 0 && v.center.x - vs[order[j]].center.x <= best;) {
      best = std::min(best, distance(v.center, vs[order[j]].center));
    }
    nearest[order[k]] = best;
  }
  return nearest;
}

std::vector<double> lane_gaps(const Scenario& scenario)
{
  std::vector<double> gaps;
  const auto vs = scenario.vehicles();
  for (std::size_t i = 1; i < vs.size(); ++i) {
    if (vs[i].lane == vs[i - 1].lane) {
      gaps.push_back((vs[i].center.x - 0.5 * vs[i].length) - (vs[i - 1].center.x + 0.5 * vs[i - 1].length));
    }
  }
  return gaps;
}

}  // namespace tvr
