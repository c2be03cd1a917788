#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tvr/geometry.hpp"

namespace tvr {

struct NormalDist {
  double mean = 0.0;
  double stddev = 0.0;
};

struct Footprint {
  double length = 0.0;
  double width = 0.0;
};

/// Straight multi-lane carriageway with free-flow traffic.
struct RoadConfig {
  double length = 13500.0;      ///< meters
  int lanes = 4;
  double lane_width = 3.5;      ///< meters
  double density = 7.5;         ///< vehicles / km / lane
  double tall_fraction = 0.1436;
  NormalDist tall_height{3.35, 0.08};
  NormalDist short_height{1.5, 0.08};
  Footprint tall_dims{6.3, 2.0};
  Footprint short_dims{4.2, 1.8};
  double antenna_offset = 0.0;

  /// Vehicles per meter of road over all lanes.
  double linear_density() const { return lanes * density / 1000.0; }

  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

/// Named traffic densities, vehicles/km/lane.
inline constexpr double kDensityLow = 2.5;
inline constexpr double kDensityMedium = 7.5;
inline constexpr double kDensityHigh = 10.0;

/// Immutable snapshot of the road. Vehicles are ordered by (lane, x).
class Scenario {
public:
  Scenario() = default;
  Scenario(std::vector<Vehicle> vehicles, RoadConfig road, std::uint64_t seed);

  std::span<const Vehicle> vehicles() const { return vehicles_; }
  const RoadConfig& road() const { return road_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return vehicles_.size(); }

  std::optional<std::size_t> index_of(VehicleId id) const;
  const Vehicle& at(VehicleId id) const;

private:
  std::vector<Vehicle> vehicles_;
  RoadConfig road_;
  std::uint64_t seed_ = 0;
  std::unordered_map<VehicleId, std::size_t> index_;
};

/// Draws a snapshot: per lane, bumper-to-bumper gaps are i.i.d. exponential
/// with mean 1000/density meters; each vehicle is tall with probability
/// tall_fraction and gets a normally distributed height for its class.
Scenario generate(const RoadConfig& config, std::uint64_t seed);

class CsvError : public std::runtime_error {
public:
  CsvError(std::size_t row, const std::string& what);
  std::size_t row() const { return row_; }

private:
  std::size_t row_;
};

/// Reads `id,x_m,y_m,heading_deg,length_m,width_m,height_m[,class]`.
/// Without a class column, vehicles taller than 2 m are tall. Lanes are
/// recovered from y using `lane_width`.
Scenario read_csv(std::istream& in, double lane_width = 3.5, double antenna_offset = 0.0);
Scenario load_csv(const std::filesystem::path& path, double lane_width = 3.5, double antenna_offset = 0.0);

/// Writes the same schema with class, using shortest round-trip number formatting.
void write_csv(std::ostream& out, const Scenario& scenario);
void save_csv(const std::filesystem::path& path, const Scenario& scenario);

/// Distance from each vehicle to its nearest neighbor on any lane.
std::vector<double> spacing_samples(const Scenario& scenario);

/// Bumper-to-bumper gaps between consecutive vehicles of the same lane.
std::vector<double> lane_gaps(const Scenario& scenario);

}  // namespace tvr
