#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace tvr {

using VehicleId = std::int64_t;

enum class VehicleClass { Short, Tall };

const char* to_string(VehicleClass cls);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(Vec2 a, Vec2 b);
double distance(const Point3& a, const Point3& b);

/// A vehicle on the road. It is both a radio node (antenna at roof center)
/// and an obstacle (flat-roofed rectangular box) for every other link.
struct Vehicle {
  VehicleId id = 0;
  Vec2 center;          ///< road frame, x along the carriageway, y across it
  int lane = 0;
  Vec2 heading{1.0, 0.0};  ///< unit vector
  double length = 4.2;
  double width = 1.8;
  double height = 1.5;
  VehicleClass cls = VehicleClass::Short;
  double antenna_offset = 0.0;  ///< antenna tip above the roof

  Point3 antenna() const { return {center.x, center.y, height + antenna_offset}; }

  /// Footprint corners in counter-clockwise order.
  std::vector<Vec2> footprint() const;
};

/// One vehicle penetrating the 60% first-Fresnel ellipsoid of a link,
/// reduced to a knife edge at its point of closest approach.
struct ObstacleSample {
  VehicleId vehicle_id = 0;
  double d1 = 0.0;         ///< meters from the transmitter along the Tx->Rx axis
  double clearance = 0.0;  ///< roof height above (+) or below (-) the antenna-to-antenna line
};

struct LinkProfile {
  Point3 tx_antenna;
  Point3 rx_antenna;
  double distance = 0.0;
  std::vector<ObstacleSample> obstacles;  ///< ascending d1
};

/// Fraction of the first Fresnel radius that must stay clear for LOS.
inline constexpr double kFresnelClearanceFraction = 0.6;

/// First Fresnel zone radius at distances d1, d2 from the two ends.
/// Throws std::domain_error on non-positive input.
double fresnel_radius(double d1, double d2, double wavelength);

/// Builds the obstruction profile of the tx -> rx link against every other
/// vehicle in `vehicles` (entries with tx.id or rx.id are skipped).
///
/// A vehicle is an obstacle when the 2-D link segment passes within
/// 0.6 * r(d1) of its footprint and its roof is higher than 0.6 * r(d1) below
/// the line joining the antennas, where d1 is the axial position of closest
/// approach and r the first Fresnel radius there. The lateral test is
/// inclusive, the vertical one strict.
LinkProfile link_profile(const Vehicle& tx, const Vehicle& rx, std::span<const Vehicle> vehicles,
                         double wavelength);

inline bool is_los(const LinkProfile& profile) { return profile.obstacles.empty(); }

/// Per-vehicle share of LOS links among all vehicles whose center lies within
/// `range` meters. Vehicles with no in-range neighbor are absent from the map.
std::map<VehicleId, double> per_vehicle_los_ratio(std::span<const Vehicle> vehicles, double range,
                                                  double wavelength);

}  // namespace tvr
