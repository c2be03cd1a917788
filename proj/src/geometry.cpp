#include "tvr/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tvr {

const char* to_string(VehicleClass cls)
{
  return cls == VehicleClass::Tall ? "tall" : "short";
}

double distance(Vec2 a, Vec2 b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

double distance(const Point3& a, const Point3& b)
{
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

std::vector<Vec2> Vehicle::footprint() const
{
  const Vec2 u = heading;
  const Vec2 v{-heading.y, heading.x};
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  std::vector<Vec2> corners;
  for (auto [su, sv] : {std::pair{1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}}) {
    corners.push_back({center.x + su * hl * u.x + sv * hw * v.x, center.y + su * hl * u.y + sv * hw * v.y});
  }
  return corners;
}

double fresnel_radius(double d1, double d2, double wavelength)
{
  if (!(d1 > 0.0) || !(d2 > 0.0) || !(wavelength > 0.0)) {
    throw std::domain_error("fresnel_radius: distances and wavelength must be positive");
  }
  return std::sqrt(wavelength * d1 * d2 / (d1 + d2));
}

namespace {

struct Approach {
  double t = 0.0;        // parameter along the segment, 0 at tx, 1 at rx
  double lateral = 0.0;  // 2-D gap between segment and footprint, 0 when they overlap
};

// Closest approach between the segment a->b and the footprint of `v`, worked
// in the vehicle's own frame where the footprint is the box [-hl,hl]x[-hw,hw].
Approach closest_approach(Vec2 a, Vec2 b, const Vehicle& v)
{
  const Vec2 u = v.heading;
  const Vec2 n{-u.y, u.x};
  auto local = [&](Vec2 p) {
    const double dx = p.x - v.center.x;
    const double dy = p.y - v.center.y;
    return Vec2{dx * u.x + dy * u.y, dx * n.x + dy * n.y};
  };
  const Vec2 p0 = local(a);
  const Vec2 p1 = local(b);
  const Vec2 dir{p1.x - p0.x, p1.y - p0.y};
  const double hl = 0.5 * v.length;
  const double hw = 0.5 * v.width;
  const double len2 = dir.x * dir.x + dir.y * dir.y;

  auto project = [&](Vec2 q) {
    if (len2 == 0.0) {
      return 0.0;
    }
    return std::clamp(((q.x - p0.x) * dir.x + (q.y - p0.y) * dir.y) / len2, 0.0, 1.0);
  };
  const double t_center = project({0.0, 0.0});

  // Liang-Barsky clip against the box.
  double t0 = 0.0;
  double t1 = 1.0;
  bool inside = true;
  const std::array<double, 4> p{-dir.x, dir.x, -dir.y, dir.y};
  const std::array<double, 4> q{p0.x + hl, hl - p0.x, p0.y + hw, hw - p0.y};
  for (int k = 0; k < 4 && inside; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) {
        inside = false;
      }
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) {
      inside = false;
    }
  }
  if (inside) {
    return {std::clamp(t_center, t0, t1), 0.0};
  }

  auto gap = [&](double t) {
    const double x = std::abs(p0.x + t * dir.x) - hl;
    const double y = std::abs(p0.y + t * dir.y) - hw;
    return std::hypot(std::max(x, 0.0), std::max(y, 0.0));
  };

  // The gap is convex in t and smooth outside the box, so its minimum sits at
  // an endpoint or at the projection of a corner. A flat minimum (segment
  // parallel to a side) is resolved towards the projection of the center.
  std::array<double, 7> candidates{0.0, 1.0, t_center, project({hl, hw}), project({-hl, hw}),
                                   project({-hl, -hw}), project({hl, -hw})};
  Approach best{0.0, std::numeric_limits<double>::infinity()};
  for (double t : candidates) {
    const double g = gap(t);
    if (g < best.lateral) {
      best = {t, g};
    }
  }
  if (gap(t_center) <= best.lateral + 1e-9) {
    best = {t_center, gap(t_center)};
  }
  return best;
}

}  // namespace

LinkProfile link_profile(const Vehicle& tx, const Vehicle& rx, std::span<const Vehicle> vehicles,
                         double wavelength)
{
  if (tx.id == rx.id) {
    throw std::invalid_argument("link_profile: transmitter and receiver are the same vehicle");
  }
  LinkProfile profile;
  profile.tx_antenna = tx.antenna();
  profile.rx_antenna = rx.antenna();
  profile.distance = distance(profile.tx_antenna, profile.rx_antenna);

  const Vec2 a{profile.tx_antenna.x, profile.tx_antenna.y};
  const Vec2 b{profile.rx_antenna.x, profile.rx_antenna.y};
  const double d = profile.distance;
  // Widest possible corridor, used only to skip far-away vehicles cheaply.
  const double corridor = kFresnelClearanceFraction * 0.5 * std::sqrt(wavelength * d);
  const double xmin = std::min(a.x, b.x) - corridor;
  const double xmax = std::max(a.x, b.x) + corridor;
  const double ymin = std::min(a.y, b.y) - corridor;
  const double ymax = std::max(a.y, b.y) + corridor;

  for (const Vehicle& v : vehicles) {
    if (v.id == tx.id || v.id == rx.id) {
      continue;
    }
    const double reach = 0.5 * std::hypot(v.length, v.width);
    if (v.center.x + reach < xmin || v.center.x - reach > xmax || v.center.y + reach < ymin ||
        v.center.y - reach > ymax) {
      continue;
    }
    const Approach ap = closest_approach(a, b, v);
    const double d1 = ap.t * d;
    if (!(d1 > 0.0) || !(d1 < d)) {
      continue;
    }
    const double limit = kFresnelClearanceFraction * fresnel_radius(d1, d - d1, wavelength);
    const double line_height = profile.tx_antenna.z + ap.t * (profile.rx_antenna.z - profile.tx_antenna.z);
    const double clearance = v.height - line_height;
    if (ap.lateral <= limit && clearance > -limit) {
      profile.obstacles.push_back({v.id, d1, clearance});
    }
  }
  std::sort(profile.obstacles.begin(), profile.obstacles.end(),
            [](const ObstacleSample& x, const ObstacleSample& y) {
              return x.d1 < y.d1 || (x.d1 == y.d1 && x.vehicle_id < y.vehicle_id);
            });
  return profile;
}

std::map<VehicleId, double> per_vehicle_los_ratio(std::span<const Vehicle> vehicles, double range,
                                                  double wavelength)
{
  if (!(range > 0.0)) {
    throw std::domain_error("per_vehicle_los_ratio: range must be positive");
  }
  const std::size_t n = vehicles.size();
  std::vector<std::size_t> total(n, 0);
  std::vector<std::size_t> los(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(vehicles[i].center, vehicles[j].center) > range) {
        continue;
      }
      ++total[i];
      ++total[j];
      if (is_los(link_profile(vehicles[i], vehicles[j], vehicles, wavelength))) {
        ++los[i];
        ++los[j];
      }
    }
  }
  std::map<VehicleId, double> ratio;
  for (std::size_t i = 0; i < n; ++i) {
    if (total[i] > 0) {
      ratio[vehicles[i].id] = static_cast<double>(los[i]) / static_cast<double>(total[i]);
    }
  }
  return ratio;
}

}  // namespace tvr
