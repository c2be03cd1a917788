#include "tvr/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tvr {

void ChannelParams::validate() const
{
  if (!(frequency > 0.0)) {
    throw std::invalid_argument("channel: frequency must be positive");
  }
  if (!(shadowing_sigma >= 0.0)) {
    throw std::invalid_argument("channel: shadowing sigma must be non-negative");
  }
  if (!(sensitivity < tx_power + antenna_gain_tx + antenna_gain_rx)) {
    throw std::invalid_argument("channel: sensitivity is above the transmit EIRP plus receive gain");
  }
}

double free_space_path_loss(double distance, double frequency)
{
  if (!(distance > 0.0)) {
    throw std::domain_error("free_space_path_loss: distance must be positive");
  }
  const double lambda = kSpeedOfLight / frequency;
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance / lambda);
}

double knife_edge_loss(double nu)
{
  if (!(nu > -0.78)) {
    return 0.0;
  }
  const double x = nu - 0.1;
  const double loss = 6.9 + 20.0 * std::log10(std::sqrt(x * x + 1.0) + x);
  return loss > 0.0 ? loss : 0.0;
}

double diffraction_parameter(double h, double da, double db, double wavelength)
{
  return h * std::sqrt(2.0 * (da + db) / (wavelength * da * db));
}

double obstruction_loss(const LinkProfile& profile, double wavelength)
{
  const auto& edges = profile.obstacles;
  if (edges.empty()) {
    return 0.0;
  }
  const double z_tx = profile.tx_antenna.z;
  const double z_rx = profile.rx_antenna.z;
  const double d = profile.distance;

  // Absolute edge tops along the axis, bracketed by the two antennas.
  std::vector<double> pos;
  std::vector<double> top;
  pos.reserve(edges.size() + 2);
  top.reserve(edges.size() + 2);
  pos.push_back(0.0);
  top.push_back(z_tx);
  for (const auto& e : edges) {
    pos.push_back(e.d1);
    top.push_back(z_tx + (e.d1 / d) * (z_rx - z_tx) + e.clearance);
  }
  pos.push_back(d);
  top.push_back(z_rx);

  double total = 0.0;
  for (std::size_t i = 1; i + 1 < pos.size(); ++i) {
    const double da = pos[i] - pos[i - 1];
    const double db = pos[i + 1] - pos[i];
    if (!(da > 0.0) || !(db > 0.0)) {
      // Two edges at the same axial position: the lower one is shadowed.
      continue;
    }
    const double line = top[i - 1] + (da / (da + db)) * (top[i + 1] - top[i - 1]);
    total += knife_edge_loss(diffraction_parameter(top[i] - line, da, db, wavelength));
  }
  return total;
}

LinkBudget make_budget(double distance, double free_space_loss, double obstruction_loss, int obstacles,
                       const ChannelParams& params)
{
  LinkBudget b;
  b.distance = distance;
  b.free_space_loss = free_space_loss;
  b.obstruction_loss = obstruction_loss;
  b.received_power =
      params.tx_power + params.antenna_gain_tx + params.antenna_gain_rx - free_space_loss - obstruction_loss;
  b.los = obstacles == 0;
  b.obstacles = obstacles;
  return b;
}

LinkBudget received_power(const Vehicle& tx, const Vehicle& rx, std::span<const Vehicle> vehicles,
                          const ChannelParams& params, Rng* rng)
{
  const double lambda = params.wavelength();
  const LinkProfile profile = link_profile(tx, rx, vehicles, lambda);
  LinkBudget b = make_budget(profile.distance, free_space_path_loss(profile.distance, params.frequency),
                             obstruction_loss(profile, lambda), static_cast<int>(profile.obstacles.size()),
                             params);
  if (rng != nullptr && params.shadowing_sigma > 0.0) {
    std::normal_distribution<double> shadow(0.0, params.shadowing_sigma);
    b.received_power += shadow(*rng);
  }
  return b;
}

double link_pdr(const LinkBudget& budget, const ChannelParams& params)
{
  if (params.shadowing_sigma > 0.0) {
    return q_function((params.sensitivity - budget.received_power) / params.shadowing_sigma);
  }
  return budget.received_power >= params.sensitivity ? 1.0 : 0.0;
}

double route_pdr(std::span<const LinkBudget> hops, const ChannelParams& params)
{
  if (hops.empty()) {
    throw std::invalid_argument("route_pdr: route has no hops");
  }
  double p = 1.0;
  for (const auto& h : hops) {
    p *= link_pdr(h, params);
  }
  return p;
}

PathLossCache::PathLossCache(std::span<const Vehicle> vehicles, double frequency, double max_path_loss)
    : vehicle_count_(vehicles.size()), frequency_(frequency), max_path_loss_(max_path_loss)
{
  const double lambda = kSpeedOfLight / frequency;
  for (std::size_t a = 0; a < vehicles.size(); ++a) {
    for (std::size_t b = a + 1; b < vehicles.size(); ++b) {
      const double d = distance(vehicles[a].antenna(), vehicles[b].antenna());
      const double fspl = free_space_path_loss(d, frequency);
      if (fspl > max_path_loss) {
        continue;
      }
      const LinkProfile profile = link_profile(vehicles[a], vehicles[b], vehicles, lambda);
      entries_.push_back({a, b, profile.distance, fspl, obstruction_loss(profile, lambda),
                          static_cast<int>(profile.obstacles.size())});
    }
  }
}

}  // namespace tvr
