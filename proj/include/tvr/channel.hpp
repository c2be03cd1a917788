#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tvr/geometry.hpp"
#include "tvr/stats.hpp"

namespace tvr {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Radio configuration shared by every vehicle. Defaults are a 5.9 GHz DSRC
/// radio at 10 dBm with 6 dBi antennas and a -90 dBm decoding threshold.
struct ChannelParams {
  double frequency = 5.9e9;       ///< Hz
  double tx_power = 10.0;         ///< dBm
  double antenna_gain_tx = 6.0;   ///< dBi
  double antenna_gain_rx = 6.0;   ///< dBi
  double sensitivity = -90.0;     ///< dBm
  double shadowing_sigma = 0.0;   ///< dB

  double wavelength() const { return kSpeedOfLight / frequency; }

  /// Largest total path loss (dB) that still leaves the receiver at or above
  /// its sensitivity.
  double max_path_loss() const { return tx_power + antenna_gain_tx + antenna_gain_rx - sensitivity; }

  /// Throws std::invalid_argument when the parameters are unusable.
  void validate() const;
};

struct LinkBudget {
  double distance = 0.0;          ///< antenna-to-antenna, meters
  double free_space_loss = 0.0;   ///< dB
  double obstruction_loss = 0.0;  ///< dB, >= 0
  double received_power = 0.0;    ///< dBm
  bool los = true;
  int obstacles = 0;              ///< vehicles inside the 60% ellipsoid
};

/// 20 log10(4 pi d / lambda). Throws std::domain_error for d <= 0.
double free_space_path_loss(double distance, double frequency);

/// Single knife-edge diffraction loss (ITU-R P.526 approximation), clamped at 0.
double knife_edge_loss(double nu);

/// Fresnel-Kirchhoff parameter of an edge `h` meters above the line joining
/// two points at distances da, db.
double diffraction_parameter(double h, double da, double db, double wavelength);

/// Multiple knife-edge loss combined with the Epstein-Peterson method: each
/// edge is evaluated against the line joining its neighbouring edges (or the
/// antennas) and the individual losses are summed.
double obstruction_loss(const LinkProfile& profile, double wavelength);

/// Budget for given loss terms. The single place where the terms are summed,
/// so cached and freshly computed links agree to the bit.
LinkBudget make_budget(double distance, double free_space_loss, double obstruction_loss, int obstacles,
                       const ChannelParams& params);

/// Received power at `rx` for a transmission from `tx`. A Gaussian shadowing
/// term is added only when `rng` is given and shadowing_sigma > 0.
LinkBudget received_power(const Vehicle& tx, const Vehicle& rx, std::span<const Vehicle> vehicles,
                          const ChannelParams& params, Rng* rng = nullptr);

/// Delivery probability of a single link: a hard threshold without
/// shadowing, Q((sensitivity - P_rx) / sigma) with it.
double link_pdr(const LinkBudget& budget, const ChannelParams& params);

/// End-to-end delivery probability: the product of per-hop probabilities.
double route_pdr(std::span<const LinkBudget> hops, const ChannelParams& params);

/// Power-independent loss terms of every vehicle pair that can possibly be
/// in range, computed once per snapshot and reused across a power sweep.
class PathLossCache {
public:
  struct Entry {
    std::size_t a = 0;  ///< vehicle index, a < b
    std::size_t b = 0;
    double distance = 0.0;
    double free_space_loss = 0.0;
    double obstruction_loss = 0.0;
    int obstacles = 0;
  };

  /// Keeps pairs whose free-space loss does not exceed `max_path_loss`.
  PathLossCache(std::span<const Vehicle> vehicles, double frequency, double max_path_loss);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t vehicle_count() const { return vehicle_count_; }
  double frequency() const { return frequency_; }
  double max_path_loss() const { return max_path_loss_; }

private:
  std::vector<Entry> entries_;
  std::size_t vehicle_count_ = 0;
  double frequency_ = 0.0;
  double max_path_loss_ = 0.0;
};

}  // namespace tvr
