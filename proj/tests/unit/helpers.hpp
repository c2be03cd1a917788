#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "tvr/geometry.hpp"
#include "tvr/routing.hpp"

namespace tvr::test {

inline Vehicle car(VehicleId id, double x, double y = 1.75, double height = 1.5)
{
  Vehicle v;
  v.id = id;
  v.center = {x, y};
  v.lane = static_cast<int>(y / 3.5);
  v.height = height;
  v.cls = height > 2.0 ? VehicleClass::Tall : VehicleClass::Short;
  if (v.cls == VehicleClass::Tall) {
    v.length = 6.3;
    v.width = 2.0;
  }
  return v;
}

inline Vehicle truck(VehicleId id, double x, double y = 1.75, double height = 3.35)
{
  return car(id, x, y, height);
}

struct Spot {
  VehicleId id;
  double x;
  double y;
  VehicleClass cls = VehicleClass::Short;
};

/// Unit-disk table: two spots are neighbors when their centers are at most
/// `range` apart. Link budgets are left at their defaults.
inline NeighborTable disk_table(const std::vector<Spot>& spots, double range)
{
  std::vector<NeighborTable::Node> nodes;
  for (const auto& s : spots) {
    nodes.push_back({s.id, {s.x, s.y}, s.cls});
  }
  std::vector<std::vector<Neighbor>> adj(spots.size());
  for (std::size_t i = 0; i < spots.size(); ++i) {
    for (std::size_t j = 0; j < spots.size(); ++j) {
      const double d = distance(nodes[i].center, nodes[j].center);
      if (i != j && d <= range) {
        Neighbor n;
        n.index = j;
        n.id = spots[j].id;
        n.distance = d;
        n.cls = spots[j].cls;
        adj[i].push_back(n);
      }
    }
  }
  return NeighborTable(std::move(nodes), std::move(adj));
}

class TempDir {
public:
  explicit TempDir(const std::string& tag)
  {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tvr_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tvr::test
