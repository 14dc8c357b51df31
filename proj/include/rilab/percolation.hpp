#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rilab/lattice.hpp"
#include "rilab/stats.hpp"

namespace rilab {

// 0/1 occupancy on every site of a window, stored in window site order.
struct SiteConfig {
  Window window;
  std::vector<std::uint8_t> bits;

  SiteConfig() = default;
  explicit SiteConfig(const Window& w, bool fill = false)
      : window(w), bits(static_cast<std::size_t>(w.site_count()), fill ? 1 : 0) {}

  bool at(const Point& p) const { return bits[static_cast<std::size_t>(window.index_of(p))] != 0; }
  void set(const Point& p, bool v) { bits[static_cast<std::size_t>(window.index_of(p))] = v ? 1 : 0; }
  std::int64_t open_count() const;
};

// Connected components of the open sites. Labels are canonical: a cluster is
// named by 1 + the window index of its lexicographically smallest site;
// closed sites carry label 0. Faces are numbered 2*axis (low) / 2*axis+1 (high).
struct ClusterLabels {
  Window window;
  std::vector<std::int64_t> labels;
  std::unordered_map<std::int64_t, std::int64_t> sizes;
  std::unordered_map<std::int64_t, unsigned> touching_faces;

  std::int64_t cluster_count() const { return static_cast<std::int64_t>(sizes.size()); }
  std::int64_t label_at(const Point& p) const {
    return labels[static_cast<std::size_t>(window.index_of(p))];
  }
};

// Union-find labeling; star=true uses all 3^d-1 diagonal neighbors instead of
// the default 2d nearest neighbors.
ClusterLabels label_clusters(const SiteConfig& c, bool star = false);

// True iff an open cluster meets both the ball B(center, L) and the sphere
// S(center, 2L) of the config's window.
bool crossing(const SiteConfig& c, std::int64_t L);

// Number of distinct clusters touching some pair of opposite window faces.
std::int64_t spanning_count(const SiteConfig& c);

// Fraction of samples in which the origin and x lie in one open cluster.
// Both endpoints need a window margin of at least |x|_inf so connecting
// paths are not clipped by the boundary.
McEstimate connectivity(const std::vector<SiteConfig>& samples, const Point& x);

}  // namespace rilab
