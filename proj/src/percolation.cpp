#include "rilab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rilab {

std::int64_t SiteConfig::open_count() const {
  std::int64_t n = 0;
  for (std::uint8_t b : bits) n += b;
  return n;
}

namespace {

struct UnionFind {
  std::vector<std::int64_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::int64_t>(i);
  }
  std::int64_t find(std::int64_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(std::int64_t a, std::int64_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ClusterLabels label_clusters(const SiteConfig& c, bool star) {
  const Window& w = c.window;
  const int d = w.dim();
  const std::int64_t r = w.radius, side = w.side();
  const std::size_t n = c.bits.size();

  std::array<std::int64_t, kMaxDim> stride{};
  stride[d - 1] = 1;
  for (int j = d - 2; j >= 0; --j) stride[j] = stride[j + 1] * side;

  UnionFind uf(n);
  // join each open site to its already-visited open neighbors
  Point rel = Point::zero(d);  // coordinates relative to the center
  for (int j = 0; j < d; ++j) rel[j] = -r;
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (c.bits[idx]) {
      if (!star) {
        for (int j = 0; j < d; ++j)
          if (rel[j] > -r && c.bits[idx - static_cast<std::size_t>(stride[j])])
            uf.unite(static_cast<std::int64_t>(idx),
                     static_cast<std::int64_t>(idx) - stride[j]);
      } else {
        // all offsets in {-1,0,1}^d whose first nonzero coordinate is -1,
        // i.e. the lexicographically earlier half of the diagonal neighbors
        std::array<int, kMaxDim> o{};
        for (int j = 0; j < d; ++j) o[j] = -1;
        for (;;) {
          int first = 0;
          while (first < d && o[first] == 0) ++first;
          if (first < d && o[first] == -1) {
            bool inside = true;
            std::int64_t delta = 0;
            for (int j = 0; j < d; ++j) {
              const std::int64_t cj = rel[j] + o[j];
              if (cj < -r || cj > r) {
                inside = false;
                break;
              }
              delta += o[j] * stride[j];
            }
            if (inside && c.bits[idx + static_cast<std::size_t>(delta)])
              uf.unite(static_cast<std::int64_t>(idx), static_cast<std::int64_t>(idx) + delta);
          }
          int j = d - 1;
          for (; j >= 0; --j) {
            if (++o[j] <= 1) break;
            o[j] = -1;
          }
          if (j < 0) break;
        }
      }
    }
    for (int j = d - 1; j >= 0; --j) {
      if (++rel[j] <= r) break;
      rel[j] = -r;
    }
  }

  ClusterLabels out;
  out.window = w;
  out.labels.assign(n, 0);
  std::vector<std::int64_t> min_site(n, -1);
  for (std::size_t i = 0; i < n; ++i)
    if (c.bits[i]) {
      const std::int64_t root = uf.find(static_cast<std::int64_t>(i));
      if (min_site[root] < 0) min_site[root] = static_cast<std::int64_t>(i);
    }
  for (int j = 0; j < d; ++j) rel[j] = -r;
  for (std::size_t i = 0; i < n; ++i) {
    if (c.bits[i]) {
      const std::int64_t label = min_site[uf.find(static_cast<std::int64_t>(i))] + 1;
      out.labels[i] = label;
      out.sizes[label] += 1;
      for (int j = 0; j < d; ++j) {
        if (rel[j] == -r) out.touching_faces[label] |= 1u << (2 * j);
        if (rel[j] == r) out.touching_faces[label] |= 1u << (2 * j + 1);
      }
    }
    for (int j = d - 1; j >= 0; --j) {
      if (++rel[j] <= r) break;
      rel[j] = -r;
    }
  }
  return out;
}

bool crossing(const SiteConfig& c, std::int64_t L) {
  if (L < 1) throw std::invalid_argument("crossing: L must be positive");
  if (c.window.radius < 2 * L) throw std::invalid_argument("crossing: window radius below 2L");
  const ClusterLabels cl = label_clusters(c);
  std::unordered_map<std::int64_t, bool> inner;  // label -> seen in B(center, L)
  const Window& w = c.window;
  const std::int64_t r = w.radius;
  Point rel = Point::zero(w.dim());
  for (int j = 0; j < w.dim(); ++j) rel[j] = -r;
  for (std::size_t i = 0; i < cl.labels.size(); ++i) {
    if (cl.labels[i] != 0) {
      std::int64_t m = 0;
      for (int j = 0; j < w.dim(); ++j) m = std::max(m, std::abs(rel[j]));
      if (m <= L) inner[cl.labels[i]] = true;
    }
    for (int j = w.dim() - 1; j >= 0; --j) {
      if (++rel[j] <= r) break;
      rel[j] = -r;
    }
  }
  for (int j = 0; j < w.dim(); ++j) rel[j] = -r;
  for (std::size_t i = 0; i < cl.labels.size(); ++i) {
    if (cl.labels[i] != 0 && inner.count(cl.labels[i])) {
      std::int64_t m = 0;
      for (int j = 0; j < w.dim(); ++j) m = std::max(m, std::abs(rel[j]));
      if (m == 2 * L) return true;
    }
    for (int j = w.dim() - 1; j >= 0; --j) {
      if (++rel[j] <= r) break;
      rel[j] = -r;
    }
  }
  return false;
}

std::int64_t spanning_count(const SiteConfig& c) {
  const ClusterLabels cl = label_clusters(c);
  std::int64_t count = 0;
  for (const auto& [label, faces] : cl.touching_faces) {
    for (int j = 0; j < c.window.dim(); ++j)
      if ((faces >> (2 * j) & 1u) && (faces >> (2 * j + 1) & 1u)) {
        ++count;
        break;
      }
  }
  return count;
}

McEstimate connectivity(const std::vector<SiteConfig>& samples, const Point& x) {
  if (samples.empty()) throw std::invalid_argument("connectivity: no samples");
  const Window& w = samples.front().window;
  if (x.dim != w.dim()) throw std::invalid_argument("connectivity: dimension mismatch");
  const Point origin = Point::zero(w.dim());
  const std::int64_t need = x.norm_linf();
  for (const Point& endpoint : {origin, x}) {
    const std::int64_t margin = w.radius - (endpoint - w.center).norm_linf();
    if (margin < need)
      throw std::invalid_argument("connectivity: window margin below |x|, paths would be clipped");
  }
  std::int64_t hits = 0;
  for (const SiteConfig& c : samples) {
    if (!(c.window.center == w.center) || c.window.radius != w.radius)
      throw std::invalid_argument("connectivity: samples on mismatched windows");
    if (!c.at(origin) || !c.at(x)) continue;
    const ClusterLabels cl = label_clusters(c);
    if (cl.label_at(origin) == cl.label_at(x)) ++hits;
  }
  McEstimate est;
  est.n = static_cast<std::int64_t>(samples.size());
  est.value = static_cast<double>(hits) / static_cast<double>(est.n);
  est.se = std::sqrt(std::max(0.0, est.value * (1 - est.value)) / static_cast<double>(est.n));
  return est;
}

}  // namespace rilab
