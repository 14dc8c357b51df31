#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rilab {

// Runtime dimension, bounded so points stay cheap value types.
inline constexpr int kMaxDim = 6;

struct Point {
  std::array<std::int64_t, kMaxDim> v{};  // zero-padded beyond dim
  int dim = 0;

  Point() = default;
  Point(std::initializer_list<std::int64_t> cs) {
    if (cs.size() == 0 || cs.size() > kMaxDim)
      throw std::invalid_argument("Point: dimension must be in [1, kMaxDim]");
    dim = static_cast<int>(cs.size());
    int i = 0;
    for (auto c : cs) v[i++] = c;
  }
  static Point zero(int d) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("Point: bad dimension");
    Point p;
    p.dim = d;
    return p;
  }

  std::int64_t& operator[](int i) { return v[i]; }
  std::int64_t operator[](int i) const { return v[i]; }

  friend Point operator+(const Point& a, const Point& b) {
    Point r = a;
    for (int i = 0; i < a.dim; ++i) r.v[i] += b.v[i];
    return r;
  }
  friend Point operator-(const Point& a, const Point& b) {
    Point r = a;
    for (int i = 0; i < a.dim; ++i) r.v[i] -= b.v[i];
    return r;
  }
  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim != b.dim) return false;
    for (int i = 0; i < a.dim; ++i)
      if (a.v[i] != b.v[i]) return false;
    return true;
  }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
  // lexicographic; used for canonical orderings
  friend bool operator<(const Point& a, const Point& b) {
    for (int i = 0; i < a.dim; ++i)
      if (a.v[i] != b.v[i]) return a.v[i] < b.v[i];
    return false;
  }

  std::int64_t norm_linf() const {
    std::int64_t m = 0;
    for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(v[i]));
    return m;
  }
  std::int64_t norm_l1() const {
    std::int64_t s = 0;
    for (int i = 0; i < dim; ++i) s += std::abs(v[i]);
    return s;
  }
  double norm_l2() const;
  std::string str() const;
};

struct PointHash {
  std::size_t operator()(const Point& p) const {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(p.dim);
    for (int i = 0; i < p.dim; ++i) {
      h ^= static_cast<std::uint64_t>(p.v[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what);
std::int64_t checked_pow(std::int64_t base, int exp, const char* what);
// floor division (round toward -infinity), exact for negative a
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

// closed l-infinity ball  { p : |p - center|_inf <= radius },
// sites enumerated lexicographically (first coordinate most significant).
struct Window {
  Point center;
  std::int64_t radius = 0;

  Window() = default;
  Window(Point c, std::int64_t r);

  int dim() const { return center.dim; }
  std::int64_t side() const { return 2 * radius + 1; }
  std::int64_t site_count() const;
  bool contains(const Point& p) const { return (p - center).norm_linf() <= radius; }
  std::int64_t index_of(const Point& p) const;  // throws if p outside
  Point site(std::int64_t index) const;
  std::vector<Point> sites() const;
};

// half-open axis-aligned box  { p : lo_j <= p_j < lo_j + len_j },
// same lexicographic site order as Window.
struct Box {
  Point lo;
  std::array<std::int64_t, kMaxDim> len{};

  Box() = default;
  Box(Point lo_, std::array<std::int64_t, kMaxDim> len_);
  static Box cube(Point lo_, std::int64_t side);

  int dim() const { return lo.dim; }
  std::int64_t site_count() const;
  bool contains(const Point& p) const;
  std::int64_t index_of(const Point& p) const;
  Point site(std::int64_t index) const;
  std::vector<Point> sites() const;
};

std::vector<Point> neighbors(const Point& p);                       // 2d nearest neighbors
std::vector<Point> ball_points(int d, std::int64_t r);              // |x|_inf <= r, lexicographic
std::vector<Point> sphere_points(int d, std::int64_t r);            // |x|_inf == r, lexicographic

// Geometric hierarchy L_n = l0^n * L0 with boxes B_{n,x} = x + [0, L_n)^d and
// renormalization lattices LL_n = L_n Z^d.  The strict flag enforces the
// scheme's standing assumptions r >= 10 and 2r <= l0; relaxed scales are
// allowed for small combinatorial tests.
struct ScaleSystem {
  int d = 0;
  std::int64_t L0 = 1, l0 = 2, r = 1;
  bool strict = true;

  ScaleSystem(int d_, std::int64_t L0_, std::int64_t l0_, std::int64_t r_, bool strict_ = true);

  std::int64_t length(int n) const;               // L_n, overflow-checked
  Point level_floor(const Point& x, int n) const; // anchor of the B_{n,.} box containing x
  Box level_box(int n, const Point& anchor) const; // B_{n,anchor} as a site box
};

using LatticePath = std::vector<Point>;

// consecutive points differ by +-step in exactly one coordinate
bool is_nn_path(const LatticePath& path, std::int64_t step);

// Coarse-grains a nearest-neighbor walk on Z^d to its first-exit trace on
// the level-0 renormalization lattice: record the anchor of the current
// level-0 box, skip forward to the first exit from that box, repeat.  The
// result is a nearest-neighbor path on L0 * Z^d.
LatticePath trace_path(const LatticePath& walk, const ScaleSystem& scale);

}  // namespace rilab
