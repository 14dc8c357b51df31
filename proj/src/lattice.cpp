#include "rilab/lattice.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rilab {

double Point::norm_l2() const {
  double s = 0;
  for (int i = 0; i < dim; ++i) s += static_cast<double>(v[i]) * static_cast<double>(v[i]);
  return std::sqrt(s);
}

std::string Point::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim; ++i) os << v[i] << (i + 1 < dim ? "," : "");
  os << ')';
  return os.str();
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out))
    throw std::overflow_error(std::string(what) + ": 64-bit overflow");
  return out;
}

std::int64_t checked_pow(std::int64_t base, int exp, const char* what) {
  std::int64_t out = 1;
  for (int i = 0; i < exp; ++i) out = checked_mul(out, base, what);
  return out;
}

Window::Window(Point c, std::int64_t r) : center(c), radius(r) {
  if (c.dim < 1 || c.dim > kMaxDim) throw std::invalid_argument("Window: bad dimension");
  if (r < 0) throw std::invalid_argument("Window: radius must be >= 0");
  (void)site_count();  // overflow check up front
}

std::int64_t Window::site_count() const {
  return checked_pow(side(), dim(), "Window::site_count");
}

std::int64_t Window::index_of(const Point& p) const {
  if (p.dim != dim() || !contains(p)) throw std::invalid_argument("Window::index_of: site outside window");
  std::int64_t idx = 0;
  for (int i = 0; i < dim(); ++i) idx = idx * side() + (p.v[i] - center.v[i] + radius);
  return idx;
}

Point Window::site(std::int64_t index) const {
  if (index < 0 || index >= site_count()) throw std::invalid_argument("Window::site: index out of range");
  Point p = Point::zero(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    p.v[i] = center.v[i] - radius + index % side();
    index /= side();
  }
  return p;
}

std::vector<Point> Window::sites() const {
  std::int64_t n = site_count();
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.push_back(site(i));
  return out;
}

Box::Box(Point lo_, std::array<std::int64_t, kMaxDim> len_) : lo(lo_), len(len_) {
  for (int i = 0; i < dim(); ++i)
    if (len[i] < 1) throw std::invalid_argument("Box: side lengths must be >= 1");
  (void)site_count();
}

Box Box::cube(Point lo_, std::int64_t side) {
  std::array<std::int64_t, kMaxDim> l{};
  for (int i = 0; i < lo_.dim; ++i) l[i] = side;
  return Box(lo_, l);
}

std::int64_t Box::site_count() const {
  std::int64_t n = 1;
  for (int i = 0; i < dim(); ++i) n = checked_mul(n, len[i], "Box::site_count");
  return n;
}

bool Box::contains(const Point& p) const {
  if (p.dim != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (p.v[i] < lo.v[i] || p.v[i] >= lo.v[i] + len[i]) return false;
  return true;
}

std::int64_t Box::index_of(const Point& p) const {
  if (!contains(p)) throw std::invalid_argument("Box::index_of: site outside box");
  std::int64_t idx = 0;
  for (int i = 0; i < dim(); ++i) idx = idx * len[i] + (p.v[i] - lo.v[i]);
  return idx;
}

Point Box::site(std::int64_t index) const {
  if (index < 0 || index >= site_count()) throw std::invalid_argument("Box::site: index out of range");
  Point p = Point::zero(dim());
  for (int i = dim() - 1; i >= 0; --i) {
    p.v[i] = lo.v[i] + index % len[i];
    index /= len[i];
  }
  return p;
}

std::vector<Point> Box::sites() const {
  std::int64_t n = site_count();
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.push_back(site(i));
  return out;
}

std::vector<Point> neighbors(const Point& p) {
  std::vector<Point> out;
  out.reserve(2 * static_cast<std::size_t>(p.dim));
  for (int i = 0; i < p.dim; ++i) {
    Point q = p;
    q.v[i] = p.v[i] - 1;
    out.push_back(q);
    q.v[i] = p.v[i] + 1;
    out.push_back(q);
  }
  return out;
}

std::vector<Point> ball_points(int d, std::int64_t r) {
  return Window(Point::zero(d), r).sites();
}

std::vector<Point> sphere_points(int d, std::int64_t r) {
  std::vector<Point> out;
  for (const Point& p : ball_points(d, r))
    if (p.norm_linf() == r) out.push_back(p);
  return out;
}

ScaleSystem::ScaleSystem(int d_, std::int64_t L0_, std::int64_t l0_, std::int64_t r_, bool strict_)
    : d(d_), L0(L0_), l0(l0_), r(r_), strict(strict_) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("ScaleSystem: bad dimension");
  if (L0 < 1 || l0 < 2 || r < 1) throw std::invalid_argument("ScaleSystem: need L0>=1, l0>=2, r>=1");
  if (strict && (r < 10 || 2 * r > l0))
    throw std::invalid_argument("ScaleSystem: strict mode requires r >= 10 and 2r <= l0");
}

std::int64_t ScaleSystem::length(int n) const {
  if (n < 0) throw std::invalid_argument("ScaleSystem::length: n must be >= 0");
  return checked_mul(L0, checked_pow(l0, n, "ScaleSystem::length"), "ScaleSystem::length");
}

Point ScaleSystem::level_floor(const Point& x, int n) const {
  if (x.dim != d) throw std::invalid_argument("ScaleSystem::level_floor: dimension mismatch");
  const std::int64_t Ln = length(n);
  Point out = Point::zero(d);
  for (int i = 0; i < d; ++i) out.v[i] = checked_mul(floor_div(x.v[i], Ln), Ln, "level_floor");
  return out;
}

Box ScaleSystem::level_box(int n, const Point& anchor) const {
  if (anchor.dim != d) throw std::invalid_argument("ScaleSystem::level_box: dimension mismatch");
  return Box::cube(anchor, length(n));
}

bool is_nn_path(const LatticePath& path, std::int64_t step) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Point diff = path[i] - path[i - 1];
    int moved = 0;
    for (int j = 0; j < diff.dim; ++j) {
      if (diff.v[j] == 0) continue;
      if (std::abs(diff.v[j]) != step) return false;
      ++moved;
    }
    if (moved != 1) return false;
  }
  return true;
}

LatticePath trace_path(const LatticePath& walk, const ScaleSystem& scale) {
  if (walk.empty()) throw std::invalid_argument("trace_path: empty walk");
  for (const Point& p : walk)
    if (p.dim != scale.d) throw std::invalid_argument("trace_path: dimension mismatch");
  if (!is_nn_path(walk, 1)) throw std::invalid_argument("trace_path: input is not a nearest-neighbor walk");

  LatticePath out;
  std::size_t i = 0;
  while (i < walk.size()) {
    const Point anchor = scale.level_floor(walk[i], 0);
    out.push_back(anchor);
    const Box box = scale.level_box(0, anchor);
    std::size_t j = i + 1;
    while (j < walk.size() && box.contains(walk[j])) ++j;
    if (j == walk.size()) break;  // walk ends inside the current box
    i = j;
  }
  return out;
}

}  // namespace rilab
