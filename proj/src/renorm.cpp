#include "rilab/renorm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace rilab {

namespace {

std::int64_t checked_mul_i64(std::int64_t a, std::int64_t b, const char* where) {
  const __int128 p = static_cast<__int128>(a) * b;
  if (p > std::numeric_limits<std::int64_t>::max() || p < std::numeric_limits<std::int64_t>::min())
    throw std::length_error(std::string(where) + ": int64 overflow");
  return static_cast<std::int64_t>(p);
}

std::int64_t ipow_i64(std::int64_t base, int exp, const char* where) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r = checked_mul_i64(r, base, where);
  return r;
}

double beta_term(int n, double c2, int d, std::int64_t L0, double K0) {
  const double m = c2 * std::sqrt(n * std::log(2.0) + d * std::log(static_cast<double>(L0)));
  return std::sqrt(std::log(2.0)) + m +
         std::exp2(0.5 * (n + 1)) * (std::sqrt(static_cast<double>(n)) + std::sqrt(K0));
}

}  // namespace

RenormSequences build_sequences(const ScaleSystem& scale, double c1, double c2,
                                double h0, int n_max, double k0_override) {
  if (!scale.strict || scale.l0 < 100)
    throw std::invalid_argument("build_sequences: needs a strict scale with l0 >= 100");
  if (!(h0 > 0.0) || !(c1 > 0.0) || !(c2 > 0.0))
    throw std::invalid_argument("build_sequences: c1, c2, h0 must be positive");
  if (n_max < 0) throw std::invalid_argument("build_sequences: n_max must be >= 0");

  const int d = scale.d;
  // Increment ratios are bounded by rho = 4 / l0^(d-2); the series for h_inf
  // is summable by its geometric envelope only when rho < 1.
  const double rho = 4.0 * std::pow(static_cast<double>(scale.l0), -(d - 2));
  if (rho >= 1.0)
    throw std::invalid_argument(
        "build_sequences: increment series diverges (needs 4 / l0^(d-2) < 1)");

  RenormSequences s{scale, c1, c2, h0, 0.0, 0.0, 0.0, {}, {}, {}};
  s.B = 3.0 / (1.0 - std::exp(-1.0));
  if (std::isfinite(k0_override)) {
    if (!(k0_override > 0.0))
      throw std::invalid_argument("build_sequences: K0 override must be positive");
    s.K0 = k0_override;
  } else {
    s.K0 = std::log(2.0 * std::pow(static_cast<double>(scale.l0), 2 * d)) + s.B;
  }

  const double q = 2.0 * std::pow(static_cast<double>(scale.l0), -(d - 2));
  const double rd = std::pow(static_cast<double>(scale.r), d - 2);

  s.M.resize(n_max + 1);
  s.beta.resize(n_max + 1);
  s.h.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    s.M[n] = c2 * std::sqrt(n * std::log(2.0) + d * std::log(static_cast<double>(scale.L0)));
    s.beta[n] = beta_term(n, c2, d, scale.L0, s.K0);
    if (n == 0)
      s.h[0] = h0;
    else
      s.h[n] = s.h[n - 1] + c1 * s.beta[n - 1] * rd * std::pow(q, n);
  }

  // h_inf: sum increments until the certified geometric tail drops below
  // 1e-12 (valid from n >= 1 where the term ratio is at most rho) and the
  // floating sum has reached its fixpoint, so h_n <= h_inf for every n.
  double sum = h0;
  for (int n = 0;; ++n) {
    const double term = c1 * beta_term(n, c2, d, scale.L0, s.K0) * rd * std::pow(q, n + 1);
    const double next = sum + term;
    const bool settled = (next == sum);
    sum = next;
    if (n >= 1 && settled && term * rho / (1.0 - rho) < 1e-12) break;
    if (n > 200000) throw std::runtime_error("build_sequences: tail failed to certify");
  }
  s.h_inf = sum;
  return s;
}

std::int64_t c3(std::int64_t N, int d) {
  if (N < 1) throw std::invalid_argument("c3: N must be >= 1");
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("c3: bad dimension");
  return 4 * (N * (std::int64_t{1} << (2 * d)) + 1);
}

std::int64_t separated_pair_count(const ScaleSystem& scale) {
  const std::int64_t l0 = scale.l0;
  // Anchors sit on a [0, l0)^d grid and the real separation threshold L_n/r
  // scales with the spacing, so a pair is close exactly when the grid
  // distance delta satisfies delta * r <= l0.
  const std::int64_t c = l0 / scale.r;
  const std::int64_t per_axis_close = l0 * (2 * c + 1) - c * (c + 1);
  std::int64_t total = 1, close = 1;
  for (int j = 0; j < scale.d; ++j) {
    total = checked_mul_i64(total, l0 * l0, "separated_pair_count");
    close = checked_mul_i64(close, per_axis_close, "separated_pair_count");
  }
  return total - close;
}

std::int64_t embedding_count(int n, const ScaleSystem& scale) {
  if (n < 0) throw std::invalid_argument("embedding_count: n must be >= 0");
  const std::int64_t pairs = separated_pair_count(scale);
  if (n >= 1 && pairs == 0) return 0;
  if (n > 62) throw std::length_error("embedding_count: depth out of range");
  // One pair choice per internal node: pairs^(2^n - 1).
  std::int64_t count = 1;
  const std::int64_t internal = (std::int64_t{1} << n) - 1;
  for (std::int64_t i = 0; i < internal; ++i)
    count = checked_mul_i64(count, pairs, "embedding_count");
  return count;
}

std::int64_t embedding_count(int n, const Point& x, const ScaleSystem& scale) {
  if (x.dim != scale.d) throw std::invalid_argument("embedding_count: dimension mismatch");
  const std::int64_t Ln = scale.length(n);
  for (int j = 0; j < x.dim; ++j)
    if (x.v[j] % Ln != 0)
      throw std::invalid_argument("embedding_count: root must lie on the level-n lattice");
  return embedding_count(n, scale);
}

std::vector<Point> Embedding::leaves() const {
  const std::size_t n_leaves = std::size_t{1} << depth;
  return {nodes.end() - static_cast<std::ptrdiff_t>(n_leaves), nodes.end()};
}

std::int64_t for_each_embedding(int n, const Point& x, const ScaleSystem& scale,
                                const std::function<bool(const Embedding&)>& fn,
                                std::int64_t budget) {
  const std::int64_t total = embedding_count(n, x, scale);
  if (total > budget)
    throw std::length_error("for_each_embedding: embedding count exceeds the budget");
  if (total == 0) return 0;

  const int d = scale.d;
  const std::int64_t internal = (std::int64_t{1} << n) - 1;
  Embedding e;
  e.depth = n;
  e.root = x;
  e.nodes.assign(static_cast<std::size_t>(2 * internal + 1), Point::zero(d));
  e.nodes[0] = x;

  std::int64_t visited = 0;
  bool stop = false;

  // Child anchors of node i (depth k): T(i) + L_{n-k-1} * v, v in [0,l0)^d;
  // the sibling pair must sit more than L_{n-k}/r apart in real distance.
  auto rec = [&](auto&& self, std::int64_t i) -> void {
    if (stop) return;
    if (i == internal) {
      ++visited;
      if (!fn(e)) stop = true;
      return;
    }
    const int k = std::bit_width(static_cast<std::uint64_t>(i + 1)) - 1;
    const std::int64_t Lparent = scale.length(n - k);
    const std::int64_t Lchild = scale.length(n - k - 1);
    const Point T = e.nodes[static_cast<std::size_t>(i)];

    std::vector<std::int64_t> v1(d, 0);
    while (true) {
      std::vector<std::int64_t> v2(d, 0);
      while (true) {
        std::int64_t delta = 0;
        for (int j = 0; j < d; ++j) delta = std::max(delta, std::abs(v1[j] - v2[j]));
        if (delta * Lchild * scale.r > Lparent) {
          Point a = T, b = T;
          for (int j = 0; j < d; ++j) {
            a.v[j] += Lchild * v1[j];
            b.v[j] += Lchild * v2[j];
          }
          e.nodes[static_cast<std::size_t>(2 * i + 1)] = a;
          e.nodes[static_cast<std::size_t>(2 * i + 2)] = b;
          self(self, i + 1);
          if (stop) return;
        }
        int j = d - 1;
        for (; j >= 0; --j) {
          if (++v2[j] < scale.l0) break;
          v2[j] = 0;
        }
        if (j < 0) break;
      }
      int j = d - 1;
      for (; j >= 0; --j) {
        if (++v1[j] < scale.l0) break;
        v1[j] = 0;
      }
      if (j < 0) break;
    }
  };
  rec(rec, 0);
  return visited;
}

PropagationReport propagate(double q0, const RenormSequences& seq, int n_max) {
  if (n_max < 0) throw std::invalid_argument("propagate: n_max must be >= 0");
  if (seq.K0 < seq.B) throw std::invalid_argument("propagate: requires K0 >= B");
  if (seq.beta.size() < static_cast<std::size_t>(n_max) ||
      seq.M.size() < static_cast<std::size_t>(n_max))
    throw std::invalid_argument("propagate: sequences too short for n_max");
  if (!(q0 >= 0.0)) throw std::invalid_argument("propagate: q0 must be >= 0");

  PropagationReport rep;
  rep.q.resize(n_max + 1);
  rep.bound.resize(n_max + 1);
  rep.q[0] = q0;
  for (int n = 0; n < n_max; ++n) {
    const double gap = seq.beta[n] - seq.M[n];
    rep.q[n + 1] = rep.q[n] * rep.q[n] + 3.0 * std::exp(-gap * gap);
  }
  rep.all_pass = true;
  for (int n = 0; n <= n_max; ++n) {
    rep.bound[n] = std::exp(-(seq.K0 - seq.B) * std::exp2(n));
    if (rep.q[n] > rep.bound[n] && rep.all_pass) {
      rep.all_pass = false;
      rep.first_fail = n;
    }
  }
  return rep;
}

McEstimate estimate_p0(double h, const ScaleSystem& scale,
                       const CovFactorization& fact, std::int64_t n_samples,
                       std::uint64_t seed) {
  if (n_samples <= 0) throw std::invalid_argument("estimate_p0: need n_samples > 0");
  const Box box = Box::cube(Point::zero(scale.d), scale.L0);
  if (fact.sites != box.sites())
    throw std::invalid_argument("estimate_p0: factorization sites must be the level-0 box");

  const Eigen::MatrixXd m = sample_matrix(fact, n_samples, seed);
  std::int64_t hits = 0;
  for (std::int64_t c = 0; c < n_samples; ++c)
    if (m.col(c).maxCoeff() >= h) ++hits;

  McEstimate out;
  out.n = n_samples;
  out.value = static_cast<double>(hits) / static_cast<double>(n_samples);
  out.se = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(n_samples));
  return out;
}

P1Report estimate_p1(double h, const ScaleSystem& scale,
                     const CovFactorization& fact, std::int64_t n_samples,
                     std::uint64_t seed) {
  if (n_samples <= 0) throw std::invalid_argument("estimate_p1: need n_samples > 0");
  const int d = scale.d;
  const Box big = Box::cube(Point::zero(d), scale.length(1));
  if (fact.sites != big.sites())
    throw std::invalid_argument("estimate_p1: factorization sites must be the level-1 box");

  const Eigen::MatrixXd m = sample_matrix(fact, n_samples, seed);

  // Per level-0 box indicator of {max phi >= h}, one row per anchor.
  std::unordered_map<Point, std::size_t, PointHash> anchor_id;
  std::vector<std::vector<std::uint8_t>> ind;
  std::vector<std::int64_t> cell(d, 0);
  while (true) {
    Point anchor = Point::zero(d);
    for (int j = 0; j < d; ++j) anchor.v[j] = cell[j] * scale.L0;
    std::vector<std::int64_t> rows;
    for (const Point& p : Box::cube(anchor, scale.L0).sites()) rows.push_back(big.index_of(p));
    std::vector<std::uint8_t> flag(static_cast<std::size_t>(n_samples), 0);
    for (std::int64_t c = 0; c < n_samples; ++c)
      for (std::int64_t rr : rows)
        if (m(rr, c) >= h) {
          flag[static_cast<std::size_t>(c)] = 1;
          break;
        }
    anchor_id.emplace(anchor, ind.size());
    ind.push_back(std::move(flag));
    int j = d - 1;
    for (; j >= 0; --j) {
      if (++cell[j] < scale.l0) break;
      cell[j] = 0;
    }
    if (j < 0) break;
  }

  P1Report rep;
  rep.max.n = n_samples;
  rep.argmax_x1 = Point::zero(d);
  rep.argmax_x2 = Point::zero(d);
  for_each_embedding(1, Point::zero(d), scale, [&](const Embedding& e) {
    const auto& f1 = ind[anchor_id.at(e.nodes[1])];
    const auto& f2 = ind[anchor_id.at(e.nodes[2])];
    std::int64_t both = 0;
    for (std::int64_t c = 0; c < n_samples; ++c)
      both += f1[static_cast<std::size_t>(c)] & f2[static_cast<std::size_t>(c)];
    PairEstimate pe;
    pe.x1 = e.nodes[1];
    pe.x2 = e.nodes[2];
    pe.value = static_cast<double>(both) / static_cast<double>(n_samples);
    pe.se = std::sqrt(pe.value * (1.0 - pe.value) / static_cast<double>(n_samples));
    if (pe.value > rep.max.value || rep.pairs.empty()) {
      rep.max.value = pe.value;
      rep.max.se = pe.se;
      rep.argmax_x1 = pe.x1;
      rep.argmax_x2 = pe.x2;
    }
    rep.pairs.push_back(pe);
    return true;
  });
  return rep;
}

BadConfig::BadConfig(const ScaleSystem& scale_, const Box& cells_, int n_types_)
    : scale(scale_), cells(cells_), n_types(n_types_) {
  if (n_types < 1 || n_types > 8)
    throw std::invalid_argument("BadConfig: n_types must be in [1, 8]");
  if (cells.dim() != scale.d) throw std::invalid_argument("BadConfig: dimension mismatch");
  bits.assign(static_cast<std::size_t>(cells.site_count()), 0);
}

std::size_t BadConfig::check_index(const Point& cell) const {
  return static_cast<std::size_t>(cells.index_of(cell));
}

bool BadConfig::bad(const Point& cell, int type) const {
  if (type < 0 || type >= n_types) throw std::invalid_argument("BadConfig::bad: bad type");
  return (bits[check_index(cell)] >> type) & 1;
}

void BadConfig::set_bad(const Point& cell, int type, bool value) {
  if (type < 0 || type >= n_types) throw std::invalid_argument("BadConfig::set_bad: bad type");
  const std::size_t i = check_index(cell);
  if (value)
    bits[i] |= static_cast<std::uint8_t>(1u << type);
  else
    bits[i] &= static_cast<std::uint8_t>(~(1u << type));
}

namespace {

// Cells whose level-0 box [L0 c, L0 c + L0)^d lies fully inside the window.
Box covered_cells(const Window& w, const ScaleSystem& scale) {
  const std::int64_t L0 = scale.L0;
  Point lo = Point::zero(scale.d);
  std::array<std::int64_t, kMaxDim> len{};
  for (int j = 0; j < scale.d; ++j) {
    const std::int64_t cmin = w.center.v[j] - w.radius;
    const std::int64_t cmax = w.center.v[j] + w.radius;
    const std::int64_t k_lo = (cmin + L0 - 1 >= 0) ? (cmin + L0 - 1) / L0
                                                   : -((-(cmin + L0 - 1) + L0 - 1) / L0);
    const std::int64_t k_hi = (cmax - L0 + 1 >= 0) ? (cmax - L0 + 1) / L0
                                                   : -((-(cmax - L0 + 1) + L0 - 1) / L0);
    if (k_hi < k_lo)
      throw std::invalid_argument("classify_bad: window too small for any level-0 box");
    lo.v[j] = k_lo;
    len[static_cast<std::size_t>(j)] = k_hi - k_lo + 1;
  }
  return Box(lo, len);
}

BadConfig classify_impl(const FieldSample& phi, const ScalarField* occ,
                        const BadParams& params, const ScaleSystem& scale,
                        int n_types) {
  if (n_types < 1 || n_types > 3)
    throw std::invalid_argument("classify_bad: n_types must be in [1, 3]");
  if (phi.window.dim() != scale.d)
    throw std::invalid_argument("classify_bad: field dimension does not match the scale");
  if (n_types >= 3) {
    if (occ == nullptr)
      throw std::invalid_argument("classify_bad: type 2 needs an occupation field");
    if (occ->window.center != phi.window.center || occ->window.radius != phi.window.radius)
      throw std::invalid_argument("classify_bad: fields must share the window");
  }

  BadConfig bc(scale, covered_cells(phi.window, scale), n_types);
  const double t3 = 0.5 * std::pow(std::sqrt(2.0 * params.alpha) + std::sqrt(params.u / 2.0), 2);

  for (std::int64_t ci = 0; ci < bc.cells.site_count(); ++ci) {
    const Point cell = bc.cells.site(ci);
    Point anchor = cell;
    for (int j = 0; j < scale.d; ++j) anchor.v[j] *= scale.L0;
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    double mn3 = std::numeric_limits<double>::infinity();
    for (const Point& p : Box::cube(anchor, scale.L0).sites()) {
      const double v = phi.at(p);
      mx = std::max(mx, v);
      mn = std::min(mn, v);
      if (n_types >= 3) mn3 = std::min(mn3, occ->at(p) + 0.5 * v * v);
    }
    if (mx >= params.h) bc.set_bad(cell, 0);
    if (n_types >= 2 && mn <= -params.h) bc.set_bad(cell, 1);
    if (n_types >= 3 && mn3 < t3) bc.set_bad(cell, 2);
  }
  return bc;
}

}  // namespace

BadConfig classify_bad(const FieldSample& phi, const BadParams& params,
                       const ScaleSystem& scale, int n_types) {
  if (n_types > 2)
    throw std::invalid_argument("classify_bad: type 2 needs an occupation field");
  return classify_impl(phi, nullptr, params, scale, n_types);
}

BadConfig classify_bad(const FieldSample& phi, const ScalarField& occupation,
                       const BadParams& params, const ScaleSystem& scale,
                       int n_types) {
  return classify_impl(phi, &occupation, params, scale, n_types);
}

bool cascade_bad(const BadConfig& bc, int n, const Point& anchor, int type) {
  if (type < 0 || type >= bc.n_types) throw std::invalid_argument("cascade_bad: bad type");
  if (n < 0) throw std::invalid_argument("cascade_bad: n must be >= 0");
  if (anchor.dim != bc.scale.d) throw std::invalid_argument("cascade_bad: dimension mismatch");
  const int d = bc.scale.d;
  const std::int64_t l0 = bc.scale.l0;
  const std::int64_t side = ipow_i64(l0, n, "cascade_bad");
  Point hi = anchor;
  for (int j = 0; j < d; ++j) {
    if (anchor.v[j] % side != 0)
      throw std::invalid_argument("cascade_bad: anchor must lie on the level-n lattice");
    hi.v[j] += side - 1;
  }
  if (!bc.cells.contains(anchor) || !bc.cells.contains(hi))
    throw std::invalid_argument("cascade_bad: region does not cover the level-n box");
  if (n == 0) return bc.bad(anchor, type);

  // Bottom-up over sub-anchor grids; level-k grid has side/l0^k cells/axis.
  std::int64_t m = side;  // extent of the current grid per axis, in its units
  std::vector<std::uint8_t> cur(static_cast<std::size_t>(ipow_i64(m, d, "cascade_bad")));
  {
    std::vector<std::int64_t> c(d, 0);
    std::size_t idx = 0;
    while (true) {
      Point cell = anchor;
      for (int j = 0; j < d; ++j) cell.v[j] += c[j];
      cur[idx++] = bc.bad(cell, type) ? 1 : 0;
      int j = d - 1;
      for (; j >= 0; --j) {
        if (++c[j] < m) break;
        c[j] = 0;
      }
      if (j < 0) break;
    }
  }

  for (int k = 1; k <= n; ++k) {
    const std::int64_t mk = m / l0;  // this level's extent per axis
    std::vector<std::uint8_t> nxt(static_cast<std::size_t>(ipow_i64(mk, d, "cascade_bad")));
    std::vector<std::int64_t> a(d, 0);
    std::size_t out = 0;
    while (true) {
      // Scan the l0^d children; a separated pair of bad ones exists iff the
      // per-axis spread of the bad set beats the threshold (the l-infinity
      // diameter of a finite set is its largest coordinate spread).
      std::array<std::int64_t, kMaxDim> lo{}, hi2{};
      bool any = false, two = false;
      std::vector<std::int64_t> c(d, 0);
      while (true) {
        std::size_t idx = 0;
        for (int j = 0; j < d; ++j)
          idx = idx * static_cast<std::size_t>(m) + static_cast<std::size_t>(a[j] * l0 + c[j]);
        if (cur[idx]) {
          if (!any) {
            for (int j = 0; j < d; ++j) lo[static_cast<std::size_t>(j)] = hi2[static_cast<std::size_t>(j)] = c[j];
            any = true;
          } else {
            two = true;
            for (int j = 0; j < d; ++j) {
              lo[static_cast<std::size_t>(j)] = std::min(lo[static_cast<std::size_t>(j)], c[j]);
              hi2[static_cast<std::size_t>(j)] = std::max(hi2[static_cast<std::size_t>(j)], c[j]);
            }
          }
        }
        int j = d - 1;
        for (; j >= 0; --j) {
          if (++c[j] < l0) break;
          c[j] = 0;
        }
        if (j < 0) break;
      }
      bool found = false;
      if (any && two) {
        std::int64_t spread = 0;
        for (int j = 0; j < d; ++j)
          spread = std::max(spread, hi2[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)]);
        // children are spaced l0^(k-1) cells: spread * l0^(k-1) * r > l0^k
        found = spread * bc.scale.r > l0;
      }
      nxt[out++] = found ? 1 : 0;
      int j = d - 1;
      for (; j >= 0; --j) {
        if (++a[j] < mk) break;
        a[j] = 0;
      }
      if (j < 0) break;
    }
    cur = std::move(nxt);
    m = mk;
  }
  return cur[0] != 0;
}

LemmaVerdict geometric_lemma_check(const BadConfig& bc, int n, const Point& x) {
  const ScaleSystem& sc = bc.scale;
  const int d = sc.d;
  if (x.dim != d) throw std::invalid_argument("geometric_lemma_check: dimension mismatch");
  if (sc.r < c3(bc.n_types, d) || sc.l0 < 2 * sc.r)
    throw std::invalid_argument(
        "geometric_lemma_check: needs r >= c3(n_types) and l0 >= 2r");
  const std::int64_t Ln = ipow_i64(sc.l0, n, "geometric_lemma_check");
  Point lo = x, hi = x;
  for (int j = 0; j < d; ++j) {
    if (x.v[j] % Ln != 0)
      throw std::invalid_argument("geometric_lemma_check: x must lie on the level-n lattice");
    lo.v[j] -= 2 * Ln;
    hi.v[j] += 2 * Ln;
  }
  if (!bc.cells.contains(lo) || !bc.cells.contains(hi))
    throw std::invalid_argument(
        "geometric_lemma_check: region does not cover the closed 2 L_n box");

  LemmaVerdict v;

  // Premise: breadth-first search through bad-any cells inside the closed
  // ball of radius 2 L_n, seeded on the inner ball, reaching the sphere.
  std::array<std::int64_t, kMaxDim> len{};
  for (int j = 0; j < d; ++j) len[static_cast<std::size_t>(j)] = 4 * Ln + 1;
  const Box search(lo, len);
  std::vector<std::int64_t> parent(static_cast<std::size_t>(search.site_count()), -2);
  std::deque<std::int64_t> queue;
  for (std::int64_t i = 0; i < search.site_count(); ++i) {
    const Point c = search.site(i);
    if ((c - x).norm_linf() <= Ln && bc.bad_any(c)) {
      parent[static_cast<std::size_t>(i)] = -1;  // source
      queue.push_back(i);
    }
  }
  std::int64_t goal = -1;
  while (!queue.empty() && goal < 0) {
    const std::int64_t i = queue.front();
    queue.pop_front();
    const Point c = search.site(i);
    if ((c - x).norm_linf() == 2 * Ln) {
      goal = i;
      break;
    }
    for (int j = 0; j < d; ++j)
      for (int s = -1; s <= 1; s += 2) {
        Point nb = c;
        nb.v[j] += s;
        if (!search.contains(nb) || (nb - x).norm_linf() > 2 * Ln) continue;
        const std::int64_t k = search.index_of(nb);
        if (parent[static_cast<std::size_t>(k)] != -2 || !bc.bad_any(nb)) continue;
        parent[static_cast<std::size_t>(k)] = i;
        queue.push_back(k);
      }
  }
  if (goal >= 0) {
    v.premise = true;
    for (std::int64_t i = goal; i >= 0; i = parent[static_cast<std::size_t>(i)])
      v.path.push_back(search.site(i));
    std::reverse(v.path.begin(), v.path.end());
  }

  // Conclusion: some anchor of the level-n lattice in x + [-2 L_n, 2 L_n)^d
  // is n-bad of some type.
  std::vector<std::int64_t> k(d, 0);
  while (v.witness_type < 0) {
    Point anchor = x;
    for (int j = 0; j < d; ++j) anchor.v[j] += (k[static_cast<std::size_t>(j)] - 2) * Ln;
    for (int t = 0; t < bc.n_types && v.witness_type < 0; ++t)
      if (cascade_bad(bc, n, anchor, t)) {
        v.conclusion = true;
        v.witness = anchor;
        v.witness_type = t;
      }
    int j = d - 1;
    for (; j >= 0; --j) {
      if (++k[static_cast<std::size_t>(j)] < 4) break;
      k[static_cast<std::size_t>(j)] = 0;
    }
    if (j < 0) break;
  }

  v.pass = !v.premise || v.conclusion;
  return v;
}

namespace {

nlohmann::json point_json(const Point& p) {
  nlohmann::json a = nlohmann::json::array();
  for (int j = 0; j < p.dim; ++j) a.push_back(p.v[j]);
  return a;
}

}  // namespace

std::string sequences_json(const RenormSequences& seq) {
  nlohmann::json j;
  j["scale"] = {{"d", seq.scale.d},
                {"L0", seq.scale.L0},
                {"l0", seq.scale.l0},
                {"r", seq.scale.r}};
  j["c1"] = seq.c1;
  j["c2"] = seq.c2;
  j["h0"] = seq.h0;
  j["B"] = seq.B;
  j["K0"] = seq.K0;
  j["h_inf"] = seq.h_inf;
  j["M"] = seq.M;
  j["beta"] = seq.beta;
  j["h"] = seq.h;
  return j.dump(2);
}

std::string propagation_json(const PropagationReport& rep) {
  nlohmann::json j;
  j["all_pass"] = rep.all_pass;
  j["first_fail"] = rep.first_fail;
  nlohmann::json levels = nlohmann::json::array();
  for (std::size_t n = 0; n < rep.q.size(); ++n)
    levels.push_back({{"n", n},
                      {"q", rep.q[n]},
                      {"bound", rep.bound[n]},
                      {"pass", rep.q[n] <= rep.bound[n]}});
  j["levels"] = levels;
  return j.dump(2);
}

std::string lemma_json(const LemmaVerdict& v) {
  nlohmann::json j;
  j["premise"] = v.premise;
  j["conclusion"] = v.conclusion;
  j["pass"] = v.pass;
  if (v.witness_type >= 0) {
    j["witness"] = point_json(v.witness);
    j["witness_type"] = v.witness_type;
  } else {
    j["witness"] = nullptr;
    j["witness_type"] = nullptr;
  }
  nlohmann::json path = nlohmann::json::array();
  for (const Point& p : v.path) path.push_back(point_json(p));
  j["path"] = path;
  return j.dump(2);
}

}  // namespace rilab
