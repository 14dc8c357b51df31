#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rilab/gff.hpp"
#include "rilab/interlacements.hpp"
#include "rilab/lattice.hpp"
#include "rilab/stats.hpp"

namespace rilab {

// Deterministic sequences of the renormalization scheme.  With q = 2/l0^(d-2),
//   M(n)   = c2 * sqrt(log(2^n * L0^d))
//   beta_n = sqrt(log 2) + M(n) + 2^((n+1)/2) (sqrt(n) + sqrt(K0))
//   B      = 3 / (1 - 1/e),     K0 = log(2 * l0^(2d)) + B
//   h_{n+1}= h_n + c1 * beta_n * r^(d-2) * q^(n+1)
// The increments decay geometrically once 4/l0^(d-2) < 1, so h_n has a finite
// limit h_inf, computed with a certified geometric tail below 1e-12.
struct RenormSequences {
  ScaleSystem scale;
  double c1 = 1.0, c2 = 1.0, h0 = 1.0;
  double B = 0.0, K0 = 0.0, h_inf = 0.0;
  std::vector<double> M;     // M(0..n_max)
  std::vector<double> beta;  // beta_0..beta_{n_max}
  std::vector<double> h;     // h_0..h_{n_max}
};

// Builds all sequences up to n_max.  Requires a strict-mode scale with
// l0 >= 100, h0 > 0 and c1, c2 > 0.  Throws std::invalid_argument when
// 4/l0^(d-2) >= 1 (the increment series is not summable by its geometric
// bound; in particular d = 2 always fails).  `k0_override`, when finite,
// pins K0 to a chosen value instead of the formula — a hook for studying the
// recursion away from its derived constant.
RenormSequences build_sequences(
    const ScaleSystem& scale, double c1, double c2, double h0, int n_max,
    double k0_override = std::numeric_limits<double>::quiet_NaN());

// Tree-separation constant: c3(N) = 4 (N 4^d + 1).
std::int64_t c3(std::int64_t N, int d);

// Ordered pairs of level-(n-1) anchors inside one level-n box whose real
// l-infinity distance exceeds L_n / r.  The count is the same at every level
// (both spacing and threshold scale by l0), hence takes no n.
std::int64_t separated_pair_count(const ScaleSystem& scale);

// Proper embedding of the depth-n binary tree: nodes in heap order
// (children of i at 2i+1 / 2i+2), node at depth k mapped to an anchor of
// scale n-k inside its parent's box, sibling anchors more than L_{n-k}/r
// apart.  Leaves (the last 2^depth nodes) are level-0 anchors.
struct Embedding {
  int depth = 0;
  Point root;
  std::vector<Point> nodes;

  std::vector<Point> leaves() const;
};

// Exact number of proper embeddings rooted at a fixed x: pairs^(2^n - 1).
// Throws std::length_error if the count overflows int64.  The x overload
// additionally validates x in LL_n.
std::int64_t embedding_count(int n, const ScaleSystem& scale);
std::int64_t embedding_count(int n, const Point& x, const ScaleSystem& scale);

// Visits every proper embedding rooted at x in lexicographic pair order.
// Returns the number visited; `fn` returning false stops the walk early.
// Throws std::length_error when the total count exceeds `budget`.
std::int64_t for_each_embedding(int n, const Point& x, const ScaleSystem& scale,
                                const std::function<bool(const Embedding&)>& fn,
                                std::int64_t budget = 10'000'000);

// One step of the recursion q_{n+1} = q_n^2 + 3 exp(-(beta_n - M(n))^2)
// iterated from q0, checked against the certified envelope
// q_n <= exp(-(K0 - B) 2^n) for n = 0..n_max.
struct PropagationReport {
  std::vector<double> q;      // q_0..q_{n_max}
  std::vector<double> bound;  // exp(-(K0 - B) 2^n)
  bool all_pass = false;
  int first_fail = -1;  // smallest failing n, -1 if none
};
PropagationReport propagate(double q0, const RenormSequences& seq, int n_max);

// Monte Carlo estimate of p_0(h) = P[max over the level-0 box of phi >= h],
// sampling the field from `fact`, whose sites must be exactly the box
// [0, L0)^d in lexicographic order.
McEstimate estimate_p0(double h, const ScaleSystem& scale,
                       const CovFactorization& fact, std::int64_t n_samples,
                       std::uint64_t seed);

// Monte Carlo estimate of p_1(h): for every proper embedding of the depth-1
// tree rooted at 0, the probability that both child boxes reach level h,
// together with the maximizing pair.  `fact` must cover exactly [0, L1)^d.
struct PairEstimate {
  Point x1, x2;        // child anchors
  double value = 0.0;  // P[both box maxima >= h]
  double se = 0.0;
};
struct P1Report {
  McEstimate max;                   // the largest pair estimate
  Point argmax_x1, argmax_x2;       // pair attaining it
  std::vector<PairEstimate> pairs;  // every separated ordered pair
};
P1Report estimate_p1(double h, const ScaleSystem& scale,
                     const CovFactorization& fact, std::int64_t n_samples,
                     std::uint64_t seed);

// Level-0 bad-vertex configuration over a box of cells of the
// renormalization lattice LL_0.  Cell coordinates are anchors divided by L0,
// so the cell lattice is unit-spaced; every query below speaks cell units.
struct BadConfig {
  ScaleSystem scale;
  Box cells;        // region of LL_0, in cell coordinates
  int n_types = 1;  // bad types 0..n_types-1
  std::vector<std::uint8_t> bits;  // bitmask per cell, cells.index_of order

  BadConfig(const ScaleSystem& scale_, const Box& cells_, int n_types_);

  bool bad(const Point& cell, int type) const;
  bool bad_any(const Point& cell) const { return bits[check_index(cell)] != 0; }
  void set_bad(const Point& cell, int type, bool value = true);

 private:
  std::size_t check_index(const Point& cell) const;
};

// Thresholds of the three bad-event types evaluated over each level-0 box:
//   type 0:  max phi >= h
//   type 1:  min phi <= -h
//   type 2:  min (L + phi^2/2) < (sqrt(2 alpha) + sqrt(u/2))^2 / 2
struct BadParams {
  double h = 0.0;
  double u = 0.0;
  double alpha = 0.0;
};

// Classifies every level-0 cell whose box lies inside the field window.
// The two-argument form handles types 0-1 (field only); the three-argument
// form adds the occupation-based type 2 and requires both fields to share
// the window exactly.
BadConfig classify_bad(const FieldSample& phi, const BadParams& params,
                       const ScaleSystem& scale, int n_types);
BadConfig classify_bad(const FieldSample& phi, const ScalarField& occupation,
                       const BadParams& params, const ScaleSystem& scale,
                       int n_types);

// True iff `anchor` (cell coordinates, a multiple of l0^n) is n-bad of the
// given type under the pair recursion: 0-bad is the stored bit, and x is
// (k+1)-bad when its level-(k+1) box holds two k-bad anchors more than
// l0^(k+1)/r apart.  Evaluated bottom-up; the whole box must lie inside
// bc.cells.
bool cascade_bad(const BadConfig& bc, int n, const Point& anchor, int type);

// Both sides of the geometric bad-vertex lemma around x (cell coordinates,
// multiple of l0^n): premise = a nearest-neighbor path of bad-any-type cells
// from the ball of radius l0^n to the sphere of radius 2 l0^n; conclusion =
// some anchor of LL_n in x + [-2 l0^n, 2 l0^n)^d is n-bad of some type.
// pass = premise implies conclusion; `path` carries a witness crossing and
// (witness, witness_type) the n-bad vertex when found.  Requires
// r >= c3(n_types), l0 >= 2r, and cells covering the closed box of radius
// 2 l0^n around x.
struct LemmaVerdict {
  bool premise = false;
  bool conclusion = false;
  bool pass = false;
  Point witness;
  int witness_type = -1;
  std::vector<Point> path;
};
LemmaVerdict geometric_lemma_check(const BadConfig& bc, int n, const Point& x);

// JSON report builders consumed by the command-line frontend.
std::string sequences_json(const RenormSequences& seq);
std::string propagation_json(const PropagationReport& rep);
std::string lemma_json(const LemmaVerdict& v);

}  // namespace rilab
