#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rilab/lattice.hpp"
#include "rilab/percolation.hpp"
#include "rilab/potential.hpp"

namespace rilab {

// One killed forward trajectory of the interlacement point process.  The walk
// starts at `entry`, takes the unit steps encoded in `dirs` (code 2*axis+1
// for +e_axis, 2*axis for -e_axis), and dies on its first step outside the
// killing ball.  Continuous-time holds are attached lazily: only visits that
// land inside the observation window draw one, in path order, so `holds[k]`
// belongs to the k-th in-window visit.  `visits` caches those in-window
// positions (recomputable by replaying entry+dirs).
struct Trajectory {
  Point entry;
  double label = 0.0;               // uniform mark in [0, u]
  std::vector<std::uint8_t> dirs;   // step direction codes, in order
  std::vector<double> holds;        // Exp(1) holds of in-window visits
  std::vector<Point> visits;        // in-window visit positions, path order
};

// Trajectories of the interlacement process at level u restricted to the
// window: every trajectory enters through the window boundary (entry law
// e_K/cap(K)) and is killed on leaving B(window.center, kill_radius).
// `bias_bound` is a count-weighted upper bound on the probability that any
// killed trajectory would have returned to the window had it run forever;
// statistical checks widen their tolerances by it.
struct InterlacementSample {
  Window window;
  double u = 0.0;
  std::int64_t kill_radius = 0;
  double bias_bound = 0.0;
  std::vector<Trajectory> trajectories;
};

// Scalar observable per window site (occupation time, first-passage holds).
struct ScalarField {
  Window window;
  double u = 0.0;
  std::vector<double> values;  // indexed by Window::index_of

  double at(const Point& p) const { return values.at(window.index_of(p)); }
};

// Draws the interlacement trajectories hitting `K` at level u.  The number
// of trajectories is Poisson(u * cap(K)), entries are i.i.d. from the
// normalized equilibrium measure, paths are independent simple random walks
// killed outside B(K.center, kill_radius), and labels are i.i.d. uniform on
// [0, u] (re-drawn in the null event of a tie).  `em` must be the
// equilibrium measure of K.  Throws std::invalid_argument for u < 0 and a
// configuration error if kill_radius <= K.radius.
InterlacementSample sample_interlacement(const Window& K, double u,
                                         const EquilibriumMeasure& em,
                                         std::int64_t kill_radius,
                                         std::uint64_t seed);

// Pointwise sum of holds: total time the trajectories of `s` spend at each
// window site.  Exactly zero at unvisited sites.
ScalarField occupation_field(const InterlacementSample& s);

// Splits the window by occupation level: first component is the open set
// {L > alpha}, second its complement {L <= alpha}.
std::pair<SiteConfig, SiteConfig> threshold_sets(const ScalarField& occupation,
                                                 double alpha);

// First-passage hold: at each visited site, the holding time of the first
// visit made by the smallest-label trajectory through that site; zero at
// unvisited sites.  Sigma is a lower portion of the occupation total, so
// sigma <= L pointwise.
ScalarField sigma_field(const InterlacementSample& s);

// Superposition coupling: trajectories of `a` plus trajectories of `b` with
// labels shifted by a.u form a sample at level a.u + b.u.  Monotone in u by
// construction.  Windows and kill radii must match.
InterlacementSample superpose(const InterlacementSample& a,
                              const InterlacementSample& b);

// Certified upper bound on the probability that one trajectory, killed on
// exiting B(center, kill_radius), would have re-entered K afterwards:
// cap(K) * max g over (kill sphere) x K displacements.  Used to size kill
// radii and widen test tolerances.
double kill_bias(const Window& K, std::int64_t kill_radius,
                 const EquilibriumMeasure& em, const GreenTable& G);

// Line-oriented JSON serialization for replay and debugging: a header line
// with window/u/kill_radius/bias_bound, then one trajectory per line with
// label, entry, step directions and holds.  Visits are reconstructed on
// read, so round-trips are exact.
std::string to_jsonl(const InterlacementSample& s);
InterlacementSample from_jsonl(const std::string& text);

}  // namespace rilab
