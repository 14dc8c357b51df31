#include "rilab/interlacements.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rilab/rng.hpp"

namespace rilab {

namespace {

// Entry distribution of one sample: positive-weight sites of the equilibrium
// measure with their cumulative weights, ready for categorical draws.
struct EntryLaw {
  std::vector<Point> sites;
  std::vector<double> cumulative;
};

EntryLaw entry_law(const Window& K, const EquilibriumMeasure& em) {
  EntryLaw law;
  double acc = 0.0;
  for (const Point& p : em.sites) {
    auto it = em.e.find(p);
    if (it == em.e.end() || it->second <= 0.0) continue;
    if (!K.contains(p))
      throw std::invalid_argument(
          "sample_interlacement: equilibrium measure has weight outside the window");
    acc += it->second;
    law.sites.push_back(p);
    law.cumulative.push_back(acc);
  }
  if (law.sites.empty() || !(acc > 0.0))
    throw std::invalid_argument("sample_interlacement: equilibrium measure carries no mass");
  return law;
}

// Walks one trajectory: draws the path until the first site outside
// B(center, kill_radius), attaching an Exp(1) hold to every in-window visit
// in path order.  The exiting step is recorded in dirs but the site outside
// the ball is not a visit.
void run_walk(Trajectory& t, const Window& window, std::int64_t kill_radius,
              Rng& rng) {
  const int d = window.dim();
  Point pos = t.entry;
  while (true) {
    if (window.contains(pos)) {
      t.visits.push_back(pos);
      t.holds.push_back(rng.exponential());
    }
    const auto code = static_cast<std::uint8_t>(rng.uniform_int(2 * d));
    t.dirs.push_back(code);
    const int axis = code >> 1;
    pos.v[axis] += (code & 1) ? 1 : -1;
    if ((pos - window.center).norm_linf() > kill_radius) return;
  }
}

}  // namespace

InterlacementSample sample_interlacement(const Window& K, double u,
                                         const EquilibriumMeasure& em,
                                         std::int64_t kill_radius,
                                         std::uint64_t seed) {
  if (!(u >= 0.0)) throw std::invalid_argument("sample_interlacement: u must be >= 0");
  if (kill_radius <= K.radius)
    throw std::invalid_argument(
        "sample_interlacement: kill_radius must exceed the window radius");
  if (!(em.cap > 0.0))
    throw std::invalid_argument("sample_interlacement: capacity must be positive");

  InterlacementSample s;
  s.window = K;
  s.u = u;
  s.kill_radius = kill_radius;

  const EntryLaw law = entry_law(K, em);

  Rng count_rng(derive_seed(seed, "count"));
  const std::int64_t n = count_rng.poisson(u * em.cap);

  s.trajectories.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, "traj", static_cast<std::uint64_t>(i)));
    Trajectory t;
    t.label = u * rng.uniform();
    t.entry = law.sites[rng.categorical(law.cumulative)];
    run_walk(t, K, kill_radius, rng);
    s.trajectories.push_back(std::move(t));
  }

  // Ties between continuous labels are a null event; re-draw deterministically
  // if one ever shows up so labels are always distinct.
  for (std::uint64_t attempt = 0; true; ++attempt) {
    std::set<double> seen;
    Trajectory* dup = nullptr;
    for (auto& t : s.trajectories)
      if (!seen.insert(t.label).second) {
        dup = &t;
        break;
      }
    if (dup == nullptr) break;
    Rng relabel(derive_seed(seed, "relabel", attempt));
    dup->label = u * relabel.uniform();
  }

  // Each killed trajectory re-enters K with probability at most
  // cap(K) * max g over (kill sphere) x K pairs; weight by the realized count.
  const double sep = static_cast<double>(kill_radius - K.radius);
  s.bias_bound = static_cast<double>(n) * em.cap * green_upper_radial(sep, K.dim());
  return s;
}

ScalarField occupation_field(const InterlacementSample& s) {
  ScalarField f;
  f.window = s.window;
  f.u = s.u;
  f.values.assign(static_cast<std::size_t>(s.window.site_count()), 0.0);
  for (const Trajectory& t : s.trajectories)
    for (std::size_t k = 0; k < t.visits.size(); ++k)
      f.values[static_cast<std::size_t>(s.window.index_of(t.visits[k]))] += t.holds[k];
  return f;
}

std::pair<SiteConfig, SiteConfig> threshold_sets(const ScalarField& occupation,
                                                 double alpha) {
  SiteConfig above(occupation.window);
  SiteConfig below(occupation.window);
  for (std::int64_t i = 0; i < occupation.window.site_count(); ++i) {
    const bool open = occupation.values[static_cast<std::size_t>(i)] > alpha;
    above.set(occupation.window.site(i), open);
    below.set(occupation.window.site(i), !open);
  }
  return {above, below};
}

ScalarField sigma_field(const InterlacementSample& s) {
  ScalarField f;
  f.window = s.window;
  f.u = s.u;
  f.values.assign(static_cast<std::size_t>(s.window.site_count()), 0.0);

  std::vector<const Trajectory*> order;
  order.reserve(s.trajectories.size());
  for (const auto& t : s.trajectories) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const Trajectory* a, const Trajectory* b) { return a->label < b->label; });

  std::vector<std::uint8_t> assigned(f.values.size(), 0);
  for (const Trajectory* t : order)
    for (std::size_t k = 0; k < t->visits.size(); ++k) {
      const auto idx = static_cast<std::size_t>(s.window.index_of(t->visits[k]));
      if (assigned[idx]) continue;
      assigned[idx] = 1;
      f.values[idx] = t->holds[k];
    }
  return f;
}

InterlacementSample superpose(const InterlacementSample& a,
                              const InterlacementSample& b) {
  if (a.window.center != b.window.center || a.window.radius != b.window.radius ||
      a.kill_radius != b.kill_radius)
    throw std::invalid_argument("superpose: samples must share window and kill radius");
  InterlacementSample s;
  s.window = a.window;
  s.u = a.u + b.u;
  s.kill_radius = a.kill_radius;
  s.bias_bound = a.bias_bound + b.bias_bound;
  s.trajectories = a.trajectories;
  for (Trajectory t : b.trajectories) {
    t.label += a.u;  // labels of the top layer live in (a.u, a.u + b.u]
    s.trajectories.push_back(std::move(t));
  }
  return s;
}

double kill_bias(const Window& K, std::int64_t kill_radius,
                 const EquilibriumMeasure& em, const GreenTable& G) {
  if (kill_radius <= K.radius)
    throw std::invalid_argument("kill_bias: kill_radius must exceed the window radius");
  // Any (kill-sphere, window) pair of sites is at euclidean distance at least
  // kill_radius - K.radius, where the certified radial bound applies.
  const double sep = static_cast<double>(kill_radius - K.radius);
  return em.cap * green_upper_radial(sep, G.dim());
}

namespace {

nlohmann::json point_json(const Point& p) {
  nlohmann::json a = nlohmann::json::array();
  for (int j = 0; j < p.dim; ++j) a.push_back(p.v[j]);
  return a;
}

Point point_from(const nlohmann::json& a) {
  if (!a.is_array() || a.empty() || a.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("from_jsonl: bad point");
  Point p = Point::zero(static_cast<int>(a.size()));
  for (std::size_t j = 0; j < a.size(); ++j) p.v[j] = a[j].get<std::int64_t>();
  return p;
}

}  // namespace

std::string to_jsonl(const InterlacementSample& s) {
  std::ostringstream out;
  nlohmann::json head;
  head["kind"] = "interlacement";
  head["center"] = point_json(s.window.center);
  head["radius"] = s.window.radius;
  head["u"] = s.u;
  head["kill_radius"] = s.kill_radius;
  head["bias_bound"] = s.bias_bound;
  out << head.dump() << '\n';
  for (const Trajectory& t : s.trajectories) {
    nlohmann::json line;
    line["label"] = t.label;
    line["entry"] = point_json(t.entry);
    line["dirs"] = t.dirs;
    line["holds"] = t.holds;
    out << line.dump() << '\n';
  }
  return out.str();
}

InterlacementSample from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("from_jsonl: empty input");
  const nlohmann::json head = nlohmann::json::parse(line);
  if (head.value("kind", "") != std::string("interlacement"))
    throw std::invalid_argument("from_jsonl: not an interlacement sample");

  InterlacementSample s;
  s.window = Window(point_from(head.at("center")), head.at("radius").get<std::int64_t>());
  s.u = head.at("u").get<double>();
  s.kill_radius = head.at("kill_radius").get<std::int64_t>();
  s.bias_bound = head.at("bias_bound").get<double>();

  const int d = s.window.dim();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    Trajectory t;
    t.label = j.at("label").get<double>();
    t.entry = point_from(j.at("entry"));
    t.dirs = j.at("dirs").get<std::vector<std::uint8_t>>();
    t.holds = j.at("holds").get<std::vector<double>>();
    // Rebuild the in-window visit list by replaying the path.
    Point pos = t.entry;
    for (std::size_t k = 0; k <= t.dirs.size(); ++k) {
      if (s.window.contains(pos)) t.visits.push_back(pos);
      if (k == t.dirs.size()) break;
      const int axis = t.dirs[k] >> 1;
      if (axis >= d) throw std::invalid_argument("from_jsonl: bad direction code");
      pos.v[axis] += (t.dirs[k] & 1) ? 1 : -1;
    }
    if (t.visits.size() != t.holds.size())
      throw std::invalid_argument("from_jsonl: holds do not match in-window visits");
    s.trajectories.push_back(std::move(t));
  }
  return s;
}

}  // namespace rilab
