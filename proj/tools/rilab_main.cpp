// Experiment front-end: seeded, config-driven runs over the library.
// Outputs are deterministic for a fixed (config, seed); wall time goes to
// stderr so payloads stay byte-comparable.  Exit codes: 0 pass, 1 a check
// failed, 2 configuration error.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rilab/gff.hpp"
#include "rilab/interlacements.hpp"
#include "rilab/isomorph.hpp"
#include "rilab/lattice.hpp"
#include "rilab/percolation.hpp"
#include "rilab/potential.hpp"
#include "rilab/renorm.hpp"
#include "rilab/rng.hpp"
#include "rilab/stats.hpp"

using nlohmann::json;
using namespace rilab;

namespace {

constexpr const char* kVersion = "rilab 0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.12g", v);
  return b;
}

// Declarative run description: one JSON file, commands read the keys they
// need and validate them against module preconditions.
class Cfg {
 public:
  Cfg(json j, std::string hash, std::uint64_t seed) : j_(std::move(j)), hash_(std::move(hash)), seed_(seed) {}

  const std::string& hash() const { return hash_; }
  std::uint64_t seed() const { return seed_; }

  std::int64_t geti(const char* key, std::int64_t def) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number_integer()) throw ConfigError(std::string(key) + ": expected an integer");
    return j_[key].get<std::int64_t>();
  }
  double getd(const char* key, double def) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number()) throw ConfigError(std::string(key) + ": expected a number");
    return j_[key].get<double>();
  }
  bool getb(const char* key, bool def) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_boolean()) throw ConfigError(std::string(key) + ": expected a boolean");
    return j_[key].get<bool>();
  }
  std::vector<double> list(const char* key, std::vector<double> def) const {
    if (!j_.contains(key)) return def;
    const json& v = j_[key];
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(std::string(key) + ": expected a number or array");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(std::string(key) + ": non-numeric entry");
      out.push_back(e.get<double>());
    }
    if (out.empty()) throw ConfigError(std::string(key) + ": empty grid");
    return out;
  }
  std::vector<std::int64_t> ilist(const char* key, std::vector<std::int64_t> def) const {
    std::vector<double> def_d(def.begin(), def.end());
    std::vector<std::int64_t> out;
    for (double v : list(key, def_d)) {
      if (v != std::floor(v)) throw ConfigError(std::string(key) + ": expected integers");
      out.push_back(static_cast<std::int64_t>(v));
    }
    return out;
  }
  ScaleSystem scale(int def_dim, std::int64_t def_l0, std::int64_t def_r, bool def_strict) const {
    json s = j_.contains("scale") ? j_.at("scale") : json::object();
    if (!s.is_object()) throw ConfigError("scale: expected a table");
    const Cfg sub(s, hash_, seed_);
    return ScaleSystem(static_cast<int>(sub.geti("dimension", def_dim)), sub.geti("L0", 1),
                       sub.geti("l0", def_l0), sub.geti("r", def_r),
                       sub.getb("strict", def_strict));
  }
  bool has(const char* key) const { return j_.contains(key); }

 private:
  json j_;
  std::string hash_;
  std::uint64_t seed_;
};

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot open output file " + p.string());
  return f;
}

void csv_meta(std::ofstream& f, const Cfg& cfg, const char* cmd) {
  f << "# version=" << kVersion << "\n# command=" << cmd << "\n# config_hash=" << cfg.hash()
    << "\n# master_seed=" << cfg.seed() << "\n";
}

json verdict_skeleton(const Cfg& cfg, const char* cmd) {
  json j;
  j["version"] = kVersion;
  j["command"] = cmd;
  j["config_hash"] = cfg.hash();
  j["master_seed"] = cfg.seed();
  return j;
}

void write_json(const std::string& dir, const std::string& name, const json& j) {
  auto f = open_out(dir, name);
  f << j.dump(2) << "\n";
}

// Work pool over [0, n): grid points carry independent derived seeds, and
// results are keyed by index, so execution order never shows in the output.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
  if (threads <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

std::int64_t default_kill(std::int64_t window_radius) { return window_radius + 50; }

// ---------------------------------------------------------------- commands

int cmd_green(const Cfg& cfg, const std::string& out) {
  const int d = static_cast<int>(cfg.geti("dimension", 3));
  const std::int64_t R = cfg.geti("green_radius", 5);
  const GreenTable G(d);
  auto f = open_out(out, "green.csv");
  csv_meta(f, cfg, "green");
  for (int k = 0; k < d; ++k) f << "x" << k << ",";
  f << "g\n";
  for (const Point& p : Window(Point::zero(d), R).sites()) {
    for (int k = 0; k < d; ++k) f << p.v[k] << ",";
    f << fmt(G(p)) << "\n";
  }
  return 0;
}

int cmd_cap(const Cfg& cfg, const std::string& out) {
  const int d = static_cast<int>(cfg.geti("dimension", 3));
  const GreenTable G(d);
  auto f = open_out(out, "cap.csv");
  csv_meta(f, cfg, "cap");
  f << "L,capacity\n";
  for (std::int64_t L : cfg.ilist("L", {1, 2, 3, 4, 5, 6, 7, 8}))
    f << L << "," << fmt(capacity(Window(Point::zero(d), L), G)) << "\n";
  return 0;
}

int cmd_gff_sample(const Cfg& cfg, const std::string& out) {
  const int d = static_cast<int>(cfg.geti("dimension", 3));
  const std::int64_t R = cfg.geti("window_radius", 3);
  const std::int64_t n = cfg.geti("samples", 100);
  const GreenTable G(d);
  const Window w(Point::zero(d), R);
  const CovFactorization fact = factorize(w, G, cfg.geti("max_sites", 1331));
  const Eigen::MatrixXd M = sample_matrix(fact, n, derive_seed(cfg.seed(), "gff-sample", 0));
  auto f = open_out(out, "gff_samples.csv");
  csv_meta(f, cfg, "gff-sample");
  f << "sample,";
  for (int k = 0; k < d; ++k) f << "x" << k << ",";
  f << "value\n";
  const std::vector<Point> sites = w.sites();
  for (std::int64_t j = 0; j < M.cols(); ++j)
    for (std::int64_t i = 0; i < M.rows(); ++i) {
      f << j << ",";
      for (int k = 0; k < d; ++k) f << sites[static_cast<std::size_t>(i)].v[k] << ",";
      f << fmt(M(i, j)) << "\n";
    }
  return 0;
}

int cmd_ri_sample(const Cfg& cfg, const std::string& out) {
  const int d = static_cast<int>(cfg.geti("dimension", 3));
  const std::int64_t R = cfg.geti("window_radius", 3);
  const double u = cfg.getd("u", 1.0);
  const std::int64_t kill = cfg.geti("kill_radius", default_kill(R));
  const GreenTable G(d);
  const Window w(Point::zero(d), R);
  const EquilibriumMeasure em = equilibrium(w, G);
  const InterlacementSample s =
      sample_interlacement(w, u, em, kill, derive_seed(cfg.seed(), "ri-sample", 0));
  auto f = open_out(out, "ri_sample.jsonl");
  json meta = verdict_skeleton(cfg, "ri-sample");
  f << meta.dump() << "\n" << to_jsonl(s);
  return 0;
}

struct ScanRow {
  std::string kind;  // "I", "V", "G"
  double u = std::nan(""), alpha = std::nan(""), h = std::nan("");
  std::int64_t L = 0;
  double p = 0, se = 0;
  std::int64_t n = 0;
  double bias = 0;
  std::uint64_t seed = 0;
};

int cmd_scan_phase(const Cfg& cfg, const std::string& out, int threads) {
  const int d = static_cast<int>(cfg.geti("dimension", 3));
  const std::int64_t n = cfg.geti("samples", 500);
  if (n <= 0) throw ConfigError("samples: must be positive");
  const std::vector<double> us = cfg.list("u", {0.0, 0.5, 1.0});
  const std::vector<double> alphas = cfg.list("alpha", {0.5, 1.0, 2.0});
  const std::vector<double> hs = cfg.list("h", {0.0, 0.5, 1.0});
  const std::vector<std::int64_t> Ls = cfg.ilist("L", {2});
  for (std::size_t i = 1; i < alphas.size(); ++i)
    if (alphas[i] <= alphas[i - 1]) throw ConfigError("alpha: grid must be strictly increasing");
  for (std::size_t i = 1; i < us.size(); ++i)
    if (us[i] <= us[i - 1]) throw ConfigError("u: grid must be strictly increasing");
  for (std::size_t i = 1; i < hs.size(); ++i)
    if (hs[i] <= hs[i - 1]) throw ConfigError("h: grid must be strictly increasing");

  const GreenTable G(d);
  std::vector<ScanRow> rows;
  for (std::int64_t L : Ls) {
    if (L <= 0) throw ConfigError("L: crossing scales must be positive");
    const Window w(Point::zero(d), 2 * L);
    const std::int64_t kill = cfg.geti("kill_radius", default_kill(2 * L));
    const EquilibriumMeasure em = equilibrium(w, G);

    // two-sided Gaussian level sets, one field batch per L
    const std::uint64_t gseed = derive_seed(cfg.seed(), "scan-gff", L);
    const CovFactorization fact = factorize(w, G, cfg.geti("max_sites", 10000));
    const std::vector<FieldSample> fields = sample(fact, n, gseed);
    for (double h : hs) {
      std::int64_t c = 0;
      for (const FieldSample& f : fields)
        if (crossing(two_sided_level_set(f, h), L)) ++c;
      ScanRow r;
      r.kind = "G";
      r.h = h;
      r.L = L;
      r.n = n;
      r.p = static_cast<double>(c) / static_cast<double>(n);
      r.se = std::sqrt(r.p * (1 - r.p) / static_cast<double>(n));
      r.seed = gseed;
      rows.push_back(r);
    }

    // occupation level sets I (above alpha) and V (at or below alpha)
    for (std::size_t ui = 0; ui < us.size(); ++ui) {
      const double u = us[ui];
      const std::string tag = "scan-ri-" + std::to_string(ui) + "-" + std::to_string(L);
      std::vector<std::atomic<std::int64_t>> cI(alphas.size()), cV(alphas.size());
      for (auto& a : cI) a.store(0);
      for (auto& a : cV) a.store(0);
      parallel_for(n, threads, [&](std::int64_t j) {
        const InterlacementSample s =
            sample_interlacement(w, u, em, kill, derive_seed(cfg.seed(), tag, j));
        const ScalarField occ = occupation_field(s);
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
          const auto sets = threshold_sets(occ, alphas[ai]);
          if (crossing(sets.first, L)) cI[ai].fetch_add(1);
          if (crossing(sets.second, L)) cV[ai].fetch_add(1);
        }
      });
      const double bias = u * kill_bias(w, kill, em, G);
      for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        for (const char* kind : {"I", "V"}) {
          ScanRow r;
          r.kind = kind;
          r.u = u;
          r.alpha = alphas[ai];
          r.L = L;
          r.n = n;
          const std::int64_t c = (r.kind == "I" ? cI : cV)[ai].load();
          r.p = static_cast<double>(c) / static_cast<double>(n);
          r.se = std::sqrt(r.p * (1 - r.p) / static_cast<double>(n));
          r.bias = bias;
          r.seed = derive_seed(cfg.seed(), tag, 0);
          rows.push_back(r);
        }
      }
    }
  }

  auto f = open_out(out, "scan.csv");
  csv_meta(f, cfg, "scan-phase");
  f << "kind,u,alpha,h,L,p,se,n,bias,seed\n";
  for (const ScanRow& r : rows) {
    f << r.kind << ",";
    f << (std::isnan(r.u) ? "" : fmt(r.u)) << ",";
    f << (std::isnan(r.alpha) ? "" : fmt(r.alpha)) << ",";
    f << (std::isnan(r.h) ? "" : fmt(r.h)) << ",";
    f << r.L << "," << fmt(r.p) << "," << fmt(r.se) << "," << r.n << "," << fmt(r.bias) << ","
      << r.seed << "\n";
  }

  // monotonicity audit: crossing estimates may fluctuate by noise but must
  // not increase beyond three joint standard errors along a monotone grid
  json violations = json::array();
  auto check_chain = [&](const std::vector<const ScanRow*>& chain, const char* axis) {
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
      if (chain[i + 1]->p > chain[i]->p + 3 * (chain[i]->se + chain[i + 1]->se)) {
        json v;
        v["kind"] = chain[i]->kind;
        v["axis"] = axis;
        v["L"] = chain[i]->L;
        if (!std::isnan(chain[i]->u)) v["u"] = chain[i]->u;
        if (!std::isnan(chain[i]->alpha)) v["alpha_from"] = chain[i]->alpha;
        v["p_from"] = chain[i]->p;
        v["p_to"] = chain[i + 1]->p;
        violations.push_back(v);
      }
  };
  for (std::int64_t L : Ls) {
    std::vector<const ScanRow*> gchain;
    for (const ScanRow& r : rows)
      if (r.kind == "G" && r.L == L) gchain.push_back(&r);
    check_chain(gchain, "h");
    for (double u : us) {
      std::vector<const ScanRow*> ichain;
      for (const ScanRow& r : rows)
        if (r.kind == "I" && r.L == L && r.u == u) ichain.push_back(&r);
      check_chain(ichain, "alpha");
    }
    for (double a : alphas) {
      std::vector<const ScanRow*> vchain;
      for (const ScanRow& r : rows)
        if (r.kind == "V" && r.L == L && r.alpha == a) vchain.push_back(&r);
      check_chain(vchain, "u");
    }
  }

  // finite-size proxies: grid value at which the crossing estimate first
  // drops below one half; never a critical value, only a desk-scale marker
  json pseudo;
  pseudo["alpha_star"] = json::array();
  pseudo["u_star"] = json::array();
  pseudo["h_star"] = json::array();
  auto first_below = [&](const std::vector<const ScanRow*>& chain) -> const ScanRow* {
    for (const ScanRow* r : chain)
      if (r->p < 0.5) return r;
    return nullptr;
  };
  for (std::int64_t L : Ls) {
    for (double u : us) {
      std::vector<const ScanRow*> chain;
      for (const ScanRow& r : rows)
        if (r.kind == "I" && r.L == L && r.u == u) chain.push_back(&r);
      const ScanRow* hit = first_below(chain);
      pseudo["alpha_star"].push_back(
          {{"u", u}, {"L", L}, {"alpha", hit ? json(hit->alpha) : json("inf")}});
    }
    for (double a : alphas) {
      std::vector<const ScanRow*> chain;
      for (const ScanRow& r : rows)
        if (r.kind == "V" && r.L == L && r.alpha == a) chain.push_back(&r);
      const ScanRow* hit = first_below(chain);
      pseudo["u_star"].push_back(
          {{"alpha", a}, {"L", L}, {"u", hit ? json(hit->u) : json("inf")}});
    }
    std::vector<const ScanRow*> chain;
    for (const ScanRow& r : rows)
      if (r.kind == "G" && r.L == L) chain.push_back(&r);
    const ScanRow* hit = first_below(chain);
    pseudo["h_star"].push_back({{"L", L}, {"h", hit ? json(hit->h) : json("inf")}});
  }

  json j = verdict_skeleton(cfg, "scan-phase");
  j["rows"] = static_cast<std::int64_t>(rows.size());
  j["audit"] = {{"pass", violations.empty()}, {"violations", violations}};
  j["pseudo_critical"] = pseudo;
  write_json(out, "scan.json", j);
  return violations.empty() ? 0 : 1;
}

int cmd_iso_test(const Cfg& cfg, const std::string& out) {
  const int d = static_cast<int>(cfg.geti("dimension", 3));
  const std::int64_t R = cfg.geti("window_radius", 3);
  const double u = cfg.getd("u", 1.0);
  const std::int64_t n = cfg.geti("samples", 10000);
  const std::int64_t kill = cfg.geti("kill_radius", 150);
  const GreenTable G(d);
  const Window w(Point::zero(d), R);
  const EquilibriumMeasure em = equilibrium(w, G);
  const CovFactorization fact = factorize(w, G, cfg.geti("max_sites", 1331));

  const IsoBatch lhs = sample_lhs(w, u, n, derive_seed(cfg.seed(), "iso-walks", 0),
                                  derive_seed(cfg.seed(), "iso-field", 0), em, kill, fact, G);
  const IsoBatch rhs = sample_rhs(w, u, n, derive_seed(cfg.seed(), "iso-rhs", 0), fact);

  Point diag = Point::zero(d), corner_lo = Point::zero(d), corner_hi = Point::zero(d);
  Point step = Point::zero(d);
  step.v[0] = 1;
  for (int k = 0; k < d; ++k) {
    diag.v[k] = 1;
    corner_lo.v[k] = -R;
    corner_hi.v[k] = R;
  }
  const std::vector<std::pair<Point, Point>> pairs = {
      {Point::zero(d), step}, {Point::zero(d), diag}, {corner_lo, corner_hi}};
  const IsoReport r = iso_test(lhs, rhs, {}, pairs);

  json j = verdict_skeleton(cfg, "iso-test");
  j["report"] = json::parse(iso_report_json(r));
  write_json(out, "iso.json", j);
  return r.pass ? 0 : 1;
}

int cmd_renorm_verify(const Cfg& cfg, const std::string& out) {
  const ScaleSystem sc = cfg.scale(3, 1032, 103, true);
  const std::int64_t n_max = cfg.geti("n_max", 20);
  const double c1 = cfg.getd("c1", 1.0), c2 = cfg.getd("c2", 1.0), h0 = cfg.getd("h0", 1.0);
  const RenormSequences seq =
      cfg.has("k0_override")
          ? build_sequences(sc, c1, c2, h0, n_max, cfg.getd("k0_override", 0.0))
          : build_sequences(sc, c1, c2, h0, n_max);
  const double q0 = cfg.getd("q0", std::exp(-seq.K0));
  const PropagationReport rep = propagate(q0, seq, n_max);

  json j = verdict_skeleton(cfg, "renorm-verify");
  j["sequences"] = json::parse(sequences_json(seq));
  j["propagation"] = json::parse(propagation_json(rep));
  write_json(out, "renorm.json", j);
  return rep.all_pass ? 0 : 1;
}

int cmd_geom_check(const Cfg& cfg, const std::string& out) {
  const ScaleSystem sc = cfg.scale(2, 136, 68, true);
  const std::int64_t level = cfg.geti("level", 1);
  const int n_types = static_cast<int>(cfg.geti("n_types", 1));
  const std::int64_t configs = cfg.geti("configs", 100);
  const std::vector<double> densities = cfg.list("densities", {0.01, 0.1, 0.5, 0.65, 0.75});
  if (configs <= 0) throw ConfigError("configs: must be positive");

  std::int64_t Ln = sc.L0;
  for (std::int64_t k = 0; k < level; ++k) Ln *= sc.l0;
  const std::int64_t lo_cell = -2 * Ln / sc.L0, side = 4 * Ln / sc.L0 + 1;
  Point lo = Point::zero(sc.d);
  for (int k = 0; k < sc.d; ++k) lo.v[k] = lo_cell;
  const Box region = Box::cube(lo, side);

  std::int64_t premises = 0, counterexamples = 0;
  json first_cx;
  for (std::int64_t c = 0; c < configs; ++c) {
    BadConfig bc(sc, region, n_types);
    const double p = densities[static_cast<std::size_t>(c) % densities.size()];
    Rng rng(derive_seed(cfg.seed(), "geom", c));
    for (auto& b : bc.bits) b = (rng.uniform() < p) ? 1 : 0;
    const LemmaVerdict v = geometric_lemma_check(bc, level, Point::zero(sc.d));
    if (v.premise) ++premises;
    if (!v.pass) {
      if (counterexamples == 0) first_cx = json::parse(lemma_json(v));
      ++counterexamples;
    }
  }

  json j = verdict_skeleton(cfg, "geom-check");
  j["configs"] = configs;
  j["premises"] = premises;
  j["counterexamples"] = counterexamples;
  j["pass"] = counterexamples == 0;
  if (counterexamples > 0) j["first_counterexample"] = first_cx;
  write_json(out, "geom.json", j);
  return counterexamples == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice interlacement and free-field laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  int threads = 1;
  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--config", config_path, "JSON config file");
    sc->add_option("--seed", seed_flag, "master seed (overrides the config)")
        ->each([&](const std::string&) { seed_set = true; });
    sc->add_option("--out", out_dir, "output directory");
    sc->add_option("--threads", threads, "worker threads for grid scans")
        ->check(CLI::PositiveNumber);
  };
  CLI::App* c_green = app.add_subcommand("green", "tabulate the lattice Green function");
  CLI::App* c_cap = app.add_subcommand("cap", "capacity of balls over a scale grid");
  CLI::App* c_gff = app.add_subcommand("gff-sample", "draw free-field samples to CSV");
  CLI::App* c_ri = app.add_subcommand("ri-sample", "draw one interlacement sample to JSONL");
  CLI::App* c_scan = app.add_subcommand("scan-phase", "crossing-probability scan over (u, alpha, h, L)");
  CLI::App* c_iso = app.add_subcommand("iso-test", "distributional identity check");
  CLI::App* c_renorm = app.add_subcommand("renorm-verify", "sequence construction and propagation check");
  CLI::App* c_geom = app.add_subcommand("geom-check", "randomized geometric-lemma search");
  for (CLI::App* sc : {c_green, c_cap, c_gff, c_ri, c_scan, c_iso, c_renorm, c_geom})
    add_common(sc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    json j = json::object();
    std::string raw;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config file " + config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      raw = ss.str();
      j = json::parse(raw);
      if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    }
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(raw)));
    std::uint64_t seed = 12345;
    if (j.contains("master_seed")) {
      if (!j["master_seed"].is_number_unsigned() && !j["master_seed"].is_number_integer())
        throw ConfigError("master_seed: expected an integer");
      seed = j["master_seed"].get<std::uint64_t>();
    }
    if (seed_set) seed = seed_flag;
    const Cfg cfg(j, hash, seed);

    if (c_green->parsed()) rc = cmd_green(cfg, out_dir);
    else if (c_cap->parsed()) rc = cmd_cap(cfg, out_dir);
    else if (c_gff->parsed()) rc = cmd_gff_sample(cfg, out_dir);
    else if (c_ri->parsed()) rc = cmd_ri_sample(cfg, out_dir);
    else if (c_scan->parsed()) rc = cmd_scan_phase(cfg, out_dir, threads);
    else if (c_iso->parsed()) rc = cmd_iso_test(cfg, out_dir);
    else if (c_renorm->parsed()) rc = cmd_renorm_verify(cfg, out_dir);
    else if (c_geom->parsed()) rc = cmd_geom_check(cfg, out_dir);
  } catch (const json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "wall time: %.1fs\n", secs);
  return rc;
}
