#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rilab/interlacements.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path& work_root() {
  static fs::path p = [] {
    fs::path root = fs::temp_directory_path() / "rilab_cli_tests";
    fs::remove_all(root);
    fs::create_directories(root);
    return root;
  }();
  return p;
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = work_root() / name;
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RILAB_CLI_BIN) + " " + args + " 2>" +
                          (work_root() / "stderr.log").string();
  const int st = std::system(cmd.c_str());
  REQUIRE(st != -1);
  return WEXITSTATUS(st);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

// data rows of a CSV with '#' metadata lines and one header row
std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream f(p);
  REQUIRE(f.good());
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("green table lands on the quadrature value at the origin") {
  const fs::path out = fresh_dir("green");
  CHECK(run_cli("green --out " + out.string()) == 0);
  const std::string csv = slurp(out / "green.csv");
  CHECK(csv.find("# version=") != std::string::npos);
  CHECK(csv.find("# config_hash=") != std::string::npos);
  bool found = false;
  for (const auto& r : csv_rows(out / "green.csv")) {
    REQUIRE(r.size() == 4);
    if (r[0] == "0" && r[1] == "0" && r[2] == "0") {
      found = true;
      const double g0 = std::stod(r[3]);
      CHECK(g0 > 1.5162);
      CHECK(g0 < 1.5166);
    }
  }
  CHECK(found);
  // 11^3 sites for the default radius-5 table
  CHECK(csv_rows(out / "green.csv").size() == 1331);
}

TEST_CASE("capacity grid is strictly monotone in the radius") {
  const fs::path out = fresh_dir("cap");
  spit(out / "cfg.json", R"({"dimension":3,"L":[1,2,3,4,5,6,7,8]})");
  CHECK(run_cli("cap --config " + (out / "cfg.json").string() + " --out " + out.string()) == 0);
  const auto rows = csv_rows(out / "cap.csv");
  REQUIRE(rows.size() == 8);
  double prev = 0;
  for (const auto& r : rows) {
    const double c = std::stod(r[1]);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("configuration errors exit with code 2") {
  const fs::path out = fresh_dir("errs");
  spit(out / "bad.json", "{not json");
  CHECK(run_cli("green --config " + (out / "bad.json").string() + " --out " + out.string()) == 2);

  // no Green function below three dimensions
  spit(out / "d2.json", R"({"dimension":2})");
  CHECK(run_cli("green --config " + (out / "d2.json").string() + " --out " + out.string()) == 2);

  spit(out / "neg.json", R"({"samples":-5})");
  CHECK(run_cli("scan-phase --config " + (out / "neg.json").string() + " --out " + out.string()) == 2);

  // geometric hypotheses violated: r below the tree-separation constant
  spit(out / "geom.json",
       R"({"scale":{"dimension":2,"L0":1,"l0":136,"r":50,"strict":false},"configs":1})");
  CHECK(run_cli("geom-check --config " + (out / "geom.json").string() + " --out " + out.string()) == 2);

  CHECK(run_cli("no-such-command") == 2);
}

TEST_CASE("scan: zero level is exact and outputs reproduce byte for byte") {
  const fs::path out = fresh_dir("scan");
  spit(out / "cfg.json",
       R"({"dimension":3,"samples":120,"kill_radius":40,"u":[0,1.0],"alpha":[0.5,1.5],"h":[0.3],"L":[2],"master_seed":7})");
  const std::string cfg = (out / "cfg.json").string();
  CHECK(run_cli("scan-phase --config " + cfg + " --out " + (out / "a").string()) == 0);
  CHECK(run_cli("scan-phase --config " + cfg + " --out " + (out / "b").string()) == 0);
  CHECK(slurp(out / "a" / "scan.csv") == slurp(out / "b" / "scan.csv"));
  CHECK(slurp(out / "a" / "scan.json") == slurp(out / "b" / "scan.json"));

  // the worker count must not leak into the payload
  CHECK(run_cli("scan-phase --config " + cfg + " --threads 3 --out " + (out / "t").string()) == 0);
  CHECK(slurp(out / "a" / "scan.csv") == slurp(out / "t" / "scan.csv"));

  // a different master seed must actually change the estimates
  CHECK(run_cli("scan-phase --config " + cfg + " --seed 99 --out " + (out / "s").string()) == 0);
  CHECK(slurp(out / "a" / "scan.csv") != slurp(out / "s" / "scan.csv"));

  for (const auto& r : csv_rows(out / "a" / "scan.csv")) {
    // kind,u,alpha,h,L,p,se,n,bias,seed
    if (r[0] == "I" && r[1] == "0") CHECK(r[5] == "0");
    if (r[0] == "V" && r[1] == "0") CHECK(r[5] == "1");
  }
  const json j = json::parse(slurp(out / "a" / "scan.json"));
  CHECK(j["audit"]["pass"] == true);
  CHECK(j["pseudo_critical"]["alpha_star"].size() == 2);
  CHECK(j["pseudo_critical"]["alpha_star"][0]["alpha"] == 0.5);
}

TEST_CASE("interlacement dump carries provenance and replays exactly") {
  const fs::path out = fresh_dir("ri");
  spit(out / "cfg.json",
       R"({"dimension":3,"window_radius":2,"u":1.0,"kill_radius":30,"master_seed":5})");
  CHECK(run_cli("ri-sample --config " + (out / "cfg.json").string() + " --out " + out.string()) == 0);
  const std::string text = slurp(out / "ri_sample.jsonl");
  const std::size_t nl = text.find('\n');
  REQUIRE(nl != std::string::npos);
  const json meta = json::parse(text.substr(0, nl));
  CHECK(meta["command"] == "ri-sample");
  CHECK(meta["master_seed"] == 5);
  const std::string payload = text.substr(nl + 1);
  const rilab::InterlacementSample s = rilab::from_jsonl(payload);
  CHECK(rilab::to_jsonl(s) == payload);
  CHECK(s.u == 1.0);
}

TEST_CASE("field dump has one row per site per sample") {
  const fs::path out = fresh_dir("gff");
  spit(out / "cfg.json", R"({"dimension":3,"window_radius":2,"samples":5,"master_seed":5})");
  const std::string cfg = (out / "cfg.json").string();
  CHECK(run_cli("gff-sample --config " + cfg + " --out " + (out / "a").string()) == 0);
  CHECK(csv_rows(out / "a" / "gff_samples.csv").size() == 5 * 125);
  CHECK(run_cli("gff-sample --config " + cfg + " --out " + (out / "b").string()) == 0);
  CHECK(slurp(out / "a" / "gff_samples.csv") == slurp(out / "b" / "gff_samples.csv"));
}

TEST_CASE("identity check accepts the matched configuration") {
  const fs::path out = fresh_dir("iso");
  spit(out / "cfg.json",
       R"({"dimension":3,"window_radius":2,"u":1.0,"samples":1500,"kill_radius":60,"master_seed":11})");
  CHECK(run_cli("iso-test --config " + (out / "cfg.json").string() + " --out " + out.string()) == 0);
  const json j = json::parse(slurp(out / "iso.json"));
  CHECK(j["report"]["pass"] == true);
  CHECK(j["report"]["sites"].size() == 125);
  CHECK(j["report"]["site_pass_rate"].get<double>() >= 0.95);
  CHECK(j["config_hash"].is_string());
}

TEST_CASE("sequence verification passes by default and flags a bad start") {
  const fs::path out = fresh_dir("renorm");
  CHECK(run_cli("renorm-verify --out " + (out / "a").string()) == 0);
  const json j = json::parse(slurp(out / "a" / "renorm.json"));
  CHECK(j["propagation"]["all_pass"] == true);
  CHECK(j["sequences"]["B"].get<double>() == doctest::Approx(4.745903).epsilon(1e-4));

  // a starting density of one can never contract
  spit(out / "q1.json", R"({"q0":1.0})");
  CHECK(run_cli("renorm-verify --config " + (out / "q1.json").string() + " --out " +
                (out / "b").string()) == 1);
  const json jb = json::parse(slurp(out / "b" / "renorm.json"));
  CHECK(jb["propagation"]["all_pass"] == false);
}

TEST_CASE("randomized lemma search remains counterexample-free") {
  const fs::path out = fresh_dir("geom");
  spit(out / "cfg.json",
       R"({"scale":{"dimension":2,"L0":1,"l0":136,"r":68,"strict":true},"level":1,"configs":24,"densities":[0.1,0.65],"master_seed":3})");
  CHECK(run_cli("geom-check --config " + (out / "cfg.json").string() + " --out " + out.string()) == 0);
  const json j = json::parse(slurp(out / "geom.json"));
  CHECK(j["pass"] == true);
  CHECK(j["counterexamples"] == 0);
  CHECK(j["configs"] == 24);
  CHECK(j["premises"].get<int>() > 0);
}
