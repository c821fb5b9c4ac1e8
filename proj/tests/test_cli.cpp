#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "anderson/cli.hpp"

using namespace anderson;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("anderson_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

fs::path write_json(const fs::path& dir, const char* name, const json& j) {
  fs::path p = dir / name;
  std::ofstream out(p);
  out << j.dump(2);
  return p;
}

json tiny_induct_config() {
  return json{{"schema_version", "anderson-lab-1"},
              {"dimension", 1},
              {"generator", {{"kind", "iid-uniform"}}},
              {"g_grid", {100.0}},
              {"params",
               {{"L0", 5}, {"m", 0.4}, {"p", 17.0}, {"b", 0.002}}},
              {"scales", 1},
              {"samples", 12},
              {"seed", 31415},
              {"induct", {{"lemma_suite", false}}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("malformed configs exit with code 2 and write nothing") {
  TempDir tmp;
  fs::path out = tmp.path / "out";
  SUBCASE("not json") {
    fs::path cfg = tmp.path / "bad.json";
    std::ofstream(cfg) << "not json at all {";
    CHECK(run_cli({"induct", "--config", cfg.string(), "--out", out.string()}) == 2);
    CHECK_FALSE(fs::exists(out / "induct_records.jsonl"));
  }
  SUBCASE("missing seed") {
    json j = tiny_induct_config();
    j.erase("seed");
    fs::path cfg = write_json(tmp.path, "noseed.json", j);
    CHECK(run_cli({"induct", "--config", cfg.string(), "--out", out.string()}) == 2);
  }
  SUBCASE("schema version mismatch") {
    json j = tiny_induct_config();
    j["schema_version"] = "other-9";
    fs::path cfg = write_json(tmp.path, "schema.json", j);
    CHECK(run_cli({"induct", "--config", cfg.string(), "--out", out.string()}) == 2);
  }
  SUBCASE("invalid induction parameters") {
    json j = tiny_induct_config();
    j["params"]["p"] = 1.0;
    fs::path cfg = write_json(tmp.path, "badp.json", j);
    CHECK(run_cli({"induct", "--config", cfg.string(), "--out", out.string()}) == 2);
  }
  SUBCASE("unknown subcommand") {
    CHECK(run_cli({"frobnicate"}) == 2);
  }
}

TEST_CASE("induct writes artifacts and exits clean") {
  TempDir tmp;
  fs::path cfg = write_json(tmp.path, "cfg.json", tiny_induct_config());
  fs::path out = tmp.path / "out";
  int rc = run_cli({"induct", "--config", cfg.string(), "--out", out.string()});
  CHECK(rc == 0);
  CHECK(fs::exists(out / "induct_records.jsonl"));
  CHECK(fs::exists(out / "induct_summary.csv"));
  CHECK(fs::exists(out / "induct_report.txt"));

  // every record carries the stable fields
  std::ifstream in(out / "induct_records.jsonl");
  std::string line;
  long lines = 0;
  while (std::getline(in, line)) {
    json r = json::parse(line);
    for (const char* key : {"schema", "seed", "sample", "verdict", "witness"})
      CHECK(r.contains(key));
    CHECK(r["schema"] == "anderson-lab-1");
    ++lines;
  }
  CHECK(lines > 0);
}

TEST_CASE("worker count never changes the artifacts") {
  TempDir tmp;
  fs::path cfg = write_json(tmp.path, "cfg.json", tiny_induct_config());
  fs::path out1 = tmp.path / "w1";
  fs::path out2 = tmp.path / "w4";
  CHECK(run_cli({"induct", "--config", cfg.string(), "--out", out1.string(), "--workers",
                 "1"}) == 0);
  CHECK(run_cli({"induct", "--config", cfg.string(), "--out", out2.string(), "--workers",
                 "4"}) == 0);
  CHECK(slurp(out1 / "induct_records.jsonl") == slurp(out2 / "induct_records.jsonl"));
  CHECK(slurp(out1 / "induct_summary.csv") == slurp(out2 / "induct_summary.csv"));
}

TEST_CASE("exceeding the eigensolve budget exits 3 with flagged artifacts") {
  TempDir tmp;
  json j = tiny_induct_config();
  j["scales"] = 2;
  j["induct"]["max_eig_cost"] = 1e5;
  fs::path cfg = write_json(tmp.path, "budget.json", j);
  fs::path out = tmp.path / "out";
  CHECK(run_cli({"induct", "--config", cfg.string(), "--out", out.string()}) == 3);
  CHECK(fs::exists(out / "induct_records.jsonl"));
  std::string rep = slurp(out / "induct_report.txt");
  CHECK(rep.find("PARTIAL") != std::string::npos);
}

TEST_CASE("report pools estimates and refuses bad inputs") {
  TempDir tmp;
  SUBCASE("pooled hits tighten the interval") {
    fs::path dir = tmp.path / "results";
    fs::create_directories(dir);
    {
      std::ofstream a(dir / "a.jsonl");
      a << json{{"schema", "anderson-lab-1"}, {"kind", "estimate"}, {"event", "ev"},
                {"trials", 200},              {"hits", 20},         {"p_hat", 0.1},
                {"ci_low", 0.0},              {"ci_high", 1.0},     {"seed", 1}}
               .dump()
        << "\n";
      std::ofstream b(dir / "b.jsonl");
      b << json{{"schema", "anderson-lab-1"}, {"kind", "estimate"}, {"event", "ev"},
                {"trials", 200},              {"hits", 24},         {"p_hat", 0.12},
                {"ci_low", 0.0},              {"ci_high", 1.0},     {"seed", 2}}
               .dump()
        << "\n";
    }
    CHECK(run_cli({"report", "--results", (dir).string()}) == 0);
    std::string agg = slurp(dir / "aggregate_summary.csv");
    CHECK(agg.find("ev,400,44") != std::string::npos);
  }
  SUBCASE("empty directory is an error") {
    fs::path dir = tmp.path / "empty";
    fs::create_directories(dir);
    CHECK(run_cli({"report", "--results", dir.string()}) == 2);
  }
  SUBCASE("mixed schema versions are refused") {
    fs::path dir = tmp.path / "mixed";
    fs::create_directories(dir);
    std::ofstream a(dir / "a.jsonl");
    a << json{{"schema", "other-7"}, {"kind", "estimate"}, {"event", "x"},
              {"trials", 1},         {"hits", 0},          {"p_hat", 0.0},
              {"ci_low", 0.0},       {"ci_high", 1.0},     {"seed", 1}}
             .dump()
      << "\n";
    a.close();
    CHECK(run_cli({"report", "--results", dir.string()}) == 2);
  }
}

TEST_CASE("worker-count environment override is honored") {
  TempDir tmp;
  fs::path cfg = write_json(tmp.path, "cfg.json", tiny_induct_config());
  fs::path out_env = tmp.path / "env";
  fs::path out_flag = tmp.path / "flag";
  ::setenv("ANDERSON_WORKERS", "3", 1);
  int rc_env = run_cli({"induct", "--config", cfg.string(), "--out", out_env.string()});
  ::unsetenv("ANDERSON_WORKERS");
  int rc_flag = run_cli({"induct", "--config", cfg.string(), "--out", out_flag.string(),
                         "--workers", "1"});
  CHECK(rc_env == 0);
  CHECK(rc_flag == 0);
  CHECK(slurp(out_env / "induct_records.jsonl") == slurp(out_flag / "induct_records.jsonl"));
}

TEST_CASE("classify and edge subcommands write schema-versioned records") {
  TempDir tmp;
  json j{{"schema_version", "anderson-lab-1"},
         {"dimension", 1},
         {"params", {{"m", 0.5}}},
         {"samples", 8},
         {"seed", 55},
         {"classify", {{"L", 8}, {"ell", 4}, {"g", 100.0}, {"energies", {50.0}}}},
         {"edge", {{"L", 8}, {"eta", 0.1}, {"L0", 5}, {"g", 1.0}}}};
  fs::path cfg = write_json(tmp.path, "cfg.json", j);
  fs::path out = tmp.path / "out";
  CHECK(run_cli({"classify", "--config", cfg.string(), "--out", out.string()}) == 0);
  CHECK(run_cli({"edge", "--config", cfg.string(), "--out", out.string()}) == 0);
  for (const char* name : {"classify_records.jsonl", "edge_records.jsonl"}) {
    std::ifstream in(out / name);
    REQUIRE(in.good());
    std::string line;
    long rows = 0;
    while (std::getline(in, line)) {
      json r = json::parse(line);
      CHECK(r["schema"] == "anderson-lab-1");
      ++rows;
    }
    CHECK(rows > 0);
  }
}

TEST_CASE("induct runs across seeds pool into tighter intervals") {
  TempDir tmp;
  fs::path results = tmp.path / "pool";
  fs::create_directories(results);
  json j = tiny_induct_config();
  j["scales"] = 0;
  fs::path cfg_a = write_json(tmp.path, "a.json", j);
  j["seed"] = 999;
  fs::path cfg_b = write_json(tmp.path, "b.json", j);
  CHECK(run_cli({"induct", "--config", cfg_a.string(), "--out",
                 (results / "runA").string()}) == 0);
  CHECK(run_cli({"induct", "--config", cfg_b.string(), "--out",
                 (results / "runB").string()}) == 0);
  fs::copy(results / "runA" / "induct_records.jsonl", results / "a.jsonl");
  fs::copy(results / "runB" / "induct_records.jsonl", results / "b.jsonl");
  CHECK(run_cli({"report", "--results", results.string()}) == 0);
  std::string agg = slurp(results / "aggregate_summary.csv");
  CHECK(agg.find("nloc(k=0,g=100),24,") != std::string::npos);  // 12 + 12 pooled
}

TEST_CASE("gri-fuzz subcommand runs a small configuration") {
  TempDir tmp;
  json j{{"schema_version", "anderson-lab-1"},
         {"dimension", 1},
         {"samples", 5},
         {"seed", 7},
         {"gri", {{"L", 6}, {"ell", 2}, {"g", 1.0}, {"energies", 2}}}};
  fs::path cfg = write_json(tmp.path, "gri.json", j);
  fs::path out = tmp.path / "out";
  CHECK(run_cli({"gri-fuzz", "--config", cfg.string(), "--out", out.string()}) == 0);
  std::string rep = slurp(out / "gri_report.txt");
  CHECK(rep.find("0/") != std::string::npos);
}

TEST_CASE("wegner subcommand writes estimates") {
  TempDir tmp;
  json j{{"schema_version", "anderson-lab-1"},
         {"dimension", 1},
         {"samples", 500},
         {"seed", 11},
         {"g_grid", {1.0}},
         {"wegner", {{"L_grid", {0}}, {"energies", {0.5}}, {"t_grid", {0.1}}}}};
  fs::path cfg = write_json(tmp.path, "w.json", j);
  fs::path out = tmp.path / "out";
  CHECK(run_cli({"wegner", "--config", cfg.string(), "--out", out.string()}) == 0);
  CHECK(fs::exists(out / "wegner_summary.csv"));
  CHECK(fs::exists(out / "wegner_records.jsonl"));
}
