#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli() {
  const char* p = std::getenv("SHG_CLI");
  REQUIRE_MESSAGE(p != nullptr, "SHG_CLI must point at the shg_cli binary");
  return p;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "shg_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const fs::path& log) {
  std::string cmd = cli() + " " + args + " >" + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("p111 with DBI converges") {
  fs::path dir = scratch("p111");
  int code = run("run --game p111 --solver dbi --alpha 1e-5 --iters 1000000 --out " + (dir / "out").string(),
                 dir / "log.txt");
  REQUIRE(code == 0);
  auto rows = lines(slurp(dir / "out" / "dbi" / "trace.csv"));
  auto header = split(rows.front());
  CHECK(header[0] == "iter");
  CHECK(header[1] == "field_norm");
  CHECK(header.size() == 3 + 3 + 3);
  double final_norm = std::stod(split(rows.back())[1]);
  CHECK(final_norm < 1e-3);

  json summary = load(dir / "out" / "summary.json");
  CHECK(summary["solvers"]["dbi"]["status"] == "converged");
  CHECK(summary["solvers"]["dbi"]["diverged"] == false);
  json stab = load(dir / "out" / "stability.json");
  CHECK(stab["dbi"]["classification"] == "lasp");
  CHECK(stab["dbi"]["is_lspe"] == true);
  json regret = load(dir / "out" / "regret.json");
  CHECK(regret["dbi"]["local"]["epsilon"].get<double>() < 1e-3);
  CHECK(regret["dbi"]["global"]["epsilon"].get<double>() >= 0.0);
  json timing = load(dir / "out" / "timing.json");
  CHECK(timing["wall_seconds"].contains("dbi"));
}

TEST_CASE("p112 baselines") {
  fs::path dir = scratch("p112");
  write(dir / "config.json", R"({
    "game": "p112", "solvers": ["sim", "sym", "sym_aln", "co", "ham"], "seed": 3,
    "learning_rate": 4e-6, "max_iters": 1000000, "grad_tol": 1e-3, "init_box": [-5, 5],
    "regret": {"local": false, "global": false}, "stability": {"enabled": false}, "out": "out"})");
  int code = run("run --config " + (dir / "config.json").string(), dir / "log.txt");
  REQUIRE(code == 0);
  json summary = load(dir / "out" / "summary.json");
  for (const char* s : {"sim", "sym", "sym_aln", "co", "ham"}) {
    CHECK(fs::exists(dir / "out" / s / "trace.csv"));
    bool expect = std::string(s) == "sim" || std::string(s) == "sym" || std::string(s) == "sym_aln";
    INFO(s);
    CHECK(summary["solvers"][s]["diverged"].get<bool>() == expect);
  }
}

TEST_CASE("configuration errors exit 1") {
  fs::path dir = scratch("errors");
  CHECK(run("run --game no_such_game --out " + (dir / "a").string(), dir / "log1.txt") == 1);
  CHECK(slurp(dir / "log1.txt").find("no_such_game") != std::string::npos);
  CHECK(run("run --game p111 --solver newton --out " + (dir / "b").string(), dir / "log2.txt") == 1);
  CHECK(run("run --game p111 --alpha -1 --out " + (dir / "c").string(), dir / "log3.txt") == 1);
  write(dir / "broken.json", "{ not json");
  CHECK(run("run --config " + (dir / "broken.json").string(), dir / "log4.txt") == 1);
  CHECK(run("run --config " + (dir / "missing.json").string(), dir / "log5.txt") == 1);
  CHECK(run("frobnicate", dir / "log6.txt") == 1);
  CHECK(run("run", dir / "log7.txt") == 1);
}

TEST_CASE("solver errors exit 2") {
  fs::path dir = scratch("singular");
  // The follower's utility is linear in its own action.
  write(dir / "game.json", R"({"game_kind": "polynomial", "levels": [1, 1],
    "utilities": [[{"c": -1, "x": [[0, 0, 2]]}], [{"c": 1, "x": [[0, 0, 1], [1, 0, 1]]}]]})");
  int code = run("run --game " + (dir / "game.json").string() + " --out " + (dir / "out").string(), dir / "log.txt");
  CHECK(code == 2);
  json summary = load(dir / "out" / "summary.json");
  CHECK(summary["solvers"]["dbi"]["status"] == "error");
  CHECK(summary["solvers"]["dbi"]["error"].get<std::string>().find("singular") != std::string::npos);
}

TEST_CASE("identical runs write identical files") {
  fs::path dir = scratch("determinism");
  write(dir / "config.json", R"({"game": "security_k05", "solvers": ["dbi", "brd", "sim"], "seed": 7,
    "learning_rate": 0.1, "max_iters": 2000, "brd": {"grid_points": 5, "rounds": 2},
    "regret": {"grid_points": 5, "rounds": 1}})");
  for (const char* out : {"a", "b"})
    REQUIRE(run("run --config " + (dir / "config.json").string() + " --out " + (dir / out).string(),
                dir / "log.txt") == 0);
  for (const char* f : {"summary.json", "regret.json", "stability.json", "dbi/trace.csv", "brd/trace.csv", "sim/trace.csv"}) {
    INFO(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK(!slurp(dir / "a" / f).empty());
  }
  json summary = load(dir / "a" / "summary.json");
  CHECK(summary["solvers"]["brd"]["grid_points"] == 5);
}

TEST_CASE("compare") {
  fs::path dir = scratch("compare");
  std::string args = "compare --game public_goods --grid 3 --eval-grid 5 --rounds 1 --alpha 0.1 --iters 3000 --seed 2 --out ";
  REQUIRE(run(args + (dir / "a").string(), dir / "log.txt") == 0);
  REQUIRE(run(args + (dir / "b").string(), dir / "log.txt") == 0);
  auto timed = lines(slurp(dir / "a" / "regret_vs_time.csv"));
  CHECK(timed.front() == "solver,wall_seconds,epsilon");
  bool dbi = false, brd = false;
  for (std::size_t k = 1; k < timed.size(); ++k) {
    auto f = split(timed[k]);
    REQUIRE(f.size() == 3);
    dbi |= f[0] == "dbi";
    brd |= f[0] == "brd";
    CHECK(std::stod(f[2]) >= 0.0);
  }
  CHECK(dbi);
  CHECK(brd);
  for (const char* f : {"regret_checkpoints.csv", "summary.json", "dbi/trace.csv", "brd/trace.csv"}) {
    INFO(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  json summary = load(dir / "a" / "summary.json");
  CHECK(summary["eval_grid_points"] == 5);
  CHECK(summary.contains("dbi_epsilon_le_brd"));
  json timing = load(dir / "a" / "timing.json");
  CHECK(timing["ratio_to_dbi"]["dbi"] == 1.0);
}

TEST_CASE("list") {
  fs::path dir = scratch("list");
  REQUIRE(run("list", dir / "log.txt") == 0);
  CHECK(slurp(dir / "log.txt").find("epidemic_1_2_10") != std::string::npos);
}
