#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mfgdc/cli/commands.hpp"
#include "mfgdc/cli/config.hpp"
#include "mfgdc/core/io.hpp"

using namespace mfgdc;
using namespace mfgdc::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mfgdc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("mfgdc_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

json uniform_config(const fs::path& out) {
  auto j = json::parse(R"({
    "grid": {"dim": 1, "n": 16},
    "time": {"T": 1.0, "K": 8},
    "endpoints": {"m0": "uniform", "mT": "uniform"},
    "coupling": {"power": {"c": 1.0, "theta": 1.0}},
    "verify": {"U": ["power:2", "entropy"], "q": [1, 2, "inf"]}
  })");
  j["output"] = {{"directory", out.string()}};
  return j;
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
  auto path = dir / name;
  std::ofstream(path) << j.dump(2);
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing defaults and values") {
  auto c = parse_config(json::parse(R"({
    "grid": {"dim": 2, "n": 32}, "time": {"T": 2, "K": 10},
    "endpoints": {"m0": {"bump": {"center": 0.2}}, "mT": {"random": {"modes": 2}}},
    "hamiltonian": {"beta": 3}, "congestion": {"alpha": 0.25},
    "solver": {"backend": "newton", "alpha_step": 0.125},
    "verify": {"q": [1, "inf"], "tolerances": {"rel": 1e-2}},
    "seed": 9})"));
  CHECK(c.dim == 2);
  CHECK(c.n == 32);
  CHECK(c.horizon == 2.0);
  CHECK(c.m0.kind == EndpointSpec::Kind::bump);
  CHECK(c.m0.bump.center == 0.2);
  CHECK(c.mT.kind == EndpointSpec::Kind::random);
  CHECK(c.mT.modes == 2);
  CHECK(c.beta == 3.0);
  CHECK(c.alpha == 0.25);
  CHECK(c.solver.backend == Backend::newton);
  CHECK(c.solver.alpha_step == 0.125);
  CHECK(std::isinf(c.q_list[1]));
  CHECK(c.tol_rel == 1e-2);
  CHECK(c.tol_abs == 1e-10);
  CHECK(c.energies == std::vector<std::string>{"power:2"});
  CHECK(c.seed == 9);
}

TEST_CASE("malformed configs are config errors") {
  const std::vector<std::string> bad{
      R"([])",
      R"({"time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}})",
      R"({"grid": {"dim": 1, "n": 16, "extra": 1}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}})",
      R"({"grid": {"dim": 1, "n": "16"}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}})",
      R"({"grid": {"dim": 1, "n": -16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "flat", "mT": "uniform"}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": {"bump": {}, "random": {}}, "mT": "uniform"}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": {"file": "missing.fld"}, "mT": "uniform"}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}, "coupling": "linear"})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}, "coupling": {"power": {"theta": 1}}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}, "solver": {"backend": "cg"}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}, "verify": {"q": [0.5]}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}, "verify": {"q": ["max"]}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}, "verify": {"U": ["cubic"]}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}, "verify": {"tolerances": {"abs": -1}}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}, "output": {}})",
      R"({"grid": {"dim": 1, "n": 16}, "time": {"T": 1, "K": 8}, "endpoints": {"m0": "uniform", "mT": "uniform"}, "colour": 1})",
  };
  TempDir dir("malformed");
  for (std::size_t i = 0; i < bad.size(); ++i) {
    CAPTURE(bad[i]);
    CHECK_THROWS_AS(parse_config(json::parse(bad[i]), dir.path()), ConfigError);
    auto path = dir.path() / ("bad" + std::to_string(i) + ".json");
    std::ofstream(path) << bad[i];
    auto r = run_cli({"solve", path.string()});
    CHECK(r.code == kConfigError);
    auto err = json::parse(r.err);
    CHECK(err["error"]["exit_code"] == 4);
  }
  auto broken = dir.path() / "broken.json";
  std::ofstream(broken) << "{\"grid\": ";
  CHECK(run_cli({"solve", broken.string()}).code == kConfigError);
  CHECK(run_cli({"solve", (dir.path() / "absent.json").string()}).code == kConfigError);
}

TEST_CASE("precondition failures in the problem are config errors") {
  TempDir dir("preconditions");
  auto j = uniform_config(dir.path() / "out");
  j["grid"]["n"] = 10;
  auto r = run_cli({"solve", write_config(dir.path(), "n10.json", j).string()});
  CHECK(r.code == kConfigError);
  CHECK(json::parse(r.err)["error"]["message"].get<std::string>().find("n must be a power of two") != std::string::npos);

  j = uniform_config(dir.path() / "out");
  j["endpoints"]["m0"] = json{{"bump", {{"length", 0.2}}}};
  j["congestion"] = {{"alpha", 0.5}};
  CHECK(run_cli({"solve", write_config(dir.path(), "vacuum.json", j).string()}).code == kConfigError);
}

TEST_CASE("endpoint files resolve against the config directory") {
  TempDir dir("files");
  TorusGrid g(1, 16);
  auto f = ScalarField::sample(g, [](double x, double) { return 1.0 + 0.5 * std::sin(2 * std::numbers::pi * x); });
  fs::create_directories(dir.path() / "data");
  write_field(f, dir.path() / "data" / "m0.fld");
  auto j = uniform_config("out");
  j["endpoints"]["m0"] = {{"file", "data/m0.fld"}};
  auto c = load_config(write_config(dir.path(), "cfg.json", j));
  CHECK(c.m0.path == dir.path() / "data" / "m0.fld");
  CHECK(c.output == fs::path("out"));
  auto p = build_problem(c);
  CHECK(p.m0.data() == f.data());
}

TEST_CASE("solve writes artifacts and is deterministic") {
  TempDir dir("solve");
  std::vector<std::string> reports;
  for (int i = 0; i < 2; ++i) {
    auto out = dir.path() / ("out" + std::to_string(i));
    auto r = run_cli({"solve", write_config(dir.path(), "u.json", uniform_config(out)).string(), "--no-timestamp"});
    CHECK(r.code == kOk);
    CHECK(json::parse(r.out)["checks_pass"] == true);
    for (const char* name : {"trajectory.traj", "diagnostics.json", "report.json", "F_power_2.csv", "norm_qinf.csv"})
      CHECK(fs::exists(out / name));
    reports.push_back(slurp(out / "report.json"));
    auto report = json::parse(reports.back());
    CHECK_FALSE(report.contains("generated_at"));
    CHECK(report["solver"]["converged"] == true);
    for (const auto& c : report["checks"]) CHECK(c["pass"] == true);
    auto traj = read_trajectory(out / "trajectory.traj");
    CHECK(traj.u.has_value());
  }
  CHECK(reports[0] == reports[1]);

  auto out = dir.path() / "stamped";
  CHECK(run_cli({"solve", write_config(dir.path(), "s.json", uniform_config(out)).string()}).code == kOk);
  CHECK(json::parse(slurp(out / "report.json")).contains("generated_at"));
}

TEST_CASE("random endpoints follow the seed") {
  TempDir dir("seed");
  auto j = uniform_config(dir.path() / "out");
  j["endpoints"] = {{"m0", {{"random", json::object()}}}, {"mT", {{"random", json::object()}}}};
  j["seed"] = 4;
  auto a = build_problem(parse_config(j));
  auto b = build_problem(parse_config(j));
  j["seed"] = 5;
  auto c = build_problem(parse_config(j));
  CHECK(a.m0.data() == b.m0.data());
  CHECK(a.m0.data() != a.mT.data());
  CHECK(a.m0.data() != c.m0.data());
}

TEST_CASE("solver failure exits 3 with the last iterate") {
  TempDir dir("fail");
  auto out = dir.path() / "out";
  auto j = uniform_config(out);
  j["endpoints"] = {{"m0", {{"random", json::object()}}}, {"mT", {{"random", json::object()}}}};
  j["solver"] = {{"max_iters", 2}, {"tol", 1e-14}};
  auto r = run_cli({"solve", write_config(dir.path(), "f.json", j).string()});
  CHECK(r.code == kSolverFailure);
  CHECK(json::parse(r.err)["error"]["kind"] == "solver");
  CHECK(fs::exists(out / "error.json"));
  CHECK(fs::exists(out / "last_iterate.traj"));
  CHECK(json::parse(slurp(out / "diagnostics.json"))["converged"] == false);
}

TEST_CASE("verify flags a non-convex trajectory") {
  TempDir dir("verify");
  TorusGrid g(1, 16);
  Trajectory t{g, 1.0, {}, std::nullopt, std::nullopt};
  for (int k = 0; k <= 4; ++k) {
    const double a = k == 2 ? 0.5 : 0.0;
    t.m.push_back(ScalarField::sample(g, [a](double x, double) { return 1.0 + a * std::cos(2 * std::numbers::pi * x); }));
  }
  write_trajectory(t, dir.path() / "bumpy.traj");
  auto cfg = write_config(dir.path(), "v.json", uniform_config(dir.path() / "out"));
  auto r = run_cli({"verify", (dir.path() / "bumpy.traj").string(), cfg.string(), "--no-timestamp"});
  CHECK(r.code == kCheckFailure);
  auto report = json::parse(slurp(dir.path() / "out" / "report.json"));
  bool found = false;
  for (const auto& c : report["checks"])
    if (c["name"] == "convexity[power:2]") {
      found = true;
      CHECK(c["pass"] == false);
      CHECK(c["details"]["asserted"] == true);
    }
  CHECK(found);

  Trajectory flat{g, 1.0, {ScalarField(g, 1.0), ScalarField(g, 1.0), ScalarField(g, 1.0)}, std::nullopt, std::nullopt};
  write_trajectory(flat, dir.path() / "flat.traj");
  CHECK(run_cli({"verify", (dir.path() / "flat.traj").string(), cfg.string()}).code == kOk);
  CHECK(run_cli({"verify", (dir.path() / "missing.traj").string(), cfg.string()}).code == kConfigError);
}

TEST_CASE("admissible subcommand") {
  auto r = run_cli({"admissible", "power:2", "3"});
  CHECK(r.code == kOk);
  auto j = json::parse(r.out);
  CHECK(j["admissible"] == true);
  CHECK(j["margin"].get<double>() > 0.0);
  CHECK(run_cli({"admissible", "scaled_power:-1:0.5", "3"}).code == kCheckFailure);
  CHECK(run_cli({"admissible", "cubic", "3"}).code == kConfigError);
}

TEST_CASE("thresholds subcommand") {
  auto r = run_cli({"thresholds", "3", "2"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("sup alpha = 1") != std::string::npos);
  auto last = r.out.substr(r.out.rfind('{', r.out.find("\"beta\"")));
  auto j = json::parse(last);
  CHECK(j["alpha_sup"] == 1.0);
  bool below = false, above = false;
  for (const auto& row : j["table"]) {
    if (std::abs(row["alpha"].get<double>() - 0.9) < 1e-12) below = row["large_q"] == "admissible q unbounded";
    if (std::abs(row["alpha"].get<double>() - 1.1) < 1e-12) above = row["large_q"] == "inadmissible for large q";
  }
  CHECK(below);
  CHECK(above);
}

TEST_CASE("identities subcommand") {
  auto r = run_cli({"identities", "--seed", "7", "--samples", "500", "--fields", "2"});
  CHECK(r.code == kOk);
  auto j = json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["trace_lemma"].size() == 8);
}

TEST_CASE("oracle subcommand") {
  TempDir dir("oracle");
  auto out = (dir.path() / "t.traj").string();
  auto r = run_cli({"oracle", "translation", json{{"n", 64}, {"K", 8}, {"shift", 0.15}, {"output", out}}.dump()});
  CHECK(r.code == kOk);
  CHECK(read_trajectory(out).steps() == 8);
  auto tw = run_cli({"oracle", "traveling_wave", json{{"n", 64}, {"K", 8}, {"output", out}}.dump()});
  CHECK(tw.code == kCheckFailure);
  CHECK(json::parse(tw.out)["g_monotone"] == false);
  auto table = (dir.path() / "g.csv").string();
  CHECK(run_cli({"oracle", "traveling_wave",
                 json{{"n", 64}, {"K", 8}, {"output", out}, {"require_monotone", false}, {"table_output", table}}.dump()})
            .code == kOk);
  CHECK(fs::exists(table));
  CHECK(run_cli({"oracle", "spiral", "{}"}).code == kConfigError);
  CHECK(run_cli({"oracle", "translation", R"({"wobble": 1})"}).code == kConfigError);
}

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == kConfigError);
  auto r = run_cli({"frobnicate"});
  CHECK(r.code == kConfigError);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run_cli({"admissible", "power:2"}).code == kConfigError);
}

}  // TEST_SUITE
