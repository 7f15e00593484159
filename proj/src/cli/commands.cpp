#include "mfgdc/cli/commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "mfgdc/core/io.hpp"
#include "mfgdc/models/admissibility.hpp"
#include "mfgdc/oracle/oracle.hpp"
#include "mfgdc/solver/residual.hpp"
#include "mfgdc/verify/identities.hpp"

namespace mfgdc::cli {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

class CheckFailure : public Error {
 public:
  using Error::Error;
};

struct Options {
  bool no_timestamp = false;
};

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_json(const ojson& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

int fail(std::ostream& err, int code, const std::string& kind, const std::string& message,
         const std::optional<std::filesystem::path>& dir = std::nullopt) {
  const ojson j = {{"error", {{"exit_code", code}, {"kind", kind}, {"message", message}}}};
  err << j.dump() << '\n';
  if (dir) {
    try {
      std::filesystem::create_directories(*dir);
      write_json(j, *dir / "error.json");
    } catch (const std::exception&) {
      // The error has already been reported on stderr.
    }
  }
  return code;
}

void mark(VerificationReport& r, std::size_t first, bool asserted) {
  for (std::size_t i = first; i < r.checks.size(); ++i) r.checks[i].details["asserted"] = asserted;
}

bool coupling_monotone(const Coupling& c) {
  switch (c.kind()) {
    case Coupling::Kind::zero:
    case Coupling::Kind::power:
      return true;
    case Coupling::Kind::table:
      return c.monotonicity_margin(c.table_z().front(), c.table_z().back()) >= -1e-12;
  }
  return false;
}

// Whether the convexity theorems cover t -> int m^q (q may be infinite).
bool lq_covered(double q, double alpha, double beta, int d) {
  if (alpha == 0.0) return true;
  if (std::isinf(q)) {
    const auto sup = congestion_alpha_sup(beta);
    return alpha < sup.value || (d == 1 && sup.attained_at_d1 && alpha == sup.value);
  }
  return congestion_convexity_condition(q, alpha, beta, d).holds;
}

}  // namespace

bool asserted_checks_pass(const VerificationReport& report) {
  for (const auto& c : report.checks) {
    if (c.details.contains("asserted") && c.details["asserted"].get<bool>() && !c.pass) return false;
  }
  return true;
}

VerificationReport verify_trajectory(const Trajectory& traj, const PlanningProblem& problem, const RunConfig& config) {
  VerificationReport report;
  const int d = traj.grid.dim();
  const double alpha = problem.alpha;
  const double beta = problem.hamiltonian.beta();
  const bool monotone = coupling_monotone(problem.coupling);
  for (std::size_t k = 0; k <= traj.steps(); ++k) report.t.push_back(traj.time(k));

  const double drift = traj.mass_drift();
  report.checks.push_back({"mass_conservation", drift <= 1e-8, 1e-8 - drift, 1e-8, {{"drift", drift}}});
  mark(report, report.checks.size() - 1, true);

  for (const auto& spec : config.energies) {
    const auto U = InternalEnergy::parse(spec);
    const std::size_t first = report.checks.size();
    Curve curve;
    try {
      curve = functional_curve(traj, U);
    } catch (const InvalidArgument& e) {
      report.checks.push_back({"convexity[" + U.describe() + "]", false, std::nan(""), 0.0, {{"error", e.what()}}});
      mark(report, first, true);
      continue;
    }
    report.add(convexity_report(curve, config.tol_abs, config.tol_rel, U.describe()));
    // Theorem coverage: admissible U without congestion; U = z^q under the
    // congestion condition otherwise.
    bool covered = monotone && displacement_admissible(U, d).admissible;
    if (alpha > 0.0) {
      covered = monotone && U.kind() == InternalEnergy::Kind::power &&
                congestion_convexity_condition(U.exponent(), alpha, beta, d).holds;
    }
    mark(report, first, covered);
  }

  const double tol_bounds = config.tol_abs + config.tol_rel;
  const auto bounds = lq_logconvexity_report(traj, config.q_list, tol_bounds);
  const std::size_t first_bounds = report.checks.size();
  report.add(bounds);
  for (std::size_t i = 0; i < bounds.records.size(); ++i) {
    const bool covered = monotone && lq_covered(bounds.records[i].q, alpha, beta, d);
    report.checks[first_bounds + 2 * i].details["asserted"] = covered;
    report.checks[first_bounds + 2 * i + 1].details["asserted"] = covered && bounds.records[i].gap_log.has_value();
  }

  const auto ext = extremum_bounds_report(traj, d, tol_bounds);
  report.checks.push_back({"sup_bound", ext.pass_sup, tol_bounds - ext.sup_gap, tol_bounds, {{"gap", ext.sup_gap}}});
  mark(report, report.checks.size() - 1, monotone && lq_covered(kInf, alpha, beta, d));
  if (ext.inf_gap) {
    report.checks.push_back({"inf_bound", ext.pass_inf, tol_bounds - *ext.inf_gap, tol_bounds, {{"gap", *ext.inf_gap}}});
    mark(report, report.checks.size() - 1, monotone && alpha == 0.0);
  }

  if (traj.u) {
    const auto res = residual_norms(traj, problem, config.solver.eps_m);
    report.checks.push_back({"pde_residuals", true, std::nan(""), std::nan(""),
                             {{"hj_max", res.hj_max}, {"continuity_max", res.continuity_max}, {"asserted", false}}});
    if (alpha == 0.0) {
      for (const auto& spec : config.energies) {
        const auto U = InternalEnergy::parse(spec);
        if (!displacement_admissible(U, d).admissible) continue;
        const auto est = estimate_rhs_sign_check(traj, problem, U);
        const double tol = config.tol_abs + config.tol_rel * est.scale;
        report.checks.push_back({"estimate_sign[" + U.describe() + "]", est.min_rhs >= -tol, est.min_rhs + tol, tol,
                                 {{"min_rhs", est.min_rhs}, {"scale", est.scale}, {"asserted", monotone}}});
      }
    }
  }
  return report;
}

namespace {

void emit_report(VerificationReport& report, const std::filesystem::path& dir, const Options& opt,
                 const std::optional<SolveDiagnostics>& diag) {
  std::filesystem::create_directories(dir);
  write_report(report, dir);
  ojson j = to_json(report);
  if (diag) j["solver"] = {{"backend", diag->backend}, {"iterations", diag->iterations}, {"energy", diag->energy},
                           {"converged", diag->converged}};
  if (!opt.no_timestamp) j["generated_at"] = timestamp();
  write_json(j, dir / "report.json");
}

int cmd_solve(const std::string& config_path, const Options& opt, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const Error& e) {
    return fail(err, kConfigError, "config", e.what());
  }
  std::optional<PlanningProblem> built;
  try {
    built = build_problem(config);
  } catch (const ConfigError& e) {
    return fail(err, kConfigError, "config", e.what(), config.output);
  }
  const PlanningProblem& problem = *built;
  std::filesystem::create_directories(config.output);
  std::optional<SolveResult> solved;
  try {
    solved = solve_planning(problem, config.solver);
  } catch (const SolverFailure& e) {
    std::ofstream(config.output / "diagnostics.json") << diagnostics_json(e.diagnostics()) << '\n';
    if (e.last_iterate()) write_trajectory(*e.last_iterate(), config.output / "last_iterate.traj");
    return fail(err, kSolverFailure, "solver", e.what(), config.output);
  } catch (const InvalidArgument& e) {
    return fail(err, kConfigError, "config", e.what(), config.output);
  }
  const SolveResult& result = *solved;
  write_trajectory(result.trajectory, config.output / "trajectory.traj");
  std::ofstream(config.output / "diagnostics.json") << diagnostics_json(result.diagnostics) << '\n';
  auto report = verify_trajectory(result.trajectory, problem, config);
  emit_report(report, config.output, opt, result.diagnostics);
  const bool ok = asserted_checks_pass(report);
  out << ojson{{"converged", result.diagnostics.converged},
               {"iterations", result.diagnostics.iterations},
               {"energy", result.diagnostics.energy},
               {"checks_pass", ok},
               {"output", config.output.string()}}
             .dump(2)
      << '\n';
  if (!ok) return fail(err, kCheckFailure, "check", "asserted verification checks failed", config.output);
  return kOk;
}

int cmd_verify(const std::string& traj_path, const std::string& config_path, const Options& opt, std::ostream& out,
               std::ostream& err) {
  RunConfig config;
  std::optional<Trajectory> loaded;
  try {
    config = load_config(config_path);
    loaded = read_trajectory(traj_path);
    loaded->validate();
  } catch (const Error& e) {
    return fail(err, kConfigError, "config", e.what());
  }
  const Trajectory& traj = *loaded;
  PlanningProblem problem{traj.grid, traj.horizon, traj.steps(), traj.m.front(), traj.m.back(),
                          PowerHamiltonian(config.beta), Coupling::zero(), config.alpha};
  try {
    problem.coupling = build_coupling(config.coupling);
  } catch (const Error& e) {
    return fail(err, kConfigError, "config", e.what(), config.output);
  }
  VerificationReport report;
  try {
    report = verify_trajectory(traj, problem, config);
  } catch (const InvalidArgument& e) {
    return fail(err, kConfigError, "config", e.what(), config.output);
  }
  emit_report(report, config.output, opt, std::nullopt);
  const bool ok = asserted_checks_pass(report);
  out << ojson{{"checks", report.checks.size()}, {"checks_pass", ok}, {"output", config.output.string()}}.dump(2)
      << '\n';
  if (!ok) return fail(err, kCheckFailure, "check", "asserted verification checks failed", config.output);
  return kOk;
}

int cmd_admissible(const std::string& spec, int d, std::ostream& out, std::ostream& err) {
  try {
    if (d < 1) throw InvalidArgument("d must be >= 1");
    const auto U = InternalEnergy::parse(spec);
    const auto r = displacement_admissible(U, d);
    out << ojson{{"U", U.describe()},
                 {"d", d},
                 {"admissible", r.admissible},
                 {"margin", r.margin},
                 {"tolerance", r.tolerance},
                 {"certificate", r.certificate},
                 {"pressure_growth_max", pressure_growth_check(U, d)}}
               .dump(2)
        << '\n';
    return r.admissible ? kOk : kCheckFailure;
  } catch (const InvalidArgument& e) {
    return fail(err, kConfigError, "argument", e.what());
  }
}

int cmd_thresholds(double beta, int d, std::ostream& out, std::ostream& err) {
  try {
    if (d < 1) throw InvalidArgument("d must be >= 1");
    const auto sup = congestion_alpha_sup(beta);
    const std::vector<double> qs{1, 1.5, 2, 3, 5, 10, 20, 50, 100, 200, 500, 1000};
    std::vector<double> alphas{0.0, 0.25 * sup.value, 0.5 * sup.value, sup.value - 0.1, sup.value, sup.value + 0.1,
                               2.0 * sup.value};
    ojson rows = ojson::array();
    out << "beta = " << beta << ", d = " << d << ": sup alpha = " << sup.value << '\n';
    out << std::setw(10) << "alpha";
    for (double q : qs) out << std::setw(6) << q;
    out << "  large q\n";
    for (double a : alphas) {
      if (a < 0.0) continue;
      ojson row = {{"alpha", a}};
      ojson cells = ojson::array();
      out << std::setw(10) << std::setprecision(4) << a;
      std::vector<bool> holds;
      for (double q : qs) {
        const bool h = congestion_convexity_condition(q, a, beta, d).holds;
        holds.push_back(h);
        cells.push_back({{"q", q}, {"holds", h}});
        out << std::setw(6) << (h ? "yes" : "-");
      }
      // Verdict from the three largest samples.
      const bool eventually = holds[holds.size() - 1] && holds[holds.size() - 2] && holds[holds.size() - 3];
      const bool never = !holds[holds.size() - 1] && !holds[holds.size() - 2] && !holds[holds.size() - 3];
      const std::string verdict = eventually ? "admissible q unbounded" : never ? "inadmissible for large q" : "mixed";
      out << "  " << verdict << '\n';
      row["q"] = cells;
      row["large_q"] = verdict;
      rows.push_back(row);
    }
    out << ojson{{"beta", beta}, {"d", d}, {"alpha_sup", sup.value}, {"attained_at_d1", sup.attained_at_d1},
                 {"table", rows}}
               .dump()
        << '\n';
    return kOk;
  } catch (const InvalidArgument& e) {
    return fail(err, kConfigError, "argument", e.what());
  }
}

int cmd_identities(std::uint64_t seed, std::size_t samples, std::size_t fields, std::ostream& out) {
  ojson trace = ojson::array();
  bool ok = true;
  for (int d = 1; d <= 8; ++d) {
    const auto r = trace_lemma_check(d, samples, seed + static_cast<std::uint64_t>(d));
    const double bound = d == 1 ? 1e-15 : 1e-10;
    ok = ok && r.max_scaled_violation <= bound;
    trace.push_back({{"d", d}, {"max_violation", r.max_violation}, {"max_scaled_violation", r.max_scaled_violation},
                     {"bound", bound}});
  }
  ojson div = ojson::array();
  for (double beta : {2.0, 3.0}) {
    for (int d : {1, 2}) {
      const TorusGrid grid(d, 64);
      double worst = 0.0;
      for (std::size_t i = 0; i < fields; ++i) {
        const auto u = random_bandlimited_field(grid, seed * 1000 + i, 8);
        const auto r = divergence_trace_check(u, beta);
        worst = std::max(worst, r.residual_norm / r.scale);
      }
      const double bound = beta == 2.0 ? 1e-6 : 1e-4;
      ok = ok && worst <= bound;
      div.push_back({{"beta", beta}, {"d", d}, {"max_scaled_residual", worst}, {"bound", bound}});
    }
  }
  out << ojson{{"seed", seed}, {"trace_lemma", trace}, {"divergence_trace", div}, {"pass", ok}}.dump(2) << '\n';
  return ok ? kOk : kCheckFailure;
}

ojson read_spec(const std::string& spec) {
  try {
    if (!spec.empty() && spec.front() == '{') return ojson::parse(spec);
    std::ifstream in(spec);
    if (!in) throw ConfigError("cannot read oracle spec " + spec);
    return ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("oracle spec is not valid JSON: ") + e.what());
  }
}

template <typename T>
T get_or(const ojson& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("oracle spec key '" + key + "' has the wrong type");
  }
}

void only(const ojson& j, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : j.items()) {
    bool found = false;
    for (const char* key : keys) found = found || k == key;
    if (!found) throw ConfigError("unknown key '" + k + "' in oracle spec");
  }
}

BumpSpec bump_from(const ojson& j) {
  BumpSpec b;
  if (!j.is_object()) throw ConfigError("bump must be an object");
  only(j, {"center", "length", "floor"});
  b.center = get_or(j, "center", b.center);
  b.length = get_or(j, "length", b.length);
  b.floor = get_or(j, "floor", b.floor);
  return b;
}

int cmd_oracle(const std::string& kind, const std::string& spec_text, std::ostream& out, std::ostream& err) {
  try {
    const ojson spec = read_spec(spec_text);
    if (!spec.is_object()) throw ConfigError("oracle spec must be an object");
    const std::size_t n = get_or<std::size_t>(spec, "n", 128);
    const int dim = get_or(spec, "dim", 1);
    const double T = get_or(spec, "T", 1.0);
    const std::size_t K = get_or<std::size_t>(spec, "K", 64);
    const std::filesystem::path output = get_or<std::string>(spec, "output", kind + ".traj");
    const TorusGrid grid(dim, n);
    ojson summary = {{"kind", kind}, {"output", output.string()}};
    std::optional<Trajectory> traj;
    if (kind == "translation") {
      only(spec, {"n", "dim", "T", "K", "output", "bump", "shift"});
      traj = translation_solution(bump_from(spec.value("bump", ojson::object())), get_or(spec, "shift", 0.25), T, grid,
                                  K);
    } else if (kind == "quantile") {
      only(spec, {"n", "dim", "T", "K", "output", "m0", "mT", "cut"});
      const auto m0 = bump_density(bump_from(spec.value("m0", ojson::object())), grid);
      const auto mT = bump_density(bump_from(spec.value("mT", ojson::object())), grid);
      traj = quantile_interpolant_1d(m0, mT, T, K, get_or(spec, "cut", std::nan("")));
    } else if (kind == "uniform") {
      only(spec, {"n", "dim", "T", "K", "output", "c", "theta"});
      const double c = get_or(spec, "c", 0.0);
      traj = uniform_solution(c == 0.0 ? Coupling::zero() : Coupling::power(c, get_or(spec, "theta", 1.0)), T, grid, K);
    } else if (kind == "traveling_wave") {
      only(spec, {"n", "dim", "T", "K", "output", "amplitude", "speed", "alpha", "beta", "require_monotone",
                  "table_output"});
      TravelingWaveSpec tw{cosine_profile(get_or(spec, "amplitude", 0.3)), get_or(spec, "speed", 0.4),
                           get_or(spec, "alpha", 0.5), get_or(spec, "beta", 2.0)};
      TravelingWaveOptions options;
      options.require_monotone = false;
      const auto wave = traveling_wave_congestion(tw, grid, K, T, options);
      summary["k0"] = wave.k0;
      summary["g_margin"] = wave.g_margin;
      summary["g_monotone"] = wave.monotone;
      summary["hj_residual"] = wave.hj_residual;
      summary["continuity_residual"] = wave.continuity_residual;
      if (get_or(spec, "require_monotone", true) && !wave.monotone) {
        out << summary.dump(2) << '\n';
        return fail(err, kCheckFailure, "check", "implied coupling g is not non-decreasing");
      }
      const std::filesystem::path table = get_or<std::string>(spec, "table_output", "traveling_wave_g.csv");
      write_coupling_csv(wave.coupling, table);
      summary["table_output"] = table.string();
      traj = wave.trajectory;
    } else {
      throw ConfigError("unknown oracle kind '" + kind + "' (translation, quantile, uniform, traveling_wave)");
    }
    write_trajectory(*traj, output);
    out << summary.dump(2) << '\n';
    return kOk;
  } catch (const ConfigError& e) {
    return fail(err, kConfigError, "config", e.what());
  } catch (const InvalidArgument& e) {
    return fail(err, kConfigError, "argument", e.what());
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Displacement convexity checks for mean field game planning problems", "mfgdc"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_flag("--no-timestamp", opt.no_timestamp, "Omit the timestamp from report.json");

  std::string config_path, traj_path, spec, kind;
  int d = 1;
  double beta = 2.0;
  std::uint64_t seed = 0;
  std::size_t samples = 10000, fields = 20;

  auto* solve = app.add_subcommand("solve", "Solve the configured planning problem, verify and report");
  solve->add_option("config", config_path, "JSON run configuration")->required();
  auto* verify = app.add_subcommand("verify", "Verify an existing trajectory file");
  verify->add_option("trajectory", traj_path)->required();
  verify->add_option("config", config_path)->required();
  auto* admissible = app.add_subcommand("admissible", "Displacement admissibility of an internal energy");
  admissible->add_option("U", spec, "power:Q | scaled_power:A:E | entropy | shifted_inverse:Q:EPS")->required();
  admissible->add_option("d", d)->required();
  auto* oracle = app.add_subcommand("oracle", "Write a reference trajectory");
  oracle->add_option("kind", kind, "translation | quantile | uniform | traveling_wave")->required();
  oracle->add_option("spec", spec, "JSON object or path to a JSON file")->required();
  auto* identities = app.add_subcommand("identities", "Randomized trace-lemma and divergence-trace suites");
  identities->add_option("--seed", seed, "Random seed");
  identities->add_option("--samples", samples, "Matrix samples per dimension");
  identities->add_option("--fields", fields, "Random fields per (beta, d)");
  auto* thresholds = app.add_subcommand("thresholds", "Congestion alpha thresholds and q table");
  thresholds->add_option("beta", beta)->required();
  thresholds->add_option("d", d)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << app.help();
    return fail(err, kConfigError, "usage", e.what());
  }

  try {
    if (*solve) return cmd_solve(config_path, opt, out, err);
    if (*verify) return cmd_verify(traj_path, config_path, opt, out, err);
    if (*admissible) return cmd_admissible(spec, d, out, err);
    if (*oracle) return cmd_oracle(kind, spec, out, err);
    if (*identities) return cmd_identities(seed, samples, fields, out);
    if (*thresholds) return cmd_thresholds(beta, d, out, err);
  } catch (const std::exception& e) {
    return fail(err, kConfigError, "internal", e.what());
  }
  return kConfigError;
}

}  // namespace mfgdc::cli
