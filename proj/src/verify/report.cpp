#include "mfgdc/verify/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mfgdc/core/error.hpp"

namespace mfgdc {

namespace {

// JSON has no infinities; non-finite numbers are written as strings.
nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string file_safe(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
  return s;
}

}  // namespace

std::string q_label(double q) {
  if (std::isinf(q)) return "inf";
  std::ostringstream os;
  os << q;
  return os.str();
}

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void VerificationReport::add(const ConvexityReport& r) {
  if (t.empty()) t = r.curve.t;
  F[r.descriptor] = r.curve.value;
  checks.push_back({"convexity[" + r.descriptor + "]", r.pass_convexity, r.min_second_difference, r.tolerance,
                    {{"second_differences", r.second_differences}}});
  checks.push_back({"chord[" + r.descriptor + "]", r.pass_chord, -r.chord_gap, r.tolerance, {{"chord_gap", r.chord_gap}}});
}

void VerificationReport::add(const BoundsReport& r) {
  for (const auto& rec : r.records) {
    const std::string q = q_label(rec.q);
    norms[q] = rec.norms;
    checks.push_back({"interpolation_bound[q=" + q + "]", rec.pass_interp, -rec.gap_interp, r.tolerance,
                      {{"gap", number(rec.gap_interp)}, {"strictness_margin", number(rec.strictness_margin)}}});
    if (rec.gap_log) {
      checks.push_back({"log_convexity[q=" + q + "]", rec.pass_log, *rec.gap_log, r.tolerance, {{"skipped", false}}});
    } else {
      checks.push_back({"log_convexity[q=" + q + "]", false, std::nan(""), r.tolerance,
                        {{"skipped", true}, {"reason", "non-positive norm"}}});
    }
  }
}

nlohmann::ordered_json to_json(const VerificationReport& report) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"margin", number(c.margin)},
                      {"tolerance", number(c.tolerance)},
                      {"details", c.details}});
  }
  nlohmann::ordered_json F = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.F) F[k] = v;
  nlohmann::ordered_json norms = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.norms) norms[k] = v;
  return {{"checks", checks}, {"curves", {{"t", report.t}, {"F", F}, {"norms", norms}}}};
}

void write_curve_csv(const std::vector<double>& t, const std::vector<double>& values,
                     const std::filesystem::path& path) {
  if (t.size() != values.size()) throw InvalidArgument("curve length mismatch");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "t,value\n" << std::setprecision(17);
  for (std::size_t k = 0; k < t.size(); ++k) out << t[k] << ',' << values[k] << '\n';
}

void write_report(const VerificationReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "report.json");
  if (!out) throw Error("cannot write " + (dir / "report.json").string());
  out << to_json(report).dump(2) << '\n';
  for (const auto& [k, v] : report.F) write_curve_csv(report.t, v, dir / ("F_" + file_safe(k) + ".csv"));
  for (const auto& [k, v] : report.norms) write_curve_csv(report.t, v, dir / ("norm_q" + file_safe(k) + ".csv"));
}

}  // namespace mfgdc
