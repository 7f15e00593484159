#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfgdc/verify/bounds.hpp"
#include "mfgdc/verify/convexity.hpp"

namespace mfgdc {

struct Check {
  std::string name;
  bool pass;
  double margin;
  double tolerance;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

struct VerificationReport {
  std::vector<Check> checks;
  std::vector<double> t;
  /// Functional curves keyed by U descriptor.
  std::map<std::string, std::vector<double>> F;
  /// Norm curves keyed by q ("inf" for the sup norm).
  std::map<std::string, std::vector<double>> norms;

  bool all_pass() const;
  void add(const ConvexityReport& r);
  void add(const BoundsReport& r);
};

std::string q_label(double q);

/// {checks: [...], curves: {t, F, norms}}
nlohmann::ordered_json to_json(const VerificationReport& report);

/// Writes report.json plus one CSV (t,value) per curve into dir.
void write_report(const VerificationReport& report, const std::filesystem::path& dir);

void write_curve_csv(const std::vector<double>& t, const std::vector<double>& values,
                     const std::filesystem::path& path);

}  // namespace mfgdc
