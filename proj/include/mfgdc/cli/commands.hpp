#pragma once

#include <iosfwd>
#include <string>

#include "mfgdc/cli/config.hpp"
#include "mfgdc/verify/report.hpp"

namespace mfgdc::cli {

enum ExitCode : int { kOk = 0, kCheckFailure = 2, kSolverFailure = 3, kConfigError = 4 };

/// Convexity, norm and extremum checks of a trajectory against the physics
/// of `problem`. Checks carry details.asserted; only asserted checks decide
/// the exit code (those covered by the convexity theorems for the given
/// alpha, beta and d).
VerificationReport verify_trajectory(const Trajectory& traj, const PlanningProblem& problem,
                                     const RunConfig& config);

bool asserted_checks_pass(const VerificationReport& report);

/// Entry point of the mfgdc executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfgdc::cli
