#pragma once

// Command implementations behind the CLI verbs. Each returns the process exit
// status: 0 success or converged, 2 ran but did not converge (or a bound
// failed), 1 error. Errors are thrown; `run_cli` maps them to status 1.

#include <ostream>

#include "app/config.hpp"

namespace pullback::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

int cmd_pullback(const RunConfig& cfg, std::ostream& log);
int cmd_uniform(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_equi(const RunConfig& cfg, std::ostream& log);
int cmd_verify_bounds(const RunConfig& cfg, std::ostream& log);
/// Closed-form benchmark checks; `cfg` only supplies integrator settings and the output directory.
int cmd_oracle(const RunConfig& cfg, std::ostream& log);

/// Full command line, verbs and flags included.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pullback::app
