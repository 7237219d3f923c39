#pragma once

#include <string>
#include <vector>

#include "mdirl/record.hpp"

namespace mdirl {

enum class DiagnosticMode { theorem1a, theorem1b, theorem2, proposition1 };

struct DiagnosticOptions {
  // theorem2: bounds on per-step ratios and the log-linear fit quality
  double r2_min = 0.999;
  double ratio_lo = 0.0;
  double ratio_hi = 1.0;
  // values below this are treated as numerical noise and excluded from fits
  double series_floor = 1e-12;
  // theorem1b: sup of t*A_t over the later window may exceed the earlier
  // window's sup by at most this factor
  double bound_factor = 2.0;
  // proposition1: final-window mean must drop below this fraction of A_1
  double convergence_ratio = 0.1;
  // theorem1a: final-window mean must stay above this fraction of A_1
  double stall_ratio = 0.5;
  // fraction of the series forming the final window
  double final_window = 0.1;
};

struct DiagnosticReport {
  DiagnosticMode mode;
  bool pass = false;
  std::string message;
  // theorem2 statistics
  double slope = 0.0;
  double r_squared = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  // theorem1b statistics
  double sup_early = 0.0;
  double sup_late = 0.0;
  // window means relative to the initial value
  double initial_value = 0.0;
  double final_mean = 0.0;
};

// Checks a divergence series A_t (t = 1..T) against the qualitative behavior
// of the convergence results: O(1/T) boundedness of T*A_T (theorem1b),
// geometric decay (theorem2), convergence under square-summable noise
// (proposition1), or a stall above a positive floor (theorem1a). Requires at
// least 50 points.
DiagnosticReport convergence_diagnostics(const std::vector<double>& series,
                                         DiagnosticMode mode,
                                         const DiagnosticOptions& opts = {});

// Convenience overload pulling a named field from run records
// ("d_agent_expert", "d_ref_expert", "regret", or an aux key).
DiagnosticReport convergence_diagnostics(const std::vector<RunRecord>& records,
                                         DiagnosticMode mode,
                                         const std::string& field = "d_agent_expert",
                                         const DiagnosticOptions& opts = {});

}  // namespace mdirl
