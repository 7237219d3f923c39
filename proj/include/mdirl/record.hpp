#pragma once

#include <map>
#include <string>
#include <vector>

namespace mdirl {

// Per-iteration metrics of an MD-IRL run.
struct RunRecord {
  int t = 0;
  double eta = 0.0;
  double d_agent_expert = 0.0;  // D(pi_t || pi_E), discounted-trajectory weighted
  double d_ref_expert = 0.0;    // D(pi_bar_t || pi_E)
  double regret = 0.0;
  bool clamped = false;
  std::map<std::string, double> aux;
};

// CSV with the fixed header t,eta,d_agent_expert,d_ref_expert,regret,clamped_flag.
std::string records_to_csv(const std::vector<RunRecord>& records);
void write_csv(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_csv(const std::string& path);

// Shortest round-trip decimal formatting, used everywhere output must be
// reproducible byte for byte.
std::string format_double(double v);

}  // namespace mdirl
