#include "mdirl/record.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mdirl {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "t,eta,d_agent_expert,d_ref_expert,regret,clamped_flag\n";
  for (const auto& r : records) {
    os << r.t << ',' << format_double(r.eta) << ',' << format_double(r.d_agent_expert)
       << ',' << format_double(r.d_ref_expert) << ',' << format_double(r.regret) << ','
       << (r.clamped ? 1 : 0) << '\n';
  }
  return os.str();
}

void write_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << records_to_csv(records);
}

std::vector<RunRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty CSV: " + path);
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string tok;
    RunRecord r;
    std::getline(is, tok, ',');
    r.t = std::stoi(tok);
    std::getline(is, tok, ',');
    r.eta = std::stod(tok);
    std::getline(is, tok, ',');
    r.d_agent_expert = std::stod(tok);
    std::getline(is, tok, ',');
    r.d_ref_expert = std::stod(tok);
    std::getline(is, tok, ',');
    r.regret = std::stod(tok);
    std::getline(is, tok, ',');
    r.clamped = tok == "1";
    records.push_back(r);
  }
  return records;
}

}  // namespace mdirl
