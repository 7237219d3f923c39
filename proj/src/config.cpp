#include "mdirl/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mdirl/record.hpp"
#include "mdirl/regularizer.hpp"
#include "mdirl/schedule.hpp"

namespace mdirl {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::bandit: return "bandit";
    case ExperimentKind::gaussian_toy: return "gaussian_toy";
    case ExperimentKind::mdp: return "mdp";
    case ExperimentKind::schedule_sweep: return "schedule_sweep";
    case ExperimentKind::verify: return "verify";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "bandit") return ExperimentKind::bandit;
  if (s == "gaussian_toy") return ExperimentKind::gaussian_toy;
  if (s == "mdp") return ExperimentKind::mdp;
  if (s == "schedule_sweep") return ExperimentKind::schedule_sweep;
  if (s == "verify") return ExperimentKind::verify;
  throw std::invalid_argument("config error at experiment.kind: unknown experiment '" +
                              s + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

std::vector<std::pair<double, double>> parse_grid(const std::string& s) {
  // cells separated by ';', each "eta1,etaT"
  std::vector<std::pair<double, double>> out;
  std::istringstream is(s);
  std::string cell;
  while (std::getline(is, cell, ';')) {
    cell = trim(cell);
    if (cell.empty()) continue;
    const auto comma = cell.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("config error at schedule_sweep.grid: bad cell '" +
                                  cell + "'");
    out.emplace_back(std::stod(cell.substr(0, comma)), std::stod(cell.substr(comma + 1)));
  }
  return out;
}

[[noreturn]] void fail(const std::string& section, const std::string& key,
                       const std::string& why) {
  throw std::invalid_argument("config error at " + section + "." + key + ": " + why);
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ExperimentKind::bandit:
      cfg.schedule = "linear_alpha:0.5,2,2000";
      cfg.total_steps = 2000;
      cfg.seeds = {1, 2, 3, 4, 5};
      cfg.gamma = 0.0;
      cfg.reference_lr = 0.2;
      break;
    case ExperimentKind::gaussian_toy:
      cfg.schedule = "constant:0.2";
      cfg.total_steps = 100;
      cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      cfg.reference_lr = 0.5;
      break;
    case ExperimentKind::mdp:
      cfg.schedule = "harmonic:4";
      cfg.total_steps = 300;
      cfg.seeds = {1, 2, 3, 4, 5};
      cfg.gamma = 0.9;
      cfg.reference_lr = 0.3;
      break;
    case ExperimentKind::schedule_sweep:
      cfg.schedule = "constant:0.2";  // unused; cells define schedules
      cfg.total_steps = 100;
      cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      cfg.reference_lr = 0.5;
      break;
    case ExperimentKind::verify:
      cfg.seeds = {1};
      break;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line, section;
  ExperimentConfig cfg;
  bool kind_seen = false;
  std::vector<std::pair<std::string, std::pair<std::string, std::string>>> pairs;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config error at " + section + ": expected key = value, got '" +
                                  line + "'");
    pairs.push_back({section, {trim(line.substr(0, eq)), trim(line.substr(eq + 1))}});
  }
  // first pass: experiment kind decides defaults
  for (const auto& [sec, kv] : pairs) {
    if (sec == "experiment" && kv.first == "kind") {
      cfg = defaults(experiment_kind_from_string(kv.second));
      kind_seen = true;
    }
  }
  if (!kind_seen) fail("experiment", "kind", "missing");
  for (const auto& [sec, kv] : pairs) {
    const auto& [key, value] = kv;
    try {
      if (sec == "experiment") {
        if (key == "kind") continue;
        else if (key == "regularizer") cfg.regularizer = value;
        else if (key == "schedule") cfg.schedule = value;
        else if (key == "seeds") cfg.seeds = parse_int_list(value);
        else if (key == "total_steps") cfg.total_steps = std::stoi(value);
        else if (key == "samples_per_round") cfg.samples_per_round = std::stoi(value);
        else if (key == "lambda") cfg.lambda = std::stod(value);
        else if (key == "gamma") cfg.gamma = std::stod(value);
        else if (key == "noise_epsilon") cfg.noise_epsilon = std::stod(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "reference_lr") cfg.reference_lr = std::stod(value);
        else fail(sec, key, "unknown key");
      } else if (sec == "bandit") {
        if (key == "num_actions") cfg.num_actions = std::stoi(value);
        else if (key == "smoothing") cfg.smoothing = std::stod(value);
        else if (key == "logit_scale") cfg.logit_scale = std::stod(value);
        else fail(sec, key, "unknown key");
      } else if (sec == "mdp") {
        if (key == "grid_side") cfg.grid_side = std::stoi(value);
        else if (key == "slip") cfg.slip = std::stod(value);
        else if (key == "mix_ratio") cfg.mix_ratio = std::stod(value);
        else fail(sec, key, "unknown key");
      } else if (sec == "schedule_sweep") {
        if (key == "grid") cfg.sweep_grid = parse_grid(value);
        else fail(sec, key, "unknown key");
      } else if (sec == "gaussian_toy" || sec == "verify") {
        fail(sec, key, "unknown key");
      } else {
        fail(sec, key, "unknown section");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      fail(sec, key, std::string("bad value '") + value + "' (" + e.what() + ")");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config error at file: cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "kind = " << mdirl::to_string(kind) << "\n";
  os << "regularizer = " << regularizer << "\n";
  os << "schedule = " << schedule << "\n";
  os << "seeds = ";
  for (size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : "") << seeds[i];
  os << "\n";
  os << "total_steps = " << total_steps << "\n";
  os << "samples_per_round = " << samples_per_round << "\n";
  os << "lambda = " << format_double(lambda) << "\n";
  os << "gamma = " << format_double(gamma) << "\n";
  os << "noise_epsilon = " << format_double(noise_epsilon) << "\n";
  os << "output_dir = " << output_dir << "\n";
  os << "reference_lr = " << format_double(reference_lr) << "\n";
  if (kind == ExperimentKind::bandit) {
    os << "\n[bandit]\n";
    os << "num_actions = " << num_actions << "\n";
    os << "smoothing = " << format_double(smoothing) << "\n";
    os << "logit_scale = " << format_double(logit_scale) << "\n";
  } else if (kind == ExperimentKind::mdp) {
    os << "\n[mdp]\n";
    os << "grid_side = " << grid_side << "\n";
    os << "slip = " << format_double(slip) << "\n";
    os << "mix_ratio = " << format_double(mix_ratio) << "\n";
  } else if (kind == ExperimentKind::schedule_sweep) {
    os << "\n[schedule_sweep]\n";
    os << "grid = ";
    for (size_t i = 0; i < sweep_grid.size(); ++i) {
      os << (i ? ";" : "") << format_double(sweep_grid[i].first) << ","
         << format_double(sweep_grid[i].second);
    }
    os << "\n";
  }
  return os.str();
}

void ExperimentConfig::validate() const {
  if (total_steps < 1) fail("experiment", "total_steps", "must be >= 1");
  if (seeds.empty()) fail("experiment", "seeds", "must be nonempty");
  if (samples_per_round < 1) fail("experiment", "samples_per_round", "must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("experiment", "gamma", "must be in [0, 1)");
  if (noise_epsilon < 0.0) fail("experiment", "noise_epsilon", "must be >= 0");
  if (!(lambda > 0.0)) fail("experiment", "lambda", "must be > 0");
  if (!(reference_lr >= 0.0 && reference_lr <= 1.0))
    fail("experiment", "reference_lr", "must be in [0, 1]");
  try {
    Regularizer::parse(regularizer);
  } catch (const std::exception& e) {
    fail("experiment", "regularizer", e.what());
  }
  if (kind != ExperimentKind::verify && kind != ExperimentKind::schedule_sweep) {
    try {
      StepSchedule::parse(schedule);
    } catch (const std::exception& e) {
      fail("experiment", "schedule", e.what());
    }
  }
  if (kind == ExperimentKind::bandit && num_actions < 2)
    fail("bandit", "num_actions", "must be >= 2");
  if (kind == ExperimentKind::mdp && grid_side < 2)
    fail("mdp", "grid_side", "must be >= 2");
  if (kind == ExperimentKind::mdp && !(mix_ratio >= 0.0 && mix_ratio <= 1.0))
    fail("mdp", "mix_ratio", "must be in [0, 1]");
  if (kind == ExperimentKind::schedule_sweep && sweep_grid.empty())
    fail("schedule_sweep", "grid", "must be nonempty");
}

}  // namespace mdirl
