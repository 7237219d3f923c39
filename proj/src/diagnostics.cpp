#include "mdirl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdirl {

namespace {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LinearFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ymean = sy / n;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double pred = fit.slope * xs[i] + fit.intercept;
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double window_mean(const std::vector<double>& s, size_t begin, size_t end) {
  double acc = 0.0;
  for (size_t i = begin; i < end; ++i) acc += s[i];
  return acc / static_cast<double>(end - begin);
}

}  // namespace

DiagnosticReport convergence_diagnostics(const std::vector<double>& series,
                                         DiagnosticMode mode,
                                         const DiagnosticOptions& opts) {
  if (series.size() < 50)
    throw std::invalid_argument("convergence_diagnostics: need at least 50 records");
  const size_t T = series.size();
  DiagnosticReport rep;
  rep.mode = mode;
  rep.initial_value = series.front();
  const size_t win = std::max<size_t>(1, static_cast<size_t>(opts.final_window * T));
  rep.final_mean = window_mean(series, T - win, T);
  std::ostringstream msg;

  switch (mode) {
    case DiagnosticMode::theorem2: {
      std::vector<double> xs, ys;
      rep.ratio_min = 1e300;
      rep.ratio_max = -1e300;
      for (size_t t = 0; t < T; ++t) {
        if (series[t] > opts.series_floor) {
          xs.push_back(static_cast<double>(t + 1));
          ys.push_back(std::log(series[t]));
          if (t + 1 < T && series[t + 1] > opts.series_floor) {
            const double ratio = series[t + 1] / series[t];
            rep.ratio_min = std::min(rep.ratio_min, ratio);
            rep.ratio_max = std::max(rep.ratio_max, ratio);
          }
        }
      }
      if (xs.size() < 3) {
        rep.pass = false;
        rep.message = "theorem2: series decayed below the floor too quickly to fit";
        return rep;
      }
      const LinearFit fit = least_squares(xs, ys);
      rep.slope = fit.slope;
      rep.r_squared = fit.r_squared;
      rep.pass = fit.r_squared > opts.r2_min && rep.ratio_min > opts.ratio_lo &&
                 rep.ratio_max < opts.ratio_hi;
      msg << "theorem2: slope=" << fit.slope << " R2=" << fit.r_squared
          << " ratio in [" << rep.ratio_min << ", " << rep.ratio_max << "] over "
          << xs.size() << " points";
      break;
    }
    case DiagnosticMode::theorem1b: {
      // boundedness of t * A_t: compare sups over the two halves
      const size_t half = T / 2;
      double sup_early = 0.0, sup_late = 0.0;
      for (size_t t = 0; t < T; ++t) {
        const double v = (t + 1.0) * series[t];
        (t < half ? sup_early : sup_late) = std::max(t < half ? sup_early : sup_late, v);
      }
      rep.sup_early = sup_early;
      rep.sup_late = sup_late;
      rep.pass = sup_late <= opts.bound_factor * sup_early;
      msg << "theorem1b: sup t*A_t early=" << sup_early << " late=" << sup_late
          << " (factor " << opts.bound_factor << ")";
      break;
    }
    case DiagnosticMode::proposition1: {
      rep.pass = rep.final_mean < opts.convergence_ratio * rep.initial_value;
      msg << "proposition1: final-window mean=" << rep.final_mean << " vs "
          << opts.convergence_ratio << " * initial=" << rep.initial_value;
      break;
    }
    case DiagnosticMode::theorem1a: {
      rep.pass = rep.final_mean > opts.stall_ratio * rep.initial_value;
      msg << "theorem1a: final-window mean=" << rep.final_mean
          << " stalls above " << opts.stall_ratio << " * initial=" << rep.initial_value;
      break;
    }
  }
  rep.message = msg.str();
  return rep;
}

DiagnosticReport convergence_diagnostics(const std::vector<RunRecord>& records,
                                         DiagnosticMode mode, const std::string& field,
                                         const DiagnosticOptions& opts) {
  std::vector<double> series;
  series.reserve(records.size());
  for (const auto& r : records) {
    if (field == "d_agent_expert")
      series.push_back(r.d_agent_expert);
    else if (field == "d_ref_expert")
      series.push_back(r.d_ref_expert);
    else if (field == "regret")
      series.push_back(r.regret);
    else {
      const auto it = r.aux.find(field);
      if (it == r.aux.end())
        throw std::invalid_argument("convergence_diagnostics: unknown field " + field);
      series.push_back(it->second);
    }
  }
  return convergence_diagnostics(series, mode, opts);
}

}  // namespace mdirl
