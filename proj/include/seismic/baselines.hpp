#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "seismic/cascade.hpp"
#include "seismic/predictor.hpp"

namespace seismic {

// ---------------------------------------------------------------------------
// Time-series log regression, fixed unit slope:  log R_inf = alpha_t + log R_t.
// One multiplicative constant per prediction time, shared by every cascade.

struct LrModel {
  double t;               // prediction time [s]
  double log_multiplier;  // alpha_t
  std::size_t n_train;
};

inline LrModel fit_lr(std::span<const LabeledCascade> training, double t) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const LabeledCascade& lc : training) {
    const double r_t = static_cast<double>(reshare_count(lc.cascade, t));
    if (r_t < 1.0 || lc.r_inf < 1.0) continue;  // log-defined only
    sum += std::log(lc.r_inf) - std::log(r_t);
    ++n;
  }
  if (n == 0) throw fit_error("fit_lr: no usable training cascades at t=" +
                              std::to_string(t));
  return {t, sum / static_cast<double>(n), n};
}

inline double predict_lr(const LrModel& model, const Cascade& c, double t) {
  return std::exp(model.log_multiplier) *
         static_cast<double>(reshare_count(c, t));
}

// ---------------------------------------------------------------------------
// Log regression with degree features:
//   log R_inf = a + b1 log R_t + b2 log N_t + b3 log n0.

struct LrdModel {
  double t;
  std::array<double, 4> beta;  // intercept, log R_t, log N_t, log n0
  std::size_t n_train;
};

namespace detail {

inline const char* lrd_column_name(std::size_t j) {
  static const char* names[] = {"intercept", "log_r_t", "log_n_t", "log_n0"};
  return names[j];
}

// Ordinary least squares via modified Gram-Schmidt; reports the first
// column that is (numerically) a combination of the previous ones.
template <std::size_t K>
std::array<double, K> ols(std::vector<std::array<double, K>>& rows,
                          std::vector<double>& y,
                          const char* (*column_name)(std::size_t)) {
  const std::size_t n = rows.size();
  std::vector<std::vector<double>> q(K, std::vector<double>(n));
  std::array<std::array<double, K>, K> r{};
  for (std::size_t j = 0; j < K; ++j) {
    std::vector<double>& v = q[j];
    double norm0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = rows[i][j];
      norm0 += v[i] * v[i];
    }
    norm0 = std::sqrt(norm0);
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += q[k][i] * v[i];
      r[k][j] = dot;
      for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q[k][i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += v[i] * v[i];
    norm = std::sqrt(norm);
    if (!(norm > 1e-10 * std::max(norm0, 1.0)))
      throw fit_error(std::string("rank-deficient design: column '") +
                      column_name(j) + "' adds no information");
    r[j][j] = norm;
    for (std::size_t i = 0; i < n; ++i) v[i] /= norm;
  }
  std::array<double, K> qty{};
  for (std::size_t j = 0; j < K; ++j)
    for (std::size_t i = 0; i < n; ++i) qty[j] += q[j][i] * y[i];
  std::array<double, K> beta{};
  for (std::size_t jj = K; jj-- > 0;) {
    double v = qty[jj];
    for (std::size_t k = jj + 1; k < K; ++k) v -= r[jj][k] * beta[k];
    beta[jj] = v / r[jj][jj];
  }
  return beta;
}

}  // namespace detail

inline LrdModel fit_lr_d(std::span<const LabeledCascade> training, double t) {
  std::vector<std::array<double, 4>> rows;
  std::vector<double> y;
  for (const LabeledCascade& lc : training) {
    const double r_t = static_cast<double>(reshare_count(lc.cascade, t));
    double n_t = 0.0;
    for (std::size_t i = 0; i < events_by(lc.cascade, t); ++i)
      n_t += static_cast<double>(lc.cascade.events[i].degree);
    const double n0 = static_cast<double>(lc.cascade.events.front().degree);
    if (r_t < 1.0 || n_t < 1.0 || n0 < 1.0 || lc.r_inf < 1.0) continue;
    rows.push_back({1.0, std::log(r_t), std::log(n_t), std::log(n0)});
    y.push_back(std::log(lc.r_inf));
  }
  if (rows.size() < 4)
    throw fit_error("fit_lr_d: need at least 4 usable training cascades at t=" +
                    std::to_string(t));
  LrdModel model{t, detail::ols<4>(rows, y, detail::lrd_column_name),
                 rows.size()};
  return model;
}

inline double predict_lr_d(const LrdModel& model, const Cascade& c, double t) {
  const double r_t = static_cast<double>(reshare_count(c, t));
  double n_t = 0.0;
  for (std::size_t i = 0; i < events_by(c, t); ++i)
    n_t += static_cast<double>(c.events[i].degree);
  const double n0 = static_cast<double>(c.events.front().degree);
  if (r_t < 1.0 || n_t < 1.0 || n0 < 1.0)
    throw no_prediction_error("predict_lr_d: zero feature");
  return std::exp(model.beta[0] + model.beta[1] * std::log(r_t) +
                  model.beta[2] * std::log(n_t) + model.beta[3] * std::log(n0));
}

// ---------------------------------------------------------------------------
// Dynamic Poisson model: a per-cascade power-law decay of the binned reshare
// rate after its peak,  lambda_s = lambda_peak (s - t_peak)^gamma.  A finite
// tail integral needs gamma < -1; otherwise the peak is moved to the
// second-maximum bin and the fit retried once.

struct DpmFit {
  double bin_width;
  double t_peak;       // bin start [s]
  double lambda_peak;  // rate scale [1/s]
  double gamma;
};

namespace detail {

struct BinnedCounts {
  std::vector<std::uint64_t> counts;  // complete bins only
};

inline BinnedCounts dpm_bins(const Cascade& c, double t, double bin_width) {
  const std::size_t n_bins = static_cast<std::size_t>(t / bin_width);
  BinnedCounts out;
  out.counts.assign(n_bins, 0);
  for (std::size_t i = 1; i < c.events.size(); ++i) {
    const double ti = c.events[i].time;
    if (ti > t) break;
    const std::size_t k = static_cast<std::size_t>(ti / bin_width);
    if (k < n_bins) ++out.counts[k];
  }
  return out;
}

}  // namespace detail

inline DpmFit fit_dpm(const Cascade& c, double t, double bin_width = 300.0) {
  if (!(bin_width > 0.0)) throw domain_error("fit_dpm: bin width must be > 0");
  if (!(t > 0.0)) throw domain_error("fit_dpm: t must be positive");
  const auto bins = detail::dpm_bins(c, t, bin_width);

  // candidate peaks: maximum bin, then the second maximum
  std::vector<std::size_t> nonempty;
  for (std::size_t k = 0; k < bins.counts.size(); ++k)
    if (bins.counts[k] > 0) nonempty.push_back(k);
  std::stable_sort(nonempty.begin(), nonempty.end(),
                   [&](std::size_t a, std::size_t b) {
                     return bins.counts[a] > bins.counts[b];
                   });

  const std::size_t n_candidates = std::min<std::size_t>(2, nonempty.size());
  for (std::size_t ci = 0; ci < n_candidates; ++ci) {
    const std::size_t peak = nonempty[ci];
    std::vector<double> xs, ys;
    for (std::size_t k = peak + 1; k < bins.counts.size(); ++k) {
      if (bins.counts[k] == 0) continue;
      xs.push_back(std::log(static_cast<double>(k - peak) * bin_width));
      ys.push_back(std::log(static_cast<double>(bins.counts[k])));
    }
    if (xs.size() < 2) continue;

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double gamma = sxy / sxx;
    if (!(gamma < -1.0)) continue;  // divergent tail, retry with next peak
    const double intercept = my - gamma * mx;
    return {bin_width, static_cast<double>(peak) * bin_width,
            std::exp(intercept) / bin_width, gamma};
  }
  throw no_prediction_error("dpm: no feasible power-law decay (gamma < -1) "
                            "found at t=" + std::to_string(t));
}

inline Prediction predict_dpm(const Cascade& c, double t,
                              double bin_width = 300.0) {
  const DpmFit fit = fit_dpm(c, t, bin_width);
  const double r_t = static_cast<double>(reshare_count(c, t));
  const double tail = fit.lambda_peak *
                      std::pow(t - fit.t_peak, fit.gamma + 1.0) /
                      (-(fit.gamma + 1.0));
  Prediction out{t, CascadeState::subcritical, r_t + tail,
                 std::numeric_limits<double>::quiet_NaN(),
                 reshare_count(c, t),
                 std::numeric_limits<double>::quiet_NaN()};
  return out;
}

// ---------------------------------------------------------------------------

// The do-nothing predictor: report what has been observed so far.
inline double predict_observed(const Cascade& c, double t) {
  return static_cast<double>(reshare_count(c, t));
}

// Reinforced Poisson model placeholder.  The reinforcement function
// r_alpha(R_t) comes from Gao, Ma & Chen (2015), "Modeling and predicting
// retweeting dynamics on microblogging platforms"; it is not reproduced here.
inline double predict_rpm(const Cascade&, double) {
  throw not_implemented_error(
      "RPM is not implemented: its reinforcement function r_alpha is defined "
      "in Gao, Ma & Chen (2015); use seismic, lr, lr-d, dpm or observed");
}

// ---------------------------------------------------------------------------
// Versioned plain-text serialization of fitted per-time models, reusable by
// the evaluation harness.

inline void save_models(std::ostream& out, std::span<const LrModel> lr,
                        std::span<const LrdModel> lrd) {
  out << "# seismic-models v1\n";
  out << "# lr <t_seconds> <alpha> | lrd <t_seconds> <a> <b1> <b2> <b3>\n";
  char buf[256];
  for (const LrModel& m : lr) {
    std::snprintf(buf, sizeof buf, "lr %.17g %.17g\n", m.t, m.log_multiplier);
    out << buf;
  }
  for (const LrdModel& m : lrd) {
    std::snprintf(buf, sizeof buf, "lrd %.17g %.17g %.17g %.17g %.17g\n", m.t,
                  m.beta[0], m.beta[1], m.beta[2], m.beta[3]);
    out << buf;
  }
}

struct ModelTable {
  std::vector<LrModel> lr;
  std::vector<LrdModel> lrd;
};

inline ModelTable load_models(std::istream& in) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line) || line != "# seismic-models v1")
    throw parse_error("model table: missing version header", 1);
  ++line_no;
  ModelTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "lr") {
      LrModel m{0, 0, 0};
      if (!(ls >> m.t >> m.log_multiplier))
        throw parse_error("model table: bad lr row", line_no);
      table.lr.push_back(m);
    } else if (kind == "lrd") {
      LrdModel m{0, {}, 0};
      if (!(ls >> m.t >> m.beta[0] >> m.beta[1] >> m.beta[2] >> m.beta[3]))
        throw parse_error("model table: bad lrd row", line_no);
      table.lrd.push_back(m);
    } else {
      throw parse_error("model table: unknown row kind '" + kind + "'",
                        line_no);
    }
  }
  return table;
}

}  // namespace seismic
