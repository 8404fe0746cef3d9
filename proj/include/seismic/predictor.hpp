#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "seismic/estimator.hpp"

namespace seismic {

struct AlphaPoint {
  double time;   // seconds
  double alpha;  // in (0, 1]
};

// The stock schedule shipped with the library (times originally in minutes).
inline std::vector<AlphaPoint> default_alpha_schedule() {
  return {{300, 0.389},  {600, 0.803},   {900, 0.772},  {1200, 0.709},
          {1800, 0.680}, {3600, 0.562},  {7200, 0.454}, {10800, 0.378},
          {14400, 0.352}, {21600, 0.326}};
}

// Network-wide prediction constants.  Only the product gamma_t * n_star is
// identifiable, so it is stored as one number.
struct PredictionParams {
  double n_star = 100.0;       // mean out-degree
  double gamma_n_star = 20.0;  // gamma_t * n_star, constant over t
  std::vector<AlphaPoint> alpha_schedule = default_alpha_schedule();

  void validate() const {
    if (!(n_star > 0.0)) throw config_error("prediction: n_star must be > 0");
    if (!(gamma_n_star >= 0.0))
      throw config_error("prediction: gamma_n_star must be >= 0");
    for (std::size_t i = 0; i < alpha_schedule.size(); ++i) {
      const AlphaPoint& p = alpha_schedule[i];
      if (!(p.alpha > 0.0) || !(p.alpha <= 1.0))
        throw config_error("prediction: alpha values must lie in (0, 1]");
      if (i > 0 && !(p.time > alpha_schedule[i - 1].time))
        throw config_error("prediction: alpha schedule times must increase");
    }
  }
};

// Schedule lookup: piecewise-linear between listed times, clamped to the
// nearest endpoint outside the listed range.
inline double alpha_at(double t, const PredictionParams& params) {
  if (!(t > 0.0)) throw domain_error("alpha_at: t must be positive");
  const auto& sch = params.alpha_schedule;
  if (sch.empty()) throw config_error("alpha_at: empty alpha schedule");
  if (t <= sch.front().time) return sch.front().alpha;
  if (t >= sch.back().time) return sch.back().alpha;
  for (std::size_t i = 1; i < sch.size(); ++i) {
    if (t <= sch[i].time) {
      const double w = (t - sch[i - 1].time) / (sch[i].time - sch[i - 1].time);
      return sch[i - 1].alpha + w * (sch[i].alpha - sch[i - 1].alpha);
    }
  }
  return sch.back().alpha;
}

enum class CascadeState { subcritical, supercritical };

// Corrected final-size arithmetic shared by predict() and the alpha
// calibration scan.  Empty when the corrected denominator is not positive,
// i.e. the cascade is classified supercritical.
inline std::optional<double> corrected_r_inf(double r_t, double p_hat,
                                             double gap, double alpha,
                                             double gamma_n_star) {
  const double denom = 1.0 - gamma_n_star * p_hat;
  if (denom <= 0.0) return std::nullopt;
  return r_t + alpha * p_hat * gap / denom;
}

// A final-size prediction at one observation time.  r_inf_hat is only
// meaningful in the subcritical state; a supercritical cascade is still in
// its explosive phase and has no finite expected size.
struct Prediction {
  double observe_time;
  CascadeState state;
  double r_inf_hat;     // >= r_t when subcritical
  double p_hat;
  std::uint64_t r_t;
  double exposure_gap;  // N_t - N_t^e: followers exposed but not yet reacted
};

// Branching-process expectation of the final size given stats at time t and
// a constant future infectiousness p:
//   E[R_inf] = R_t + p (N_t - N_t^e) / (1 - p n_star)     if p n_star < 1
// and infinite (supercritical) once p reaches the critical value 1/n_star.
inline Prediction predict_uncorrected(const CascadeStats& stats, double p,
                                      double n_star) {
  if (!(p >= 0.0)) throw domain_error("predict_uncorrected: negative p");
  if (!(n_star > 0.0)) throw domain_error("predict_uncorrected: n_star must be > 0");
  const double gap =
      static_cast<double>(stats.n_t) - stats.n_t_effective;
  Prediction out{stats.observe_time, CascadeState::subcritical,
                 0.0, p, stats.r_t, gap};
  if (p * n_star >= 1.0) {
    out.state = CascadeState::supercritical;
    out.r_inf_hat = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.r_inf_hat =
      static_cast<double>(stats.r_t) + p * gap / (1.0 - p * n_star);
  return out;
}

// The production predictor: weighted infectiousness estimate plus the
// calibrated correction
//   R_hat = R_t + alpha_t * p_hat (N_t - N_t^e) / (1 - gamma_n_star * p_hat).
// alpha_t shrinks the future generation sizes as content goes stale;
// gamma_n_star absorbs follower overlap.  Whole pass is O(R_t).
inline Prediction predict(const Cascade& c, double t,
                          const MemoryKernelParams& kernel,
                          const PredictionParams& params) {
  const double alpha = alpha_at(t, params);
  const InfectiousnessEstimate est = infectiousness_weighted(c, t, kernel);
  const CascadeStats stats = cascade_stats(c, t, kernel);
  const double gap = static_cast<double>(stats.n_t) - stats.n_t_effective;
  Prediction out{t, CascadeState::subcritical, 0.0, est.p_hat, stats.r_t, gap};
  const auto r_inf = corrected_r_inf(static_cast<double>(stats.r_t), est.p_hat,
                                     gap, alpha, params.gamma_n_star);
  if (!r_inf) {
    out.state = CascadeState::supercritical;
    out.r_inf_hat = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.r_inf_hat = *r_inf;
  return out;
}

}  // namespace seismic
