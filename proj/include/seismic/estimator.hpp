#pragma once

#include <cstdint>

#include "seismic/cascade.hpp"
#include "seismic/kernel.hpp"

namespace seismic {

// Summary statistics of a cascade observed up to a given time.
//   r_t             reshares so far (originator excluded)
//   n_t             cumulative degree of all posters, originator included
//   n_t_effective   sum_i n_i * Phi(t - t_i): followers exposed so far,
//                   discounted by the reaction-time mass already elapsed
struct CascadeStats {
  double observe_time;
  std::uint64_t r_t;
  std::uint64_t n_t;
  double n_t_effective;
};

inline CascadeStats cascade_stats(const Cascade& c, double t,
                                  const MemoryKernelParams& k) {
  if (t < 0.0) throw domain_error("cascade_stats: negative observation time");
  CascadeStats s{t, 0, 0, 0.0};
  const std::size_t upto = events_by(c, t);
  for (std::size_t i = 0; i < upto; ++i) {
    const Event& e = c.events[i];
    if (i > 0) ++s.r_t;
    s.n_t += e.degree;
    s.n_t_effective +=
        static_cast<double>(e.degree) * phi_integral(t - e.time, k);
  }
  return s;
}

// An infectiousness estimate with the two sums that produced it.
struct InfectiousnessEstimate {
  double p_hat;
  double observe_time;
  double weighted_count;     // numerator
  double weighted_exposure;  // denominator
};

// Plain maximum-likelihood estimate  p_hat = R_t / N_t^e,  treating the
// infectiousness as constant over the whole history.
inline InfectiousnessEstimate infectiousness_mle(const Cascade& c, double t,
                                                 const MemoryKernelParams& k) {
  if (!(t > 0.0)) throw domain_error("infectiousness_mle: t must be positive");
  const CascadeStats s = cascade_stats(c, t, k);
  if (s.n_t_effective <= 0.0)
    throw undefined_estimate_error(
        "infectiousness_mle: no exposure mass by t=" + std::to_string(t));
  const double count = static_cast<double>(s.r_t);
  return {count / s.n_t_effective, t, count, s.n_t_effective};
}

// Locally weighted estimate: both the reshare count and the exposure mass
// are smoothed with the triangular kernel over the most recent t/2 window,
// tracking an infectiousness that drifts over time.  With the flat weight
// mode this reduces to the MLE above, sum for sum.
inline InfectiousnessEstimate infectiousness_weighted(
    const Cascade& c, double t, const MemoryKernelParams& k,
    WeightMode mode = WeightMode::triangular) {
  if (!(t > 0.0))
    throw domain_error("infectiousness_weighted: t must be positive");
  double count = 0.0;
  double exposure = 0.0;
  const std::size_t upto = events_by(c, t);
  for (std::size_t i = 0; i < upto; ++i) {
    const Event& e = c.events[i];
    if (i > 0)
      count += mode == WeightMode::flat ? 1.0 : triangular_weight(t - e.time, t);
    exposure +=
        static_cast<double>(e.degree) * weighted_phi_integral(t, e.time, k, mode);
  }
  if (exposure <= 0.0)
    throw undefined_estimate_error(
        "infectiousness_weighted: zero weighted exposure at t=" +
        std::to_string(t));
  return {count / exposure, t, count, exposure};
}

}  // namespace seismic
