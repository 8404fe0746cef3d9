#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "seismic/errors.hpp"

namespace seismic {

// Human reaction-time memory kernel: the density of the delay between a
// post arriving in a feed and the reshare it triggers.
//
//   phi(s) = c                     0 < s <= s0   (plateau)
//   phi(s) = c * (s/s0)^-(1+theta)     s > s0    (power-law tail)
//
// phi integrates to 1, which pins c = theta / (s0 * (1 + theta)).  The
// kernel is network-wide: fit once, reuse for every cascade.
struct MemoryKernelParams {
  double s0;     // plateau cutoff [s]
  double theta;  // tail decay exponent, > 0
  double c;      // plateau height [1/s], fixed by the normalization above

  // Derives c from (s0, theta).  This is the only way c is ever produced.
  static MemoryKernelParams from_shape(double s0, double theta) {
    if (!(s0 > 0.0) || !(theta > 0.0))
      throw domain_error("memory kernel requires s0 > 0 and theta > 0");
    return {s0, theta, theta / (s0 * (1.0 + theta))};
  }

  // Accepts an externally supplied c only if it agrees with the
  // normalization constraint; c is then replaced by the exact value so the
  // probabilistic identities downstream hold without slack.
  static MemoryKernelParams from_values(double s0, double theta, double c) {
    MemoryKernelParams k = from_shape(s0, theta);
    if (!(c > 0.0) || std::abs(c - k.c) > 1e-6 * k.c)
      throw config_error("kernel height c=" + std::to_string(c) +
                         " violates normalization (expected " +
                         std::to_string(k.c) + ")");
    return k;
  }
};

// Reaction-time density at delay s.
inline double phi(double s, const MemoryKernelParams& k) {
  if (!(s > 0.0)) throw domain_error("phi: reaction time must be positive");
  if (s <= k.s0) return k.c;
  return k.c * std::pow(s / k.s0, -(1.0 + k.theta));
}

// Probability mass on (0, t]:  Phi(t) = int_0^t phi(s) ds.
// Monotone, Phi(0) = 0, Phi(inf) = 1.
inline double phi_integral(double t, const MemoryKernelParams& k) {
  if (t < 0.0) throw domain_error("phi_integral: negative time");
  if (t <= k.s0) return k.c * t;
  return k.c * k.s0 +
         (k.c * k.s0 / k.theta) * (1.0 - std::pow(t / k.s0, -k.theta));
}

// Inverse of phi_integral on (0, 1): the delay below which a fraction q of
// reaction times fall.  Handy for sampling delays by inversion.
inline double phi_quantile(double q, const MemoryKernelParams& k) {
  if (!(q > 0.0) || !(q < 1.0))
    throw domain_error("phi_quantile: q must lie in (0, 1)");
  const double plateau_mass = k.c * k.s0;
  if (q <= plateau_mass) return q / k.c;
  // q = c*s0 + (c*s0/theta) * (1 - x^-theta)  with  x = t/s0
  const double r = 1.0 - (q - plateau_mass) * k.theta / plateau_mass;
  return k.s0 * std::pow(r, -1.0 / k.theta);
}

// One-sided triangular weighting kernel with window t/2:
//   K_t(s) = max(1 - 2s/t, 0).
// Recent reshares get weight near 1; anything older than t/2 is dropped.
inline double triangular_weight(double s, double t) {
  if (!(t > 0.0)) throw domain_error("triangular_weight: window must be positive");
  if (s < 0.0) throw domain_error("triangular_weight: negative lag");
  const double w = 1.0 - 2.0 * s / t;
  return w > 0.0 ? w : 0.0;
}

enum class WeightMode { triangular, flat };

namespace detail {

// int (a + b*u) du over [lo, hi]
inline double linear_piece(double a, double b, double lo, double hi) {
  return a * (hi - lo) + 0.5 * b * (hi * hi - lo * lo);
}

// int (a + b*u) * (u/s0)^-(1+theta) du over [lo, hi], 0 < lo <= hi
inline double power_piece(double a, double b, double lo, double hi,
                          double s0, double theta) {
  const double scale = std::pow(s0, 1.0 + theta);
  double term_a, term_b;
  term_a = (std::pow(lo, -theta) - std::pow(hi, -theta)) / theta;
  if (theta == 1.0) {
    term_b = std::log(hi / lo);
  } else {
    term_b = (std::pow(hi, 1.0 - theta) - std::pow(lo, 1.0 - theta)) /
             (1.0 - theta);
  }
  return scale * (a * term_a + b * term_b);
}

}  // namespace detail

// Closed form of  int_{t_i}^{t} K_t(t - s) * phi(s - t_i) ds,
// the triangular-weighted exposure mass of an event at t_i seen at time t.
// Substituting u = s - t_i the weight becomes (A + B*u) with A = 1 - 2*tau/t,
// B = 2/t, tau = t - t_i, supported on u > tau - t/2.  The integrand is then
// piecewise (linear) x (constant or power), assembled over the breakpoints
// {max(0, tau - t/2), s0, tau} that fall inside the window.
inline double weighted_phi_integral(double t, double t_i,
                                    const MemoryKernelParams& k,
                                    WeightMode mode = WeightMode::triangular) {
  if (!(t > 0.0)) throw domain_error("weighted_phi_integral: t must be positive");
  if (t_i < 0.0 || t_i > t)
    throw domain_error("weighted_phi_integral: need 0 <= t_i <= t");
  const double tau = t - t_i;
  if (mode == WeightMode::flat) return phi_integral(tau, k);
  if (tau == 0.0) return 0.0;

  const double lo = std::max(0.0, tau - 0.5 * t);
  const double a = 1.0 - 2.0 * tau / t;
  const double b = 2.0 / t;

  double total = 0.0;
  if (lo < k.s0) {
    const double hi = std::min(tau, k.s0);
    if (hi > lo) total += k.c * detail::linear_piece(a, b, lo, hi);
  }
  if (tau > k.s0) {
    const double plo = std::max(lo, k.s0);
    if (tau > plo)
      total += k.c * detail::power_piece(a, b, plo, tau, k.s0, k.theta);
  }
  // Clamp the tiny negative values cancellation can produce at the window edge.
  return total > 0.0 ? total : 0.0;
}

}  // namespace seismic
