#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "seismic/cascade.hpp"
#include "seismic/estimator.hpp"
#include "seismic/evaluation.hpp"
#include "seismic/kernel.hpp"
#include "seismic/predictor.hpp"

namespace seismic {

// Fits the memory-kernel tail exponent from a sample of reaction delays
// (reshare time minus exposure time).  The plateau cutoff s0 is fixed by the
// caller; theta comes from a least-squares line through the log complementary
// CDF against log(s/s0) over the delays beyond s0, and the plateau height
// from the normalization identity.
inline MemoryKernelParams fit_memory_kernel(std::vector<double> delays,
                                            double s0) {
  if (!(s0 > 0.0)) throw domain_error("fit_memory_kernel: s0 must be > 0");
  if (delays.empty()) throw fit_error("fit_memory_kernel: empty sample");
  for (double d : delays)
    if (!(d > 0.0) || !std::isfinite(d))
      throw domain_error("fit_memory_kernel: delays must be positive");

  std::sort(delays.begin(), delays.end());
  const double n = static_cast<double>(delays.size());
  std::size_t tail = 0;
  for (double d : delays)
    if (d > s0) ++tail;
  if (tail < 100)
    throw fit_error("fit_memory_kernel: need at least 100 delays beyond s0, got " +
                    std::to_string(tail));

  // one point per distinct tail value; ccdf by upper rank, the zero at the
  // maximum dropped
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < delays.size();) {
    std::size_t j = i;
    while (j < delays.size() && delays[j] == delays[i]) ++j;
    const double d = delays[i];
    const double ccdf = static_cast<double>(delays.size() - j) / n;
    if (d > s0 && ccdf > 0.0) {
      xs.push_back(std::log(d / s0));
      ys.push_back(std::log(ccdf));
    }
    i = j;
  }
  if (xs.size() < 2)
    throw fit_error("fit_memory_kernel: tail sample is degenerate");

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
  const double theta = -sxy / sxx;
  if (!(theta > 0.0))
    throw fit_error("fit_memory_kernel: fitted theta <= 0 (no decaying tail)");
  return MemoryKernelParams::from_shape(s0, theta);
}

// Sample mean of all observed out-degrees across the corpus.
inline double estimate_n_star(std::span<const LabeledCascade> corpus) {
  if (corpus.empty()) throw fit_error("estimate_n_star: empty corpus");
  double sum = 0.0;
  std::uint64_t count = 0;
  for (const LabeledCascade& lc : corpus)
    for (const Event& e : lc.cascade.events) {
      sum += static_cast<double>(e.degree);
      ++count;
    }
  return sum / static_cast<double>(count);
}

struct AlphaCalibration {
  std::vector<AlphaPoint> schedule;
  std::vector<double> grid;
  std::vector<std::vector<double>> objective;  // per kept time, per grid point
  std::vector<double> omitted_times;           // no eligible cascades
};

// Per-time grid search for the shrinkage factor alpha_t: the value that
// minimizes the median absolute percentage error over the training corpus,
// ties broken toward the smaller alpha.  Uses the same median as the
// evaluation harness so the two cannot diverge.
inline AlphaCalibration calibrate_alpha(std::span<const LabeledCascade> train,
                                        const std::vector<double>& times,
                                        double gamma_n_star,
                                        const MemoryKernelParams& kernel,
                                        std::uint64_t min_reshares,
                                        double grid_step = 0.01) {
  if (!(grid_step > 0.0) || grid_step > 1.0)
    throw config_error("calibrate_alpha: grid step must be in (0, 1]");
  AlphaCalibration out;
  const std::size_t n_grid =
      static_cast<std::size_t>(std::lround(1.0 / grid_step));
  for (std::size_t k = 1; k <= n_grid; ++k)
    out.grid.push_back(static_cast<double>(k) * grid_step);

  struct Candidate {
    double r_t, p_hat, gap, r_inf;
  };
  for (double t : times) {
    std::vector<Candidate> cands;
    for (const LabeledCascade& lc : train) {
      if (!(lc.r_inf > 0.0)) continue;
      if (reshare_count(lc.cascade, t) < min_reshares) continue;
      try {
        const auto est = infectiousness_weighted(lc.cascade, t, kernel);
        const auto stats = cascade_stats(lc.cascade, t, kernel);
        cands.push_back({static_cast<double>(stats.r_t), est.p_hat,
                         static_cast<double>(stats.n_t) - stats.n_t_effective,
                         lc.r_inf});
      } catch (const undefined_estimate_error&) {
      }
    }
    if (cands.empty()) {
      out.omitted_times.push_back(t);
      continue;
    }

    std::vector<double> trace;
    double best_alpha = out.grid.front();
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<double> apes;
    for (double alpha : out.grid) {
      apes.clear();
      for (const Candidate& c : cands) {
        const auto v =
            corrected_r_inf(c.r_t, c.p_hat, c.gap, alpha, gamma_n_star);
        if (v) apes.push_back(ape(*v, c.r_inf));
      }
      const double obj = apes.empty()
                             ? std::numeric_limits<double>::infinity()
                             : median(apes);
      trace.push_back(obj);
      if (obj < best_obj) {  // strict: ties keep the smaller alpha
        best_obj = obj;
        best_alpha = alpha;
      }
    }
    out.schedule.push_back({t, best_alpha});
    out.objective.push_back(std::move(trace));
  }
  return out;
}

struct CalibrationReport {
  MemoryKernelParams kernel;
  double n_star;
  AlphaCalibration alpha;
};

}  // namespace seismic
