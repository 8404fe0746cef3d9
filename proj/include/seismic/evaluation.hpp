#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "seismic/baselines.hpp"
#include "seismic/cascade.hpp"
#include "seismic/predictor.hpp"

namespace seismic {

// Absolute percentage error of a final-size prediction.
inline double ape(double prediction, double truth) {
  if (!(truth > 0.0)) throw domain_error("ape: truth must be positive");
  return std::abs(prediction - truth) / truth;
}

// Quantile with linear interpolation between order statistics
// (the common plotting default).  q is in percent.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw domain_error("quantile: empty sample");
  if (q < 0.0 || q > 100.0) throw domain_error("quantile: q outside [0, 100]");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * q / 100.0;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= xs.size()) return xs.back();
  const double frac = h - static_cast<double>(lo);
  return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 50.0); }

namespace detail {

// Inversions of ys (strict) counted by merge sort.
inline std::uint64_t count_inversions(std::vector<double>& ys,
                                      std::vector<double>& tmp,
                                      std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = count_inversions(ys, tmp, lo, mid) +
                      count_inversions(ys, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (ys[j] < ys[i]) {
      inv += mid - i;
      tmp[k++] = ys[j++];
    } else {
      tmp[k++] = ys[i++];
    }
  }
  while (i < mid) tmp[k++] = ys[i++];
  while (j < hi) tmp[k++] = ys[j++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, ys.begin() + lo);
  return inv;
}

inline double tied_pairs(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double total = 0.0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= v.size(); ++i) {
    if (i < v.size() && v[i] == v[i - 1]) {
      ++run;
    } else {
      total += 0.5 * static_cast<double>(run) * static_cast<double>(run - 1);
      run = 1;
    }
  }
  return total;
}

}  // namespace detail

// Tie-adjusted Kendall rank correlation (tau-b), computed in O(n log n) by
// Knight's method: sort by (x, y), then discordant pairs are the strict
// inversions of y.  Equals the O(n^2) concordant/discordant definition.
inline double kendall_tau(std::span<const double> xs,
                          std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw domain_error("kendall_tau: length mismatch");
  const std::size_t n = xs.size();
  if (n < 2) throw domain_error("kendall_tau: need at least two observations");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (xs[a] != xs[b]) return xs[a] < xs[b];
    return ys[a] < ys[b];
  });

  double ties_x = 0.0, ties_joint = 0.0;
  std::size_t run_x = 1, run_xy = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    const bool same_x = i < n && xs[idx[i]] == xs[idx[i - 1]];
    const bool same_xy = same_x && ys[idx[i]] == ys[idx[i - 1]];
    if (same_x) {
      ++run_x;
    } else {
      ties_x += 0.5 * static_cast<double>(run_x) * static_cast<double>(run_x - 1);
      run_x = 1;
    }
    if (same_xy) {
      ++run_xy;
    } else {
      ties_joint +=
          0.5 * static_cast<double>(run_xy) * static_cast<double>(run_xy - 1);
      run_xy = 1;
    }
  }

  std::vector<double> y_sorted(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) y_sorted[i] = ys[idx[i]];
  const double ties_y = detail::tied_pairs(y_sorted);
  const double swaps = static_cast<double>(
      detail::count_inversions(y_sorted, tmp, 0, n));

  const double n0 = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  const double denom = std::sqrt((n0 - ties_x) * (n0 - ties_y));
  if (!(denom > 0.0))
    throw domain_error("kendall_tau: undefined for constant input");
  return (n0 - ties_x - ties_y + ties_joint - 2.0 * swaps) / denom;
}

// Fraction of the true top-M entries present in the predicted top-m list.
// Ordering is deterministic: value descending, then id ascending.
inline double breakout_coverage(
    std::vector<std::pair<std::string, double>> predicted,
    std::vector<std::pair<std::string, double>> truth, std::size_t m,
    std::size_t M) {
  if (M == 0) throw domain_error("breakout_coverage: M must be > 0");
  if (truth.size() < M)
    throw domain_error("breakout_coverage: fewer than M ground-truth entries");
  const auto desc = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  const auto check_unique = [](const auto& list, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& [id, value] : list)
      if (!seen.insert(id).second)
        throw domain_error(std::string("breakout_coverage: duplicate id in ") +
                           what);
  };
  check_unique(predicted, "predictions");
  check_unique(truth, "truth");
  std::sort(predicted.begin(), predicted.end(), desc);
  std::sort(truth.begin(), truth.end(), desc);

  std::unordered_set<std::string> top_predicted;
  for (std::size_t i = 0; i < std::min(m, predicted.size()); ++i)
    top_predicted.insert(predicted[i].first);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < M; ++i)
    if (top_predicted.count(truth[i].first)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(M);
}

// ---------------------------------------------------------------------------
// Benchmark harness over a labeled corpus.

enum class Method { seismic, lr, lrd, dpm, observed, rpm };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::seismic: return "seismic";
    case Method::lr: return "lr";
    case Method::lrd: return "lr-d";
    case Method::dpm: return "dpm";
    case Method::observed: return "observed";
    case Method::rpm: return "rpm";
  }
  return "?";
}

inline Method parse_method(const std::string& name) {
  for (Method m : {Method::seismic, Method::lr, Method::lrd, Method::dpm,
                   Method::observed, Method::rpm})
    if (method_name(m) == name) return m;
  throw config_error("unknown method '" + name +
                     "' (expected seismic, lr, lr-d, dpm, observed or rpm)");
}

struct BenchmarkConfig {
  MemoryKernelParams kernel = MemoryKernelParams::from_shape(300.0, 0.242);
  PredictionParams prediction;
  std::uint64_t min_reshares = 50;
  double dpm_bin_width = 300.0;
  std::vector<double> quantiles = {50.0, 75.0, 90.0, 95.0};
  std::size_t coverage_m = 500;
  std::size_t coverage_M = 100;
};

// Metrics for one (method, time) pair.  Quantities that cannot be computed
// (no eligible cascades, constant ranks, corpus smaller than M) stay absent
// rather than being reported as zero.
struct MetricCell {
  std::size_t n_eligible = 0;   // passed the min-reshare gate, truth known
  std::size_t n_predicted = 0;  // produced a finite prediction
  std::map<double, double> ape_quantiles;
  std::optional<double> kendall;
  std::optional<double> coverage;
  std::optional<double> no_prediction_rate;
};

struct EvaluationReport {
  std::vector<double> times;  // seconds
  std::vector<Method> methods;
  std::map<Method, std::vector<MetricCell>> cells;
  std::vector<double> quantiles;
  std::size_t coverage_m = 0;
  std::size_t coverage_M = 0;
};

// Runs every requested method over the test corpus at every time.  LR and
// LR-D are fitted on the training corpus per prediction time; a failed fit
// simply yields no predictions at that time.  Supercritical cascades and
// infeasible fits are counted into no_prediction_rate and excluded from the
// APE quantiles and rank correlation; for the breakout list a supercritical
// flag is treated as an infinite predicted size (the model is explicitly
// calling the cascade explosive), ranked ahead of every finite prediction.
inline EvaluationReport run_benchmark(std::span<const LabeledCascade> train,
                                      std::span<const LabeledCascade> test,
                                      const std::vector<Method>& methods,
                                      const std::vector<double>& times,
                                      const BenchmarkConfig& cfg) {
  EvaluationReport report;
  report.times = times;
  report.methods = methods;
  report.quantiles = cfg.quantiles;
  report.coverage_m = cfg.coverage_m;
  report.coverage_M = cfg.coverage_M;

  std::vector<std::pair<std::string, double>> truth_list;
  for (const LabeledCascade& lc : test)
    truth_list.push_back({lc.cascade.id, lc.r_inf});

  for (Method method : methods) {
    std::vector<MetricCell> row;
    for (double t : times) {
      MetricCell cell;
      std::optional<LrModel> lr_model;
      std::optional<LrdModel> lrd_model;
      try {
        if (method == Method::lr) lr_model = fit_lr(train, t);
        if (method == Method::lrd) lrd_model = fit_lr_d(train, t);
      } catch (const fit_error&) {
        // leave the model empty; every cascade becomes a no-prediction
      }

      std::vector<double> apes;
      std::vector<double> predicted_values, truth_values;
      std::vector<std::pair<std::string, double>> scored;
      for (const LabeledCascade& lc : test) {
        if (!(lc.r_inf > 0.0)) continue;
        if (reshare_count(lc.cascade, t) < cfg.min_reshares) continue;
        ++cell.n_eligible;
        std::optional<double> value;
        bool supercritical = false;
        try {
          switch (method) {
            case Method::seismic: {
              const Prediction p = predict(lc.cascade, t, cfg.kernel,
                                           cfg.prediction);
              if (p.state == CascadeState::supercritical)
                supercritical = true;
              else
                value = p.r_inf_hat;
              break;
            }
            case Method::lr:
              if (lr_model) value = predict_lr(*lr_model, lc.cascade, t);
              break;
            case Method::lrd:
              if (lrd_model) value = predict_lr_d(*lrd_model, lc.cascade, t);
              break;
            case Method::dpm:
              value = predict_dpm(lc.cascade, t, cfg.dpm_bin_width).r_inf_hat;
              break;
            case Method::observed:
              value = predict_observed(lc.cascade, t);
              break;
            case Method::rpm:
              value = predict_rpm(lc.cascade, t);
              break;
          }
        } catch (const no_prediction_error&) {
        } catch (const undefined_estimate_error&) {
        }
        if (value) {
          ++cell.n_predicted;
          apes.push_back(ape(*value, lc.r_inf));
          predicted_values.push_back(*value);
          truth_values.push_back(lc.r_inf);
          scored.push_back({lc.cascade.id, *value});
        } else if (supercritical) {
          scored.push_back(
              {lc.cascade.id, std::numeric_limits<double>::infinity()});
        }
      }

      if (!apes.empty())
        for (double q : cfg.quantiles)
          cell.ape_quantiles[q] = quantile(apes, q);
      if (predicted_values.size() >= 2) {
        try {
          cell.kendall = kendall_tau(predicted_values, truth_values);
        } catch (const domain_error&) {
        }
      }
      if (!scored.empty() && truth_list.size() >= cfg.coverage_M)
        cell.coverage = breakout_coverage(scored, truth_list, cfg.coverage_m,
                                          cfg.coverage_M);
      if (cell.n_eligible > 0)
        cell.no_prediction_rate =
            static_cast<double>(cell.n_eligible - cell.n_predicted) /
            static_cast<double>(cell.n_eligible);
      row.push_back(std::move(cell));
    }
    report.cells[method] = std::move(row);
  }
  return report;
}

}  // namespace seismic
