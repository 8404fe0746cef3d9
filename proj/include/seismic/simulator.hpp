#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "seismic/cascade.hpp"
#include "seismic/kernel.hpp"
#include "seismic/random.hpp"

namespace seismic {

// Infectiousness over time.  Presets cover the shapes used in experiments:
// constant, exponential decay, and piecewise-constant steps.
struct PTrajectory {
  enum class Kind { constant, exp_decay, piecewise_constant };
  Kind kind = Kind::constant;
  double p0 = 0.0;
  double decay_tau = 0.0;                          // exp_decay timescale [s]
  std::vector<std::pair<double, double>> pieces;   // (start_s, value)

  static PTrajectory constant(double p) {
    if (!(p >= 0.0)) throw config_error("p trajectory: p must be >= 0");
    PTrajectory out;
    out.kind = Kind::constant;
    out.p0 = p;
    return out;
  }

  static PTrajectory exp_decay(double p_start, double tau) {
    if (!(p_start >= 0.0) || !(tau > 0.0))
      throw config_error("p trajectory: need p >= 0 and decay tau > 0");
    PTrajectory out;
    out.kind = Kind::exp_decay;
    out.p0 = p_start;
    out.decay_tau = tau;
    return out;
  }

  static PTrajectory piecewise(std::vector<std::pair<double, double>> pieces) {
    if (pieces.empty() || pieces.front().first != 0.0)
      throw config_error("p trajectory: pieces must start at t=0");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (!(pieces[i].second >= 0.0))
        throw config_error("p trajectory: piece values must be >= 0");
      if (i > 0 && !(pieces[i].first > pieces[i - 1].first))
        throw config_error("p trajectory: piece times must increase");
    }
    PTrajectory out;
    out.kind = Kind::piecewise_constant;
    out.pieces = std::move(pieces);
    return out;
  }

  double at(double t) const {
    switch (kind) {
      case Kind::constant:
        return p0;
      case Kind::exp_decay:
        return p0 * std::exp(-t / decay_tau);
      case Kind::piecewise_constant: {
        double v = pieces.front().second;
        for (const auto& [start, value] : pieces) {
          if (start > t) break;
          v = value;
        }
        return v;
      }
    }
    return p0;
  }

  // sup of the trajectory over [t, inf); the thinning bound needs this.
  double max_from(double t) const {
    switch (kind) {
      case Kind::constant:
      case Kind::exp_decay:
        return at(t);  // nonincreasing
      case Kind::piecewise_constant: {
        double m = at(t);
        for (const auto& [start, value] : pieces)
          if (start > t && value > m) m = value;
        return m;
      }
    }
    return at(t);
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::constant:
        os << "constant:" << p0;
        break;
      case Kind::exp_decay:
        os << "exp-decay:" << p0 << ":" << decay_tau;
        break;
      case Kind::piecewise_constant: {
        os << "piecewise:";
        for (std::size_t i = 0; i < pieces.size(); ++i)
          os << (i ? "," : "") << pieces[i].first << ":" << pieces[i].second;
        break;
      }
    }
    return os.str();
  }
};

// Out-degree distribution of resharing nodes, i.i.d. per event with finite
// mean n_*.
struct DegreeDist {
  enum class Kind { constant, poisson, zipf };
  Kind kind = Kind::constant;
  std::uint64_t value = 0;      // constant
  double poisson_mean = 0.0;
  double zipf_exponent = 0.0;   // P(k) ~ k^-exponent on 1..cap
  std::uint64_t zipf_cap = 0;
  std::vector<double> zipf_cdf;
  double mean_ = 0.0;

  static DegreeDist constant(std::uint64_t n) {
    if (n == 0) throw config_error("degree dist: mean must be > 0");
    DegreeDist d;
    d.kind = Kind::constant;
    d.value = n;
    d.mean_ = static_cast<double>(n);
    return d;
  }

  static DegreeDist poisson(double mean) {
    if (!(mean > 0.0)) throw config_error("degree dist: mean must be > 0");
    DegreeDist d;
    d.kind = Kind::poisson;
    d.poisson_mean = mean;
    d.mean_ = mean;
    return d;
  }

  static DegreeDist zipf(double exponent, std::uint64_t cap) {
    if (!(exponent > 0.0) || cap < 1 || cap > 10'000'000)
      throw config_error("degree dist: zipf needs exponent > 0 and cap in [1, 1e7]");
    DegreeDist d;
    d.kind = Kind::zipf;
    d.zipf_exponent = exponent;
    d.zipf_cap = cap;
    d.zipf_cdf.reserve(cap);
    double total = 0.0, mean = 0.0;
    for (std::uint64_t k = 1; k <= cap; ++k) {
      const double w = std::pow(static_cast<double>(k), -exponent);
      total += w;
      mean += w * static_cast<double>(k);
      d.zipf_cdf.push_back(total);
    }
    for (double& v : d.zipf_cdf) v /= total;
    d.mean_ = mean / total;
    return d;
  }

  double mean() const { return mean_; }

  std::uint64_t sample(Rng& rng) const {
    switch (kind) {
      case Kind::constant:
        return value;
      case Kind::poisson:
        return rng.poisson(poisson_mean);
      case Kind::zipf: {
        const double u = rng.uniform();
        const auto it =
            std::upper_bound(zipf_cdf.begin(), zipf_cdf.end(), u);
        return static_cast<std::uint64_t>(it - zipf_cdf.begin()) + 1;
      }
    }
    return value;
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::constant:
        os << "constant:" << value;
        break;
      case Kind::poisson:
        os << "poisson:" << poisson_mean;
        break;
      case Kind::zipf:
        os << "zipf:" << zipf_exponent << ":" << zipf_cap;
        break;
    }
    return os.str();
  }
};

struct SimConfig {
  MemoryKernelParams kernel = MemoryKernelParams::from_shape(300.0, 0.242);
  PTrajectory p = PTrajectory::constant(0.01);
  DegreeDist degrees = DegreeDist::constant(50);
  std::uint64_t root_degree = 100;
  double horizon = 14.0 * 86400.0;  // seconds
  std::uint64_t seed = 1;
  std::uint64_t max_events = 1'000'000;

  void validate() const {
    if (!(horizon > 0.0)) throw config_error("sim: horizon must be > 0");
    if (max_events == 0) throw config_error("sim: max_events must be > 0");
    if (!(degrees.mean() > 0.0) || !std::isfinite(degrees.mean()))
      throw config_error("sim: degree mean must be finite and > 0");
  }
};

struct SimResult {
  Cascade cascade;
  bool truncated;                    // max_events cap hit before the horizon
  std::vector<std::int64_t> parents;  // triggering event per event; root = -1
};

namespace detail {

// Fenwick tree over per-event weights: append, point update, total, and
// sampling an index proportionally to its weight.
class WeightTree {
public:
  void push(double w) {
    values_.push_back(w);
    const std::size_t i = values_.size();       // 1-based
    const std::size_t low = i & (~i + 1);       // lowbit(i)
    double sum = w;  // node i covers (i - lowbit(i), i]
    for (std::size_t j = i - 1; j > i - low; j -= j & (~j + 1))
      sum += tree_[j - 1];
    tree_.push_back(sum);
    total_ += w;
  }

  void set(std::size_t idx, double w) {
    const double delta = w - values_[idx];
    values_[idx] = w;
    total_ += delta;
    for (std::size_t i = idx + 1; i <= tree_.size(); i += i & (~i + 1))
      tree_[i - 1] += delta;
  }

  double total() const { return total_; }
  double value(std::size_t idx) const { return values_[idx]; }
  std::size_t size() const { return values_.size(); }

  // Smallest index whose cumulative weight exceeds x.
  std::size_t sample(double x) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 <= tree_.size()) step *= 2;
    for (; step > 0; step /= 2) {
      const std::size_t next = pos + step;
      if (next <= tree_.size() && tree_[next - 1] < x) {
        pos = next;
        x -= tree_[pos - 1];
      }
    }
    return pos < values_.size() ? pos : values_.size() - 1;
  }

private:
  std::vector<double> tree_;    // 1-based fenwick layout
  std::vector<double> values_;
  double total_ = 0.0;
};

}  // namespace detail

// Draws one cascade from the doubly stochastic self-exciting process with
// intensity  lambda_t = p_t * sum_{t_i <= t} n_i phi(t - t_i)  by thinning.
//
// The dominating rate starts from the kernel plateau maximum over the
// current history, p_sup * sum_i n_i * c, held per contributing event.
// Candidate times arrive at the summed bound; a candidate picks its
// triggering event proportionally to the per-event bounds and is accepted
// with probability p(t) n_i phi(t - t_i) / (p_sup w_i).  Because phi is
// nonincreasing, a rejected candidate's freshly evaluated phi is itself a
// valid bound from then on, so each rejection tightens w_i in place.  That
// keeps long-horizon runs near O(R log R) where the raw plateau bound
// would reject ~(age/s0)^(1+theta) candidates per event in the tail.
inline SimResult simulate_cascade(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  std::vector<Event> events{{0.0, cfg.root_degree}};
  std::vector<std::int64_t> parents{-1};
  detail::WeightTree weights;
  weights.push(static_cast<double>(cfg.root_degree) * cfg.kernel.c);

  double now = 0.0;
  bool truncated = false;
  while (events.size() < cfg.max_events) {
    const double p_sup = cfg.p.max_from(now);
    const double bound = p_sup * weights.total();
    if (!(bound > 0.0)) break;
    now += rng.exponential(bound);
    if (now > cfg.horizon) break;

    const std::size_t i = weights.sample(rng.uniform() * weights.total());
    const double w_i = weights.value(i);
    if (w_i <= 0.0) continue;  // float edge at a zero-degree event
    const double age = now - events[i].time;
    const double phi_now = age > 0.0 ? phi(age, cfg.kernel) : cfg.kernel.c;
    const double rate_i =
        cfg.p.at(now) * static_cast<double>(events[i].degree) * phi_now;
    if (rng.uniform() * p_sup * w_i < rate_i) {
      const std::uint64_t degree = cfg.degrees.sample(rng);
      events.push_back({now, degree});
      parents.push_back(static_cast<std::int64_t>(i));
      weights.push(static_cast<double>(degree) * cfg.kernel.c);
    } else {
      weights.set(i, static_cast<double>(events[i].degree) * phi_now);
    }
  }
  if (events.size() >= cfg.max_events) truncated = true;

  SimResult out{make_cascade(std::move(events)), truncated, std::move(parents)};
  return out;
}

// Galton-Watson branching Monte Carlo: total future progeny seeded by a
// Poisson first generation.  This is the ground truth the closed-form
// final-size expectation is checked against.
struct GwConfig {
  double z1_mean = 0.0;
  enum class Offspring { poisson, degree_thinned };
  Offspring offspring = Offspring::poisson;
  double mu = 0.0;     // poisson offspring mean
  double p = 0.0;      // degree_thinned: each of n ~ degrees followers reshares w.p. p
  DegreeDist degrees = DegreeDist::constant(1);
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 1;
  std::uint64_t cap = 10'000'000;  // nodes per trial

  double offspring_mean() const {
    return offspring == Offspring::poisson ? mu : p * degrees.mean();
  }

  void validate() const {
    if (trials == 0) throw config_error("gw: trials must be > 0");
    if (!(z1_mean >= 0.0)) throw config_error("gw: z1_mean must be >= 0");
    if (offspring == Offspring::poisson && !(mu >= 0.0))
      throw config_error("gw: mu must be >= 0");
  }
};

struct GwResult {
  double mean_total;       // mean of sum_k Z_k over trials (capped trials as-is)
  double se;               // standard error of the mean
  double extinction_rate;  // trials that died out before the cap
  double capped_fraction;
  bool supercritical_warning;  // offspring mean >= 1: expectations diverge
};

inline GwResult simulate_galton_watson(const GwConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  double sum = 0.0, sum_sq = 0.0;
  std::uint64_t capped = 0;
  for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
    std::uint64_t frontier = rng.poisson(cfg.z1_mean);
    std::uint64_t total = frontier;
    bool hit_cap = total >= cfg.cap;
    while (frontier > 0 && !hit_cap) {
      std::uint64_t next = 0;
      for (std::uint64_t j = 0; j < frontier; ++j) {
        next += cfg.offspring == GwConfig::Offspring::poisson
                    ? rng.poisson(cfg.mu)
                    : rng.binomial(cfg.degrees.sample(rng), cfg.p);
        if (total + next >= cfg.cap) {
          hit_cap = true;
          break;
        }
      }
      total += next;
      frontier = next;
    }
    if (hit_cap) ++capped;
    const double v = static_cast<double>(total);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(cfg.trials);
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(var / n),
          1.0 - static_cast<double>(capped) / n,
          static_cast<double>(capped) / n,
          cfg.offspring_mean() >= 1.0};
}

}  // namespace seismic
