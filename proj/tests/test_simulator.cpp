#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "seismic/estimator.hpp"
#include "seismic/simulator.hpp"
#include "support/stats.hpp"

using namespace seismic;
using testsupport::ks_statistic;

namespace {
const MemoryKernelParams twitter = MemoryKernelParams::from_shape(300.0, 0.242);
}

TEST_CASE("weight tree prefix sampling") {
  detail::WeightTree tree;
  tree.push(1.0);
  tree.push(2.0);
  tree.push(7.0);
  CHECK(tree.total() == 10.0);
  CHECK(tree.sample(0.5) == 0);
  CHECK(tree.sample(1.5) == 1);
  CHECK(tree.sample(2.999) == 1);
  CHECK(tree.sample(3.5) == 2);
  CHECK(tree.sample(9.99) == 2);
  CHECK(tree.sample(10.5) == 2);  // float overshoot clamps

  tree.set(1, 5.0);  // prefixes now 1, 6, 13
  CHECK(tree.total() == 13.0);
  CHECK(tree.sample(5.5) == 1);
  CHECK(tree.sample(6.5) == 2);

  tree.push(4.0);
  CHECK(tree.total() == 17.0);
  CHECK(tree.sample(16.0) == 3);
  CHECK(tree.value(3) == 4.0);
}

TEST_CASE("same seed gives the identical cascade") {
  SimConfig cfg;
  cfg.p = PTrajectory::constant(0.012);
  cfg.degrees = DegreeDist::poisson(50.0);
  cfg.root_degree = 500;
  cfg.horizon = 2 * 86400.0;
  cfg.seed = 424242;
  const SimResult a = simulate_cascade(cfg);
  const SimResult b = simulate_cascade(cfg);
  CHECK(a.cascade == b.cascade);
  CHECK(a.parents == b.parents);
  CHECK(a.cascade.events.size() > 1);

  cfg.seed = 424243;
  const SimResult c = simulate_cascade(cfg);
  CHECK_FALSE(a.cascade == c.cascade);
}

TEST_CASE("zero infectiousness leaves the root alone") {
  SimConfig cfg;
  cfg.p = PTrajectory::constant(0.0);
  cfg.root_degree = 100000;
  const SimResult r = simulate_cascade(cfg);
  CHECK(r.cascade.events.size() == 1);
  CHECK_FALSE(r.truncated);
}

TEST_CASE("max_events caps the run and flags it") {
  SimConfig cfg;
  cfg.p = PTrajectory::constant(0.03);  // p * n_star = 1.5, explosive
  cfg.degrees = DegreeDist::constant(50);
  cfg.root_degree = 2000;
  cfg.horizon = 30 * 86400.0;
  cfg.max_events = 2000;
  cfg.seed = 7;
  const SimResult r = simulate_cascade(cfg);
  CHECK(r.truncated);
  CHECK(r.cascade.events.size() == 2000);
}

TEST_CASE("trajectory presets") {
  const auto flat = PTrajectory::constant(0.02);
  CHECK(flat.at(0.0) == 0.02);
  CHECK(flat.max_from(1e6) == 0.02);

  const auto decay = PTrajectory::exp_decay(0.02, 3600.0);
  CHECK(decay.at(0.0) == 0.02);
  CHECK(decay.at(3600.0) == Catch::Approx(0.02 / std::exp(1.0)));
  CHECK(decay.max_from(7200.0) == decay.at(7200.0));

  const auto steps = PTrajectory::piecewise({{0.0, 0.01}, {600.0, 0.03}, {1200.0, 0.005}});
  CHECK(steps.at(0.0) == 0.01);
  CHECK(steps.at(599.0) == 0.01);
  CHECK(steps.at(600.0) == 0.03);
  CHECK(steps.at(5000.0) == 0.005);
  CHECK(steps.max_from(0.0) == 0.03);
  CHECK(steps.max_from(700.0) == 0.03);
  CHECK(steps.max_from(1200.0) == 0.005);

  CHECK_THROWS_AS(PTrajectory::piecewise({{100.0, 0.01}}), config_error);
  CHECK_THROWS_AS(PTrajectory::constant(-0.1), config_error);
}

TEST_CASE("degree distributions") {
  CHECK(DegreeDist::constant(50).mean() == 50.0);
  CHECK(DegreeDist::poisson(25.0).mean() == 25.0);
  CHECK_THROWS_AS(DegreeDist::constant(0), config_error);
  CHECK_THROWS_AS(DegreeDist::poisson(0.0), config_error);

  const auto zipf = DegreeDist::zipf(2.5, 1000);
  CHECK(zipf.mean() > 1.0);
  Rng rng(5);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto v = zipf.sample(rng);
    CHECK(v >= 1);
    CHECK(v <= 1000);
    sum += static_cast<double>(v);
  }
  CHECK(sum / n == Catch::Approx(zipf.mean()).margin(0.05));
}

TEST_CASE("galton-watson expectations") {
  GwConfig gw;
  gw.z1_mean = 0.0;
  gw.mu = 0.5;
  gw.trials = 1000;
  CHECK(simulate_galton_watson(gw).mean_total == 0.0);

  gw.z1_mean = 5.0;
  gw.mu = 0.5;
  gw.trials = 40'000;
  gw.seed = 3;
  GwResult r = simulate_galton_watson(gw);
  CHECK(std::abs(r.mean_total - 10.0) < 3.0 * r.se);
  CHECK(r.extinction_rate == 1.0);
  CHECK(r.capped_fraction == 0.0);
  CHECK_FALSE(r.supercritical_warning);

  gw.z1_mean = 1.0;
  gw.mu = 0.9;
  gw.trials = 40'000;
  gw.seed = 17;
  r = simulate_galton_watson(gw);
  CHECK(std::abs(r.mean_total - 10.0) < 3.0 * r.se);
  CHECK(r.extinction_rate == 1.0);

  gw.mu = 1.1;
  gw.trials = 200;
  gw.cap = 50'000;
  r = simulate_galton_watson(gw);
  CHECK(r.supercritical_warning);
  CHECK(r.capped_fraction > 0.0);
  CHECK(r.extinction_rate == Catch::Approx(1.0 - r.capped_fraction));
}

TEST_CASE("degree-thinned offspring matches the poisson mean") {
  GwConfig gw;
  gw.z1_mean = 4.0;
  gw.offspring = GwConfig::Offspring::degree_thinned;
  gw.p = 0.01;
  gw.degrees = DegreeDist::constant(50);  // mu = 0.5
  gw.trials = 40'000;
  gw.seed = 11;
  const GwResult r = simulate_galton_watson(gw);
  CHECK(std::abs(r.mean_total - 8.0) < 3.0 * r.se);
}

TEST_CASE("cascade size matches the branching oracle at long horizons") {
  // p * n_star = 0.5 with a root of degree 1000: expected future reshares
  // p*n0 / (1 - p*n_star) = 20 once the horizon covers nearly all the
  // reaction-time mass.
  SimConfig cfg;
  cfg.p = PTrajectory::constant(0.01);
  cfg.degrees = DegreeDist::constant(50);
  cfg.root_degree = 1000;
  cfg.horizon = 1e12;
  const int seeds = 1000;
  double total = 0.0, total_sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = 1000 + s;
    const double r =
        static_cast<double>(simulate_cascade(cfg).cascade.events.size() - 1);
    total += r;
    total_sq += r * r;
  }
  const double mean = total / seeds;
  const double sd = std::sqrt((total_sq - seeds * mean * mean) / (seeds - 1));
  const double se = sd / std::sqrt(static_cast<double>(seeds));

  GwConfig gw;
  gw.z1_mean = 0.01 * 1000.0;
  gw.mu = 0.5;
  gw.trials = 100'000;
  gw.seed = 5;
  const GwResult oracle = simulate_galton_watson(gw);

  // 3 sigma plus a small allowance for the reaction mass beyond the horizon
  CHECK(std::abs(mean - oracle.mean_total) <
        3.0 * std::sqrt(se * se + oracle.se * oracle.se) +
            0.02 * oracle.mean_total);
}

TEST_CASE("a 14-day horizon leaves part of the heavy tail unrealized") {
  SimConfig cfg;
  cfg.p = PTrajectory::constant(0.01);
  cfg.degrees = DegreeDist::constant(50);
  cfg.root_degree = 1000;
  cfg.horizon = 14 * 86400.0;
  double total = 0.0;
  const int seeds = 600;
  for (int s = 0; s < seeds; ++s) {
    cfg.seed = 9000 + s;
    total += static_cast<double>(simulate_cascade(cfg).cascade.events.size() - 1);
  }
  const double mean = total / seeds;
  const double closed_form = 0.01 * 1000.0 / (1.0 - 0.5);
  CHECK(mean < closed_form);
  CHECK(mean > 0.6 * closed_form);
}

TEST_CASE("first-generation reshare times follow the memory kernel") {
  SimConfig cfg;
  cfg.p = PTrajectory::constant(0.002);
  cfg.degrees = DegreeDist::constant(5);
  cfg.root_degree = 2'000'000;
  cfg.horizon = 1e7;
  cfg.max_events = 40'000;
  cfg.seed = 99;
  const SimResult r = simulate_cascade(cfg);
  REQUIRE_FALSE(r.truncated);

  std::vector<double> first_gen;
  for (std::size_t i = 1; i < r.cascade.events.size(); ++i)
    if (r.parents[i] == 0) first_gen.push_back(r.cascade.events[i].time);
  REQUIRE(first_gen.size() > 3000);

  const double norm = phi_integral(cfg.horizon, twitter);
  const double d = ks_statistic(
      first_gen, [&](double t) { return phi_integral(t, twitter) / norm; });
  CHECK(d < 0.035);
}

TEST_CASE("phase transition around p * n_star = 1") {
  SimConfig cfg;
  cfg.degrees = DegreeDist::constant(50);
  cfg.root_degree = 50;
  cfg.horizon = 30 * 86400.0;
  cfg.max_events = 10'001;

  int sub_large = 0, super_large = 0;
  for (int s = 0; s < 60; ++s) {
    cfg.p = PTrajectory::constant(0.8 / 50.0);
    cfg.seed = 100 + s;
    if (simulate_cascade(cfg).cascade.events.size() > 10'000) ++sub_large;
    cfg.p = PTrajectory::constant(1.2 / 50.0);
    if (simulate_cascade(cfg).cascade.events.size() > 10'000) ++super_large;
  }
  CHECK(sub_large == 0);
  CHECK(super_large > 0);
}
