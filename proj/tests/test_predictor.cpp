#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "seismic/predictor.hpp"
#include "seismic/simulator.hpp"
#include "support/gen.hpp"

using namespace seismic;
using testsupport::random_cascade;

namespace {
const MemoryKernelParams twitter = MemoryKernelParams::from_shape(300.0, 0.242);

CascadeStats stats_of(std::uint64_t r_t, std::uint64_t n_t, double n_e,
                      double t = 3600.0) {
  return CascadeStats{t, r_t, n_t, n_e};
}
}  // namespace

TEST_CASE("uncorrected branching expectation") {
  // R_t=100, N_t - N_t^e = 1000, p = 0.005, n* = 100  ->  100 + 5/0.5 = 110
  const auto pred = predict_uncorrected(stats_of(100, 1500, 500.0), 0.005, 100.0);
  CHECK(pred.state == CascadeState::subcritical);
  CHECK(pred.r_inf_hat == Catch::Approx(110.0).epsilon(1e-12));
  CHECK(pred.exposure_gap == Catch::Approx(1000.0));

  const auto nothing = predict_uncorrected(stats_of(42, 1500, 500.0), 0.0, 100.0);
  CHECK(nothing.r_inf_hat == 42.0);

  // boundary p * n_star = 1 is supercritical
  const auto super = predict_uncorrected(stats_of(100, 1500, 500.0), 0.01, 100.0);
  CHECK(super.state == CascadeState::supercritical);

  CHECK_THROWS_AS(predict_uncorrected(stats_of(1, 2, 1.0), -0.1, 100.0),
                  domain_error);
  CHECK_THROWS_AS(predict_uncorrected(stats_of(1, 2, 1.0), 0.1, 0.0),
                  domain_error);
}

TEST_CASE("uncorrected expectation agrees with branching Monte Carlo") {
  // same numbers as above; the future tree has Z1 ~ Poisson(p * gap) and
  // offspring mean mu = p * n_star
  GwConfig gw;
  gw.z1_mean = 0.005 * 1000.0;
  gw.mu = 0.005 * 100.0;
  gw.trials = 100'000;
  gw.seed = 99;
  const GwResult r = simulate_galton_watson(gw);
  const double predicted_future =
      predict_uncorrected(stats_of(100, 1500, 500.0), 0.005, 100.0).r_inf_hat -
      100.0;
  CHECK(std::abs(r.mean_total - predicted_future) / predicted_future < 0.02);
}

TEST_CASE("corrected formula arithmetic") {
  // p=0.01, alpha=0.5, gamma_n_star=20, R_t=50, gap=500 -> 53.125
  auto v = corrected_r_inf(50.0, 0.01, 500.0, 0.5, 20.0);
  REQUIRE(v.has_value());
  CHECK(*v == Catch::Approx(53.125).epsilon(1e-12));

  v = corrected_r_inf(50.0, 0.0, 500.0, 0.123, 20.0);
  CHECK(*v == 50.0);

  CHECK_FALSE(corrected_r_inf(50.0, 0.05, 500.0, 0.5, 20.0).has_value());
  CHECK_FALSE(corrected_r_inf(50.0, 0.06, 500.0, 0.5, 20.0).has_value());
}

TEST_CASE("prediction is monotone in the infectiousness") {
  double prev = 0.0;
  for (double p = 0.0; p < 0.049; p += 0.001) {
    const auto v = corrected_r_inf(50.0, p, 500.0, 0.7, 20.0);
    REQUIRE(v.has_value());
    CHECK(*v >= prev);
    prev = *v;
  }
}

TEST_CASE("alpha schedule lookup") {
  PredictionParams params;
  CHECK(alpha_at(5 * 60.0, params) == Catch::Approx(0.389));
  CHECK(alpha_at(10 * 60.0, params) == Catch::Approx(0.803));
  CHECK(alpha_at(360 * 60.0, params) == Catch::Approx(0.326));
  CHECK(alpha_at(7.5 * 60.0, params) == Catch::Approx(0.596));  // midpoint
  CHECK(alpha_at(24 * 3600.0, params) == Catch::Approx(0.326)); // clamped
  CHECK(alpha_at(1.0, params) == Catch::Approx(0.389));         // clamped low

  params.alpha_schedule.clear();
  CHECK_THROWS_AS(alpha_at(600.0, params), config_error);
  CHECK_THROWS_AS(alpha_at(0.0, PredictionParams{}), domain_error);
}

TEST_CASE("prediction params validation") {
  PredictionParams p;
  CHECK_NOTHROW(p.validate());
  p.n_star = 0.0;
  CHECK_THROWS_AS(p.validate(), config_error);
  p = PredictionParams{};
  p.alpha_schedule[2].alpha = 1.5;
  CHECK_THROWS_AS(p.validate(), config_error);
  p = PredictionParams{};
  p.alpha_schedule[2].time = p.alpha_schedule[1].time;
  CHECK_THROWS_AS(p.validate(), config_error);
}

TEST_CASE("predict applies the corrected formula to estimated quantities") {
  std::mt19937_64 gen(37);
  PredictionParams params;
  params.gamma_n_star = 20.0;
  int checked = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const Cascade c = random_cascade(gen, 40);
    const double t = 1800.0;
    const auto pred = predict(c, t, twitter, params);
    const auto est = infectiousness_weighted(c, t, twitter);
    const auto s = cascade_stats(c, t, twitter);
    const double gap = static_cast<double>(s.n_t) - s.n_t_effective;
    const auto expect = corrected_r_inf(static_cast<double>(s.r_t), est.p_hat,
                                        gap, alpha_at(t, params), 20.0);
    if (expect) {
      REQUIRE(pred.state == CascadeState::subcritical);
      CHECK(pred.r_inf_hat == *expect);
      CHECK(pred.r_inf_hat >= static_cast<double>(pred.r_t));
      ++checked;
    } else {
      CHECK(pred.state == CascadeState::supercritical);
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("with alpha 1 and gamma_n_star = n_star predict matches the "
          "uncorrected formula") {
  std::mt19937_64 gen(41);
  PredictionParams params;
  params.n_star = 80.0;
  params.gamma_n_star = 80.0;
  params.alpha_schedule = {{60.0, 1.0}};
  for (int rep = 0; rep < 30; ++rep) {
    const Cascade c = random_cascade(gen, 40);
    const double t = 2400.0;
    const auto est = infectiousness_weighted(c, t, twitter);
    const auto s = cascade_stats(c, t, twitter);
    const auto direct = predict_uncorrected(s, est.p_hat, params.n_star);
    const auto corrected = predict(c, t, twitter, params);
    CHECK(direct.state == corrected.state);
    if (direct.state == CascadeState::subcritical)
      CHECK(corrected.r_inf_hat == Catch::Approx(direct.r_inf_hat).epsilon(1e-12));
  }
}

TEST_CASE("no-prediction is distinct from supercritical") {
  // zero weighted exposure -> undefined estimate, not a supercritical state
  const Cascade no_followers = make_cascade({{0.0, 0}, {10.0, 0}});
  CHECK_THROWS_AS(predict(no_followers, 600.0, twitter, PredictionParams{}),
                  undefined_estimate_error);
}
