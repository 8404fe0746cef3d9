#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "seismic/baselines.hpp"

using namespace seismic;

namespace {

// A cascade with prescribed summary features at time t=1000: r_t reshares,
// total degree n_t, root degree n0.
Cascade shaped_cascade(std::uint64_t r_t, std::uint64_t n_t, std::uint64_t n0,
                       const std::string& id = "") {
  std::vector<Event> events{{0.0, n0}};
  for (std::uint64_t i = 0; i < r_t; ++i)  // simultaneous reshares are legal
    events.push_back({100.0, i == 0 ? n_t - n0 : 0});
  return make_cascade(std::move(events), id);
}

}  // namespace

TEST_CASE("lr fit is the mean log growth ratio") {
  std::vector<LabeledCascade> train;
  for (std::uint64_t r : {10, 20, 40})
    train.push_back({shaped_cascade(r, 1000, 500), 2.0 * static_cast<double>(r)});
  const LrModel m = fit_lr(train, 1000.0);
  CHECK(m.log_multiplier == Catch::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(m.n_train == 3);
  CHECK(predict_lr(m, shaped_cascade(25, 800, 400), 1000.0) ==
        Catch::Approx(50.0).epsilon(1e-12));

  // a single training cascade works
  std::vector<LabeledCascade> one{{shaped_cascade(50, 1000, 500), 100.0}};
  CHECK(fit_lr(one, 1000.0).log_multiplier ==
        Catch::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("lr equals the geometric-mean growth on heterogeneous corpora") {
  std::mt19937_64 gen(43);
  std::uniform_int_distribution<std::uint64_t> r_dist(1, 500);
  std::uniform_real_distribution<double> growth(1.0, 30.0);
  std::vector<LabeledCascade> train;
  double log_sum = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t r = r_dist(gen);
    const double g = growth(gen);
    log_sum += std::log(g);
    train.push_back({shaped_cascade(r, 1000, 500), g * static_cast<double>(r)});
  }
  const LrModel m = fit_lr(train, 1000.0);
  CHECK(m.log_multiplier == Catch::Approx(log_sum / 50.0).epsilon(1e-10));
}

TEST_CASE("lr drops log-undefined cascades and can fail entirely") {
  std::vector<LabeledCascade> train;
  train.push_back({shaped_cascade(0, 1000, 500), 10.0});  // R_t = 0, dropped
  train.push_back({shaped_cascade(10, 1000, 500), 30.0});
  CHECK(fit_lr(train, 1000.0).n_train == 1);

  std::vector<LabeledCascade> empty{{shaped_cascade(0, 1000, 500), 10.0}};
  CHECK_THROWS_AS(fit_lr(empty, 1000.0), fit_error);
}

TEST_CASE("lr predictions scale multiplicatively") {
  std::vector<LabeledCascade> train, scaled;
  for (std::uint64_t r : {10, 25, 60, 120}) {
    train.push_back({shaped_cascade(r, 1000, 500), 3.0 * static_cast<double>(r)});
    scaled.push_back(
        {shaped_cascade(10 * r, 1000, 500), 30.0 * static_cast<double>(r)});
  }
  const LrModel m = fit_lr(train, 1000.0);
  const LrModel ms = fit_lr(scaled, 1000.0);
  const double base = predict_lr(m, shaped_cascade(40, 900, 300), 1000.0);
  const double big = predict_lr(ms, shaped_cascade(400, 900, 300), 1000.0);
  CHECK(big == Catch::Approx(10.0 * base).epsilon(1e-10));
}

TEST_CASE("lr-d recovers exact model coefficients") {
  const double a = 0.4, b1 = 0.9, b2 = 0.05, b3 = 0.02;
  std::mt19937_64 gen(47);
  std::uniform_int_distribution<std::uint64_t> r_dist(2, 400);
  std::uniform_int_distribution<std::uint64_t> deg(50, 5000);
  std::vector<LabeledCascade> train;
  for (int i = 0; i < 40; ++i) {
    const std::uint64_t r = r_dist(gen);
    const std::uint64_t n0 = deg(gen);
    const std::uint64_t nt = n0 + deg(gen);
    const double y = std::exp(a + b1 * std::log(static_cast<double>(r)) +
                              b2 * std::log(static_cast<double>(nt)) +
                              b3 * std::log(static_cast<double>(n0)));
    train.push_back({shaped_cascade(r, nt, n0), y});
  }
  const LrdModel m = fit_lr_d(train, 1000.0);
  CHECK(m.beta[0] == Catch::Approx(a).margin(1e-8));
  CHECK(m.beta[1] == Catch::Approx(b1).margin(1e-8));
  CHECK(m.beta[2] == Catch::Approx(b2).margin(1e-8));
  CHECK(m.beta[3] == Catch::Approx(b3).margin(1e-8));

  const Cascade probe = shaped_cascade(33, 700, 250);
  const double want = std::exp(a + b1 * std::log(33.0) + b2 * std::log(700.0) +
                               b3 * std::log(250.0));
  CHECK(predict_lr_d(m, probe, 1000.0) == Catch::Approx(want).epsilon(1e-8));
}

TEST_CASE("lr-d drops cascades with any zero feature") {
  std::mt19937_64 gen(61);
  std::uniform_int_distribution<std::uint64_t> r_dist(2, 400);
  std::uniform_int_distribution<std::uint64_t> deg(50, 5000);
  std::vector<LabeledCascade> train;
  for (int i = 0; i < 10; ++i) {
    const std::uint64_t n0 = deg(gen);
    train.push_back({shaped_cascade(r_dist(gen), n0 + deg(gen), n0),
                     static_cast<double>(r_dist(gen)) + 500.0});
  }
  train.push_back({shaped_cascade(0, 900, 400), 80.0});  // R_t = 0
  const Cascade zero_root = make_cascade({{0.0, 0}, {100.0, 5}, {100.0, 7}});
  train.push_back({zero_root, 80.0});                    // n0 = 0
  CHECK(fit_lr_d(train, 1000.0).n_train == 10);
}

TEST_CASE("lr-d without degree effects reduces to lr") {
  std::mt19937_64 gen(53);
  std::uniform_int_distribution<std::uint64_t> r_dist(2, 400);
  std::uniform_int_distribution<std::uint64_t> deg(50, 5000);
  std::vector<LabeledCascade> train;
  for (int i = 0; i < 30; ++i) {
    const std::uint64_t r = r_dist(gen);
    const std::uint64_t n0 = deg(gen);
    train.push_back({shaped_cascade(r, n0 + deg(gen), n0),
                     std::exp(0.7) * static_cast<double>(r)});
  }
  const LrdModel lrd = fit_lr_d(train, 1000.0);
  const LrModel lr = fit_lr(train, 1000.0);
  const Cascade probe = shaped_cascade(75, 2000, 800);
  CHECK(predict_lr_d(lrd, probe, 1000.0) ==
        Catch::Approx(predict_lr(lr, probe, 1000.0)).epsilon(1e-6));
}

TEST_CASE("lr-d reports the rank-deficient column") {
  // every resharer has zero degree, so N_t == n0 and the two log-degree
  // columns coincide
  std::mt19937_64 gen(59);
  std::uniform_int_distribution<std::uint64_t> r_dist(2, 400);
  std::uniform_int_distribution<std::uint64_t> deg(50, 5000);
  std::vector<LabeledCascade> train;
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t n0 = deg(gen);
    train.push_back({shaped_cascade(r_dist(gen), n0, n0),
                     static_cast<double>(r_dist(gen)) * 2.0});
  }
  CHECK_THROWS_MATCHES(fit_lr_d(train, 1000.0), fit_error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("log_n0")));

  std::vector<LabeledCascade> tiny{{shaped_cascade(5, 100, 50), 10.0}};
  CHECK_THROWS_AS(fit_lr_d(tiny, 1000.0), fit_error);
}

namespace {

// Reshare times whose 300 s bin counts are count[k]; observation time covers
// exactly counts.size() complete bins.
Cascade binned_cascade(const std::vector<std::uint64_t>& counts) {
  std::vector<Event> events{{0.0, 1000}};
  for (std::size_t k = 0; k < counts.size(); ++k)
    for (std::uint64_t i = 0; i < counts[k]; ++i)
      events.push_back({static_cast<double>(k) * 300.0 + 1.0, 10});
  return make_cascade(std::move(events));
}

}  // namespace

TEST_CASE("dpm recovers an exact inverse-square decay") {
  // post-peak bins j with counts 14400 / j^2 wherever that is an integer
  std::vector<std::uint64_t> counts(13, 0);
  counts[0] = 20000;  // the peak
  for (std::size_t j : {1, 2, 3, 4, 5, 6, 8, 10, 12})
    counts[j] = 14400 / (j * j);
  const Cascade c = binned_cascade(counts);
  const double t = 13.0 * 300.0;

  const DpmFit fit = fit_dpm(c, t);
  CHECK(fit.gamma == Catch::Approx(-2.0).margin(1e-9));
  CHECK(fit.t_peak == 0.0);

  // tail vs direct continuation of the series to 1e6 bins
  double series = 0.0;
  for (std::size_t j = 13; j <= 1'000'000; ++j)
    series += 14400.0 / (static_cast<double>(j) * static_cast<double>(j));
  const Prediction pred = predict_dpm(c, t);
  const double r_t = static_cast<double>(reshare_count(c, t));
  CHECK(std::abs((pred.r_inf_hat - r_t) - series) / series < 0.05);
}

TEST_CASE("dpm refuses monotone-increasing histories") {
  const Cascade c = binned_cascade({5, 10, 20, 40, 80});
  CHECK_THROWS_AS(predict_dpm(c, 5.0 * 300.0), no_prediction_error);
}

TEST_CASE("dpm refuses flat histories at both candidate peaks") {
  const Cascade c = binned_cascade({30, 30, 30, 30, 30, 30});
  CHECK_THROWS_AS(predict_dpm(c, 6.0 * 300.0), no_prediction_error);
}

TEST_CASE("dpm needs two post-peak bins") {
  const Cascade c = binned_cascade({100, 50});
  CHECK_THROWS_AS(predict_dpm(c, 2.0 * 300.0), no_prediction_error);
}

TEST_CASE("observed predictor returns the running count") {
  const Cascade c = binned_cascade({10, 5});
  CHECK(predict_observed(c, 0.0) == 0.0);
  CHECK(predict_observed(c, 200.0) == 10.0);
  CHECK(predict_observed(c, 1e9) == 15.0);
}

TEST_CASE("rpm is a stub") {
  const Cascade c = binned_cascade({10});
  CHECK_THROWS_AS(predict_rpm(c, 600.0), not_implemented_error);
}

TEST_CASE("model table round trip") {
  std::vector<LrModel> lr{{600.0, 0.6931471805599453, 12},
                          {1200.0, 0.25, 15}};
  std::vector<LrdModel> lrd{{600.0, {0.4, 0.9, 0.05, 0.02}, 12}};
  std::stringstream ss;
  save_models(ss, lr, lrd);
  const ModelTable table = load_models(ss);
  REQUIRE(table.lr.size() == 2);
  REQUIRE(table.lrd.size() == 1);
  CHECK(table.lr[0].t == 600.0);
  CHECK(table.lr[0].log_multiplier == lr[0].log_multiplier);
  CHECK(table.lrd[0].beta == lrd[0].beta);

  std::stringstream bad("no header\n");
  CHECK_THROWS_AS(load_models(bad), parse_error);
}
