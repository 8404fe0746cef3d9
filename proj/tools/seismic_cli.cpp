// Command-line surface: predict, simulate, calibrate, fit-kernel, evaluate,
// import-snap.  Exit codes: 0 success, 2 usage, 3 parse/config, 4 numeric or
// fit failure.  All output is deterministic given inputs, config and seed.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seismic/seismic.hpp"

namespace fs = std::filesystem;
using namespace seismic;

namespace {

RunConfig config_from(const std::string& path) {
  return path.empty() ? RunConfig{} : load_config_file(path);
}

std::unique_ptr<std::ostream> open_out(const std::string& path) {
  if (path == "-") return std::make_unique<std::ostream>(std::cout.rdbuf());
  auto out = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*out) throw parse_error("cannot write '" + path + "'");
  return out;
}

std::string num6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> minutes_to_seconds(const std::vector<double>& minutes) {
  std::vector<double> out;
  for (double m : minutes) {
    if (!(m > 0.0)) throw config_error("times must be positive minutes");
    out.push_back(m * 60.0);
  }
  return out;
}

PTrajectory parse_p_spec(const std::string& spec) {
  const auto fields = ioutil::split(spec, ':');
  const std::string kind{fields[0]};
  const auto number = [&](std::string_view s) {
    double v;
    if (!ioutil::parse_double(s, v))
      throw config_error("bad number in --p spec: '" + std::string(s) + "'");
    return v;
  };
  if (kind == "constant" && fields.size() == 2)
    return PTrajectory::constant(number(fields[1]));
  if (kind == "exp-decay" && fields.size() == 3)
    return PTrajectory::exp_decay(number(fields[1]), number(fields[2]));
  if (kind == "piecewise" && fields.size() == 2) {
    std::vector<std::pair<double, double>> pieces;
    for (const auto& piece : ioutil::split(fields[1], ',')) {
      const auto at = piece.find('@');
      if (at == std::string_view::npos)
        throw config_error("piecewise --p pieces are start_s@value");
      pieces.push_back({number(piece.substr(0, at)), number(piece.substr(at + 1))});
    }
    return PTrajectory::piecewise(std::move(pieces));
  }
  throw config_error(
      "bad --p spec '" + spec +
      "' (constant:P | exp-decay:P:TAU | piecewise:0@P1,T2@P2,...)");
}

DegreeDist parse_degrees_spec(const std::string& spec) {
  const auto fields = ioutil::split(spec, ':');
  const std::string kind{fields[0]};
  const auto number = [&](std::string_view s) {
    double v;
    if (!ioutil::parse_double(s, v))
      throw config_error("bad number in --degrees spec: '" + std::string(s) + "'");
    return v;
  };
  if (kind == "constant" && fields.size() == 2)
    return DegreeDist::constant(static_cast<std::uint64_t>(number(fields[1])));
  if (kind == "poisson" && fields.size() == 2)
    return DegreeDist::poisson(number(fields[1]));
  if (kind == "zipf" && fields.size() == 3)
    return DegreeDist::zipf(number(fields[1]),
                            static_cast<std::uint64_t>(number(fields[2])));
  throw config_error("bad --degrees spec '" + spec +
                     "' (constant:N | poisson:MEAN | zipf:EXPONENT:CAP)");
}

// ---------------------------------------------------------------------------

struct PredictArgs {
  std::vector<std::string> files;
  std::string in_dir, config, out = "-", format = "csv";
  std::vector<double> times_minutes;
  std::uint64_t seed = 0;
};

void run_predict(const PredictArgs& a) {
  const RunConfig cfg = config_from(a.config);
  const std::vector<double> times = a.times_minutes.empty()
                                        ? cfg.eval_times
                                        : minutes_to_seconds(a.times_minutes);

  std::vector<fs::path> paths(a.files.begin(), a.files.end());
  if (!a.in_dir.empty()) {
    if (!fs::is_directory(a.in_dir))
      throw parse_error("'" + a.in_dir + "' is not a directory");
    std::vector<fs::path> extra;
    for (const auto& entry : fs::directory_iterator(a.in_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".csv")
        extra.push_back(entry.path());
    std::sort(extra.begin(), extra.end());
    paths.insert(paths.end(), extra.begin(), extra.end());
  }
  if (paths.empty()) throw config_error("predict: no cascade files given");

  auto out = open_out(a.out);
  const bool jsonl = a.format == "jsonl";
  if (!jsonl && a.format != "csv")
    throw config_error("predict: --format must be csv or jsonl");
  if (!jsonl) *out << "id,t_seconds,r_t,p_hat,state,r_inf_hat\n";

  for (const fs::path& path : paths) {
    const Cascade cascade = read_cascade_file(path);
    for (double t : times) {
      std::string state = "OK";
      std::optional<double> p_hat, r_inf;
      const std::uint64_t r_t = reshare_count(cascade, t);
      if (r_t < cfg.min_reshares) {
        state = "GATED";
      } else {
        try {
          const Prediction pred = predict(cascade, t, cfg.kernel, cfg.prediction);
          p_hat = pred.p_hat;
          if (pred.state == CascadeState::supercritical)
            state = "SUPERCRITICAL";
          else
            r_inf = pred.r_inf_hat;
        } catch (const undefined_estimate_error&) {
          state = "NO_PREDICTION";
        }
      }
      if (jsonl) {
        nlohmann::json row;
        row["id"] = cascade.id;
        row["t_seconds"] = t;
        row["r_t"] = r_t;
        row["p_hat"] = p_hat ? nlohmann::json(*p_hat) : nlohmann::json();
        row["state"] = state;
        row["r_inf_hat"] = r_inf ? nlohmann::json(*r_inf) : nlohmann::json();
        *out << row.dump() << "\n";
      } else {
        *out << cascade.id << "," << num6(t) << "," << r_t << ","
             << (p_hat ? num6(*p_hat) : "") << "," << state << ","
             << (r_inf ? num6(*r_inf) : "") << "\n";
      }
    }
  }
}

struct SimulateArgs {
  std::string out_dir, config;
  std::string p_spec = "constant:0.01";
  std::string degrees_spec = "poisson:50";
  std::uint64_t root_degree = 1000;
  double horizon_days = 14.0;
  std::uint64_t count = 1;
  std::uint64_t seed = 1;
  std::uint64_t max_events = 1'000'000;
};

void run_simulate(const SimulateArgs& a) {
  const RunConfig run_cfg = config_from(a.config);
  SimConfig sim;
  sim.kernel = run_cfg.kernel;
  sim.p = parse_p_spec(a.p_spec);
  sim.degrees = parse_degrees_spec(a.degrees_spec);
  sim.root_degree = a.root_degree;
  sim.horizon = a.horizon_days * 86400.0;
  sim.max_events = a.max_events;

  fs::create_directories(a.out_dir);
  nlohmann::json manifest;
  manifest["version"] = "seismic-manifest v1";
  manifest["seed"] = a.seed;
  manifest["count"] = a.count;
  manifest["p"] = sim.p.describe();
  manifest["degrees"] = sim.degrees.describe();
  manifest["root_degree"] = sim.root_degree;
  manifest["horizon_days"] = a.horizon_days;
  manifest["max_events"] = sim.max_events;
  manifest["kernel"] = {{"s0_seconds", sim.kernel.s0}, {"theta", sim.kernel.theta}};
  nlohmann::json files = nlohmann::json::array();

  for (std::uint64_t i = 0; i < a.count; ++i) {
    sim.seed = a.seed + i;  // one independent stream per cascade
    const SimResult result = simulate_cascade(sim);
    char name[64];
    std::snprintf(name, sizeof name, "cascade_%05llu.csv",
                  static_cast<unsigned long long>(i + 1));
    Cascade cascade = result.cascade;
    cascade.id = fs::path(name).stem().string();
    write_cascade_file(fs::path(a.out_dir) / name, cascade);
    files.push_back({{"file", name},
                     {"seed", sim.seed},
                     {"events", cascade.events.size()},
                     {"truncated", result.truncated}});
  }
  manifest["files"] = std::move(files);
  std::ofstream mf(fs::path(a.out_dir) / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << "\n";
}

struct FitKernelArgs {
  std::string delays_file, config, out = "-";
  double s0_seconds = 300.0;
  std::uint64_t seed = 0;
};

void run_fit_kernel(const FitKernelArgs& a) {
  std::ifstream in(a.delays_file);
  if (!in) throw parse_error("cannot open '" + a.delays_file + "'");
  std::vector<double> delays;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto sv = ioutil::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    double v;
    if (!ioutil::parse_double(sv, v))
      throw parse_error("bad delay '" + std::string(sv) + "'", line_no);
    delays.push_back(v);
  }
  RunConfig cfg = config_from(a.config);
  cfg.kernel = fit_memory_kernel(std::move(delays), a.s0_seconds);
  auto out = open_out(a.out);
  save_config(*out, cfg);
}

struct CalibrateArgs {
  std::string train_dir, config, out = "-", report;
  std::vector<double> times_minutes;
  double gamma_n_star = -1.0;  // default: take from config
  double grid_step = 0.01;
  std::uint64_t seed = 0;
};

void run_calibrate(const CalibrateArgs& a) {
  RunConfig cfg = config_from(a.config);
  const double gamma_n_star =
      a.gamma_n_star >= 0.0 ? a.gamma_n_star : cfg.prediction.gamma_n_star;
  const std::vector<double> times = a.times_minutes.empty()
                                        ? cfg.eval_times
                                        : minutes_to_seconds(a.times_minutes);
  const auto corpus = load_corpus(a.train_dir, cfg.horizon_seconds());
  if (corpus.empty()) throw fit_error("calibrate: empty training corpus");

  const double n_star = estimate_n_star(corpus);
  const AlphaCalibration cal = calibrate_alpha(
      corpus, times, gamma_n_star, cfg.kernel, cfg.min_reshares, a.grid_step);
  for (double t : cal.omitted_times)
    std::cerr << "seismic-warning: no eligible cascades at t=" << num6(t)
              << "s, omitted from the schedule\n";
  if (cal.schedule.empty())
    throw fit_error("calibrate: no time in the schedule had eligible cascades");

  cfg.prediction.n_star = n_star;
  cfg.prediction.gamma_n_star = gamma_n_star;
  cfg.prediction.alpha_schedule = cal.schedule;
  cfg.prediction.validate();
  auto out = open_out(a.out);
  save_config(*out, cfg);

  if (!a.report.empty()) {
    nlohmann::json doc;
    doc["version"] = "seismic-calibration v1";
    doc["n_star"] = n_star;
    doc["gamma_n_star"] = gamma_n_star;
    doc["kernel"] = {{"s0_seconds", cfg.kernel.s0}, {"theta", cfg.kernel.theta}};
    doc["grid"] = cal.grid;
    nlohmann::json sched = nlohmann::json::array();
    for (std::size_t i = 0; i < cal.schedule.size(); ++i)
      sched.push_back({{"t_seconds", cal.schedule[i].time},
                       {"alpha", cal.schedule[i].alpha},
                       {"median_ape", cal.objective[i]}});
    doc["schedule"] = std::move(sched);
    doc["omitted_times_seconds"] = cal.omitted_times;
    auto rep = open_out(a.report);
    *rep << doc.dump(2) << "\n";
  }
}

struct EvaluateArgs {
  std::string test_dir, train_dir, config, out;
  std::string methods = "seismic,lr,lr-d,dpm,observed";
  std::string models_out;
  std::vector<double> times_minutes;
  std::uint64_t seed = 0;
};

void run_evaluate(const EvaluateArgs& a) {
  const RunConfig cfg = config_from(a.config);
  const std::vector<double> times = a.times_minutes.empty()
                                        ? cfg.eval_times
                                        : minutes_to_seconds(a.times_minutes);
  std::vector<Method> methods;
  for (const auto& name : ioutil::split(a.methods, ','))
    methods.push_back(parse_method(std::string(ioutil::trim(name))));
  const bool needs_train =
      std::find(methods.begin(), methods.end(), Method::lr) != methods.end() ||
      std::find(methods.begin(), methods.end(), Method::lrd) != methods.end();

  const auto test = load_corpus(a.test_dir, cfg.horizon_seconds());
  std::vector<LabeledCascade> train;
  if (!a.train_dir.empty())
    train = load_corpus(a.train_dir, cfg.horizon_seconds());
  else if (needs_train)
    throw config_error("evaluate: lr and lr-d need --train");

  const EvaluationReport report =
      run_benchmark(train, test, methods, times, cfg.benchmark());

  auto csv = open_out(a.out + ".csv");
  write_report_csv(*csv, report);
  auto js = open_out(a.out + ".json");
  write_report_json(*js, report);

  if (!a.models_out.empty()) {
    std::vector<LrModel> lr;
    std::vector<LrdModel> lrd;
    for (double t : times) {
      try {
        lr.push_back(fit_lr(train, t));
      } catch (const fit_error&) {
      }
      try {
        lrd.push_back(fit_lr_d(train, t));
      } catch (const fit_error&) {
      }
    }
    auto mo = open_out(a.models_out);
    save_models(*mo, lr, lrd);
  }
}

struct ImportSnapArgs {
  std::string in, out, config;
  std::uint64_t seed = 0;
};

void run_import_snap(const ImportSnapArgs& a) {
  std::ifstream in(a.in);
  if (!in) throw parse_error("cannot open '" + a.in + "'");
  const Cascade cascade = import_snap(in, fs::path(a.in).stem().string());
  auto out = open_out(a.out);
  serialize_cascade(*out, cascade);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-exciting cascade final-size prediction"};
  app.require_subcommand(1);

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand(
      "predict", "stream final-size predictions for cascade files");
  predict_cmd->add_option("files", predict_args.files, "cascade files");
  predict_cmd->add_option("--in-dir", predict_args.in_dir,
                          "directory of .csv cascades");
  predict_cmd->add_option("--config", predict_args.config, "run config file");
  predict_cmd->add_option("--times", predict_args.times_minutes,
                          "prediction times in minutes")->delimiter(',');
  predict_cmd->add_option("--format", predict_args.format, "csv or jsonl");
  predict_cmd->add_option("--out", predict_args.out, "output path or -");
  predict_cmd->add_option("--seed", predict_args.seed, "unused; accepted for uniformity");
  predict_cmd->callback([&] { run_predict(predict_args); });

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "draw synthetic cascades");
  sim_cmd->add_option("--out", sim_args.out_dir, "output directory")->required();
  sim_cmd->add_option("--config", sim_args.config, "run config file");
  sim_cmd->add_option("--count", sim_args.count, "number of cascades");
  sim_cmd->add_option("--seed", sim_args.seed, "base seed; cascade i uses seed+i");
  sim_cmd->add_option("--p", sim_args.p_spec,
                      "infectiousness trajectory (constant:P | exp-decay:P:TAU "
                      "| piecewise:0@P1,T2@P2,...)");
  sim_cmd->add_option("--degrees", sim_args.degrees_spec,
                      "degree distribution (constant:N | poisson:MEAN | "
                      "zipf:EXPONENT:CAP)");
  sim_cmd->add_option("--root-degree", sim_args.root_degree, "originator degree");
  sim_cmd->add_option("--horizon-days", sim_args.horizon_days, "simulation horizon");
  sim_cmd->add_option("--max-events", sim_args.max_events, "event cap per cascade");
  sim_cmd->callback([&] { run_simulate(sim_args); });

  FitKernelArgs fit_args;
  auto* fit_cmd = app.add_subcommand(
      "fit-kernel", "fit the reaction-time kernel from a delay sample");
  fit_cmd->add_option("--delays", fit_args.delays_file,
                      "file with one delay (seconds) per line")->required();
  fit_cmd->add_option("--s0-seconds", fit_args.s0_seconds, "plateau cutoff");
  fit_cmd->add_option("--config", fit_args.config, "base config to extend");
  fit_cmd->add_option("--out", fit_args.out, "output config path or -");
  fit_cmd->add_option("--seed", fit_args.seed, "unused; accepted for uniformity");
  fit_cmd->callback([&] { run_fit_kernel(fit_args); });

  CalibrateArgs cal_args;
  auto* cal_cmd = app.add_subcommand(
      "calibrate", "fit n_star and the alpha schedule on a training corpus");
  cal_cmd->add_option("--train", cal_args.train_dir, "training corpus directory")
      ->required();
  cal_cmd->add_option("--config", cal_args.config, "base config");
  cal_cmd->add_option("--times", cal_args.times_minutes,
                      "calibration times in minutes")->delimiter(',');
  cal_cmd->add_option("--gamma-n-star", cal_args.gamma_n_star,
                      "gamma_t * n_star product (default: from config)");
  cal_cmd->add_option("--grid-step", cal_args.grid_step, "alpha grid step");
  cal_cmd->add_option("--out", cal_args.out, "output config path or -");
  cal_cmd->add_option("--report", cal_args.report,
                      "also write the calibration report JSON here");
  cal_cmd->add_option("--seed", cal_args.seed, "unused; accepted for uniformity");
  cal_cmd->callback([&] { run_calibrate(cal_args); });

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "benchmark prediction methods over a labeled corpus");
  eval_cmd->add_option("--test", eval_args.test_dir, "test corpus directory")
      ->required();
  eval_cmd->add_option("--train", eval_args.train_dir, "training corpus directory");
  eval_cmd->add_option("--methods", eval_args.methods, "comma-separated methods");
  eval_cmd->add_option("--times", eval_args.times_minutes,
                       "evaluation times in minutes")->delimiter(',');
  eval_cmd->add_option("--config", eval_args.config, "run config file");
  eval_cmd->add_option("--out", eval_args.out,
                       "output prefix; writes <prefix>.csv and <prefix>.json")
      ->required();
  eval_cmd->add_option("--models-out", eval_args.models_out,
                       "also save fitted lr/lr-d models here");
  eval_cmd->add_option("--seed", eval_args.seed, "unused; accepted for uniformity");
  eval_cmd->callback([&] { run_evaluate(eval_args); });

  ImportSnapArgs snap_args;
  auto* snap_cmd = app.add_subcommand(
      "import-snap", "convert a published sample cascade to the native format");
  snap_cmd->add_option("--in", snap_args.in, "sample csv")->required();
  snap_cmd->add_option("--out", snap_args.out, "native cascade path or -")
      ->required();
  snap_cmd->add_option("--config", snap_args.config, "unused; accepted for uniformity");
  snap_cmd->add_option("--seed", snap_args.seed, "unused; accepted for uniformity");
  snap_cmd->callback([&] { run_import_snap(snap_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const parse_error& e) {
    std::cerr << "seismic-error: parse: " << e.what() << "\n";
    return 3;
  } catch (const config_error& e) {
    std::cerr << "seismic-error: config: " << e.what() << "\n";
    return 3;
  } catch (const fit_error& e) {
    std::cerr << "seismic-error: fit: " << e.what() << "\n";
    return 4;
  } catch (const not_implemented_error& e) {
    std::cerr << "seismic-error: not-implemented: " << e.what() << "\n";
    return 4;
  } catch (const error& e) {
    std::cerr << "seismic-error: numeric: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "seismic-error: io: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
