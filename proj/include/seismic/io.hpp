#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seismic/cascade.hpp"
#include "seismic/errors.hpp"
#include "seismic/evaluation.hpp"
#include "seismic/kernel.hpp"
#include "seismic/predictor.hpp"

namespace seismic {

namespace ioutil {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  return r.ec == std::errc{} && r.ptr == end;
}

inline bool parse_uint(std::string_view s, std::uint64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  return r.ec == std::errc{} && r.ptr == end;
}

// Shortest decimal that round-trips the value exactly.
inline std::string fmt_double(double v) {
  char buf[64];
  for (int prec : {15, 16, 17}) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back;
    if (parse_double(buf, back) && back == v) return buf;
  }
  return buf;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

}  // namespace ioutil

// ---------------------------------------------------------------------------
// Cascade files: `#` comment header, then one `time_seconds,follower_count`
// line per event, first data line `0,<root degree>`.

inline Cascade parse_cascade(std::istream& in, std::string default_id = "") {
  std::string line;
  long line_no = 0;
  std::string id = std::move(default_id);
  std::vector<Event> events;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = ioutil::trim(line);
    if (sv.empty()) continue;
    if (sv.front() == '#') {
      if (sv.substr(0, 6) == "# id: ")
        id = std::string(ioutil::trim(sv.substr(6)));
      continue;
    }
    const auto fields = ioutil::split(sv, ',');
    if (fields.size() != 2)
      throw parse_error("expected 'time_seconds,follower_count'", line_no);
    double t;
    std::uint64_t n;
    if (!ioutil::parse_double(fields[0], t) || !std::isfinite(t))
      throw parse_error("bad event time '" + std::string(fields[0]) + "'",
                        line_no);
    if (!ioutil::parse_uint(fields[1], n))
      throw parse_error("bad follower count '" + std::string(fields[1]) +
                        "' (nonnegative integer required)", line_no);
    if (events.empty() && t != 0.0)
      throw parse_error("first event must be the original post at time 0",
                        line_no);
    if (t < 0.0) throw parse_error("negative event time", line_no);
    if (!events.empty() && t < events.back().time)
      throw parse_error("event time decreased", line_no);
    events.push_back({t, n});
  }
  if (events.empty()) throw parse_error("no events", line_no);
  return make_cascade(std::move(events), std::move(id));
}

inline void serialize_cascade(std::ostream& out, const Cascade& c) {
  if (!c.id.empty()) out << "# id: " << c.id << "\n";
  for (const Event& e : c.events)
    out << ioutil::fmt_double(e.time) << "," << e.degree << "\n";
}

inline Cascade read_cascade_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path.string() + "'");
  try {
    return parse_cascade(in, path.stem().string());
  } catch (const parse_error& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
}

inline void write_cascade_file(const std::filesystem::path& path,
                               const Cascade& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot write '" + path.string() + "'");
  serialize_cascade(out, c);
}

// Loads every .csv cascade in a directory (sorted by filename) and labels it
// with the reshare count inside the horizon.
inline std::vector<LabeledCascade> load_corpus(
    const std::filesystem::path& dir, double horizon_seconds) {
  if (!std::filesystem::is_directory(dir))
    throw parse_error("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  std::vector<LabeledCascade> out;
  for (const auto& p : paths) {
    Cascade c = read_cascade_file(p);
    const double truth =
        static_cast<double>(final_reshares(c, horizon_seconds));
    out.push_back({std::move(c), truth});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Best-effort converter for the published sample layout: a CSV with the
// header `relative_time_second,number_of_followers`, one file per cascade.
// Anything else fails loudly rather than guessing.

inline Cascade import_snap(std::istream& in, std::string id) {
  std::string header;
  if (!std::getline(in, header))
    throw parse_error("snap import: empty file", 1);
  if (std::string(ioutil::trim(header)) !=
      "relative_time_second,number_of_followers")
    throw parse_error(
        "snap import: unrecognized header '" + header +
            "' (expected 'relative_time_second,number_of_followers')",
        1);
  std::string line;
  long line_no = 1;
  std::vector<Event> events;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view sv = ioutil::trim(line);
    if (sv.empty()) continue;
    const auto fields = ioutil::split(sv, ',');
    double t;
    std::uint64_t n;
    if (fields.size() != 2 || !ioutil::parse_double(fields[0], t) ||
        !ioutil::parse_uint(fields[1], n))
      throw parse_error("snap import: bad row '" + std::string(sv) + "'",
                        line_no);
    if (events.empty() && t != 0.0)
      throw parse_error("snap import: first row must be the original post at "
                        "relative time 0", line_no);
    if (!events.empty() && t < events.back().time)
      throw parse_error("snap import: times decrease", line_no);
    events.push_back({t, n});
  }
  if (events.empty()) throw parse_error("snap import: no rows", line_no);
  return make_cascade(std::move(events), std::move(id));
}

// ---------------------------------------------------------------------------
// Run configuration: a small TOML-like file with [kernel], [prediction] and
// [evaluation] sections (grammar in the README).  Loading validates every
// invariant before anything else runs; unknown keys are rejected.

struct RunConfig {
  MemoryKernelParams kernel = MemoryKernelParams::from_shape(300.0, 0.242);
  PredictionParams prediction;
  std::uint64_t min_reshares = 50;
  std::vector<double> eval_times;  // seconds
  std::vector<double> quantiles = {50.0, 75.0, 90.0, 95.0};
  std::size_t coverage_m = 500;
  std::size_t coverage_M = 100;
  double dpm_bin_width = 300.0;
  double horizon_days = 14.0;

  RunConfig() {
    for (int m = 5; m <= 360; m += 5) eval_times.push_back(m * 60.0);
  }

  double horizon_seconds() const { return horizon_days * 86400.0; }

  BenchmarkConfig benchmark() const {
    BenchmarkConfig cfg;
    cfg.kernel = kernel;
    cfg.prediction = prediction;
    cfg.min_reshares = min_reshares;
    cfg.dpm_bin_width = dpm_bin_width;
    cfg.quantiles = quantiles;
    cfg.coverage_m = coverage_m;
    cfg.coverage_M = coverage_M;
    return cfg;
  }
};

namespace detail {

inline double config_number(const std::string& key, std::string_view value) {
  double v;
  if (!ioutil::parse_double(value, v))
    throw config_error("config: bad number for '" + key + "': '" +
                       std::string(value) + "'");
  return v;
}

// Tokens are either a number or a range `first..last/step` (inclusive).
inline std::vector<double> config_number_list(const std::string& key,
                                              std::string_view value) {
  std::vector<double> out;
  std::istringstream ss{std::string(value)};
  std::string token;
  while (ss >> token) {
    const auto dots = token.find("..");
    if (dots == std::string::npos) {
      out.push_back(config_number(key, token));
      continue;
    }
    const auto slash = token.find('/', dots);
    if (slash == std::string::npos)
      throw config_error("config: range in '" + key +
                         "' must look like first..last/step");
    const double first = config_number(key, token.substr(0, dots));
    const double last = config_number(key, token.substr(dots + 2, slash - dots - 2));
    const double step = config_number(key, token.substr(slash + 1));
    if (!(step > 0.0) || last < first)
      throw config_error("config: bad range in '" + key + "'");
    for (double v = first; v <= last + 1e-9; v += step) out.push_back(v);
  }
  if (out.empty())
    throw config_error("config: '" + key + "' needs at least one value");
  return out;
}

inline std::vector<AlphaPoint> config_alpha_schedule(std::string_view value) {
  std::vector<AlphaPoint> out;
  std::istringstream ss{std::string(value)};
  std::string token;
  while (ss >> token) {
    const auto colon = token.find(':');
    if (colon == std::string::npos)
      throw config_error("config: alpha_schedule entries are minutes:alpha");
    const double minutes = config_number("alpha_schedule", token.substr(0, colon));
    const double alpha = config_number("alpha_schedule", token.substr(colon + 1));
    out.push_back({minutes * 60.0, alpha});
  }
  if (out.empty()) throw config_error("config: empty alpha_schedule");
  return out;
}

}  // namespace detail

inline RunConfig load_config(std::istream& in) {
  RunConfig cfg;
  std::string section;
  std::string line;
  long line_no = 0;
  double s0 = cfg.kernel.s0, theta = cfg.kernel.theta;
  bool saw_times = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = ioutil::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    if (sv.front() == '[') {
      if (sv.back() != ']')
        throw config_error("config: unterminated section header (line " +
                           std::to_string(line_no) + ")");
      section = std::string(sv.substr(1, sv.size() - 2));
      if (section != "kernel" && section != "prediction" &&
          section != "evaluation")
        throw config_error("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw config_error("config: expected key = value (line " +
                         std::to_string(line_no) + ")");
    const std::string key{ioutil::trim(sv.substr(0, eq))};
    const std::string_view value = ioutil::trim(sv.substr(eq + 1));

    if (section.empty()) {
      if (key == "horizon_days")
        cfg.horizon_days = detail::config_number(key, value);
      else
        throw config_error("config: unknown top-level key '" + key + "'");
    } else if (section == "kernel") {
      if (key == "s0_seconds")
        s0 = detail::config_number(key, value);
      else if (key == "theta")
        theta = detail::config_number(key, value);
      else
        throw config_error("config: unknown key '" + key + "' in [kernel]");
    } else if (section == "prediction") {
      if (key == "n_star")
        cfg.prediction.n_star = detail::config_number(key, value);
      else if (key == "gamma_n_star")
        cfg.prediction.gamma_n_star = detail::config_number(key, value);
      else if (key == "min_reshares") {
        std::uint64_t v;
        if (!ioutil::parse_uint(value, v))
          throw config_error("config: min_reshares must be a nonnegative integer");
        cfg.min_reshares = v;
      } else if (key == "alpha_schedule")
        cfg.prediction.alpha_schedule = detail::config_alpha_schedule(value);
      else
        throw config_error("config: unknown key '" + key + "' in [prediction]");
    } else if (section == "evaluation") {
      if (key == "times_minutes") {
        cfg.eval_times.clear();
        for (double m : detail::config_number_list(key, value))
          cfg.eval_times.push_back(m * 60.0);
        saw_times = true;
      } else if (key == "quantiles")
        cfg.quantiles = detail::config_number_list(key, value);
      else if (key == "coverage_m" || key == "coverage_M") {
        std::uint64_t v;
        if (!ioutil::parse_uint(value, v) || v == 0)
          throw config_error("config: " + key + " must be a positive integer");
        (key == "coverage_m" ? cfg.coverage_m : cfg.coverage_M) = v;
      } else if (key == "dpm_bin_width_seconds")
        cfg.dpm_bin_width = detail::config_number(key, value);
      else
        throw config_error("config: unknown key '" + key + "' in [evaluation]");
    }
  }

  // validate everything before returning anything
  try {
    cfg.kernel = MemoryKernelParams::from_shape(s0, theta);
  } catch (const domain_error& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  cfg.prediction.validate();
  if (!(cfg.horizon_days > 0.0))
    throw config_error("config: horizon_days must be > 0");
  if (!(cfg.dpm_bin_width > 0.0))
    throw config_error("config: dpm_bin_width_seconds must be > 0");
  for (double q : cfg.quantiles)
    if (q < 0.0 || q > 100.0)
      throw config_error("config: quantiles must lie in [0, 100]");
  for (std::size_t i = 0; i < cfg.eval_times.size(); ++i) {
    if (!(cfg.eval_times[i] > 0.0))
      throw config_error("config: times_minutes must be positive");
    if (i > 0 && !(cfg.eval_times[i] > cfg.eval_times[i - 1]))
      throw config_error("config: times_minutes must increase");
  }
  (void)saw_times;
  return cfg;
}

inline RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path.string() + "'");
  return load_config(in);
}

inline void save_config(std::ostream& out, const RunConfig& cfg) {
  using ioutil::fmt_double;
  out << "# seismic run configuration\n";
  out << "horizon_days = " << fmt_double(cfg.horizon_days) << "\n\n";
  out << "[kernel]\n";
  out << "s0_seconds = " << fmt_double(cfg.kernel.s0) << "\n";
  out << "theta = " << fmt_double(cfg.kernel.theta) << "\n\n";
  out << "[prediction]\n";
  out << "n_star = " << fmt_double(cfg.prediction.n_star) << "\n";
  out << "gamma_n_star = " << fmt_double(cfg.prediction.gamma_n_star) << "\n";
  out << "min_reshares = " << cfg.min_reshares << "\n";
  out << "alpha_schedule =";
  for (const AlphaPoint& p : cfg.prediction.alpha_schedule)
    out << " " << fmt_double(p.time / 60.0) << ":" << fmt_double(p.alpha);
  out << "\n\n";
  out << "[evaluation]\n";
  out << "times_minutes =";
  for (double t : cfg.eval_times) out << " " << fmt_double(t / 60.0);
  out << "\n";
  out << "quantiles =";
  for (double q : cfg.quantiles) out << " " << fmt_double(q);
  out << "\n";
  out << "coverage_m = " << cfg.coverage_m << "\n";
  out << "coverage_M = " << cfg.coverage_M << "\n";
  out << "dpm_bin_width_seconds = " << fmt_double(cfg.dpm_bin_width) << "\n";
}

// ---------------------------------------------------------------------------
// Evaluation report writers.  CSV rows are method,t_seconds,metric,value with
// 6 significant digits; absent metrics are omitted.  The JSON mirror keeps
// full precision.

inline void write_report_csv(std::ostream& out, const EvaluationReport& r) {
  out << "# seismic-report v1\n";
  out << "method,t_seconds,metric,value\n";
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  for (Method m : r.methods) {
    const auto& cells = r.cells.at(m);
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      const MetricCell& cell = cells[i];
      const std::string prefix = method_name(m) + "," + num(r.times[i]) + ",";
      out << prefix << "n_eligible," << cell.n_eligible << "\n";
      out << prefix << "n_predicted," << cell.n_predicted << "\n";
      if (cell.no_prediction_rate)
        out << prefix << "no_prediction_rate," << num(*cell.no_prediction_rate)
            << "\n";
      for (const auto& [q, v] : cell.ape_quantiles)
        out << prefix << "ape_p" << num(q) << "," << num(v) << "\n";
      if (cell.kendall) out << prefix << "kendall_tau," << num(*cell.kendall) << "\n";
      if (cell.coverage) out << prefix << "coverage," << num(*cell.coverage) << "\n";
    }
  }
}

inline void write_report_json(std::ostream& out, const EvaluationReport& r) {
  nlohmann::json doc;
  doc["version"] = "seismic-report v1";
  doc["times_seconds"] = r.times;
  doc["quantiles"] = r.quantiles;
  doc["coverage_list_sizes"] = {{"m", r.coverage_m}, {"M", r.coverage_M}};
  nlohmann::json methods;
  for (Method m : r.methods) {
    nlohmann::json rows = nlohmann::json::array();
    const auto& cells = r.cells.at(m);
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      const MetricCell& cell = cells[i];
      nlohmann::json row;
      row["t_seconds"] = r.times[i];
      row["n_eligible"] = cell.n_eligible;
      row["n_predicted"] = cell.n_predicted;
      row["no_prediction_rate"] =
          cell.no_prediction_rate ? nlohmann::json(*cell.no_prediction_rate)
                                  : nlohmann::json();
      nlohmann::json quantiles;
      for (const auto& [q, v] : cell.ape_quantiles)
        quantiles[ioutil::fmt_double(q)] = v;
      row["ape_quantiles"] = quantiles;
      row["kendall_tau"] =
          cell.kendall ? nlohmann::json(*cell.kendall) : nlohmann::json();
      row["coverage"] =
          cell.coverage ? nlohmann::json(*cell.coverage) : nlohmann::json();
      rows.push_back(std::move(row));
    }
    methods[method_name(m)] = std::move(rows);
  }
  doc["methods"] = std::move(methods);
  out << doc.dump(2) << "\n";
}

}  // namespace seismic

