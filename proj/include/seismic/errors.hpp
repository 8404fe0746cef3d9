#pragma once

#include <stdexcept>
#include <string>

namespace seismic {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An argument is outside the mathematical domain of an operation
// (negative time, zero window, ...).
class domain_error : public error {
public:
  using error::error;
};

// The infectiousness estimate has a zero denominator (no exposure mass
// accumulated by the observation time).  Callers should delay or fall back.
class undefined_estimate_error : public error {
public:
  using error::error;
};

// A predictor cannot produce a finite estimate for structural reasons
// (e.g. an infeasible tail exponent).  Distinct from the supercritical
// state, which is a regular prediction outcome.
class no_prediction_error : public error {
public:
  using error::error;
};

// Model fitting failed (degenerate sample, rank-deficient design, ...).
class fit_error : public error {
public:
  using error::error;
};

// A configuration value violates an invariant or an unknown key was seen.
class config_error : public error {
public:
  using error::error;
};

// Malformed input file.  Carries the 1-based line number when known.
class parse_error : public error {
public:
  parse_error(const std::string& msg, long line = 0)
      : error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

private:
  long line_;
};

// Placeholder for methods named in the interface but intentionally not
// provided.
class not_implemented_error : public error {
public:
  using error::error;
};

}  // namespace seismic
