#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace accrete {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or argument lies outside the domain where a quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// ODE integration produced a non-finite derivative.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t)
      : Error(what + " (t = " + std::to_string(t) + ")"), t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Root finder was handed an interval without a sign change.
class BracketError : public Error {
 public:
  BracketError(const std::string& what, double f_lo, double f_hi)
      : Error(what), f_lo_(f_lo), f_hi_(f_hi) {}
  double f_lo() const noexcept { return f_lo_; }
  double f_hi() const noexcept { return f_hi_; }

 private:
  double f_lo_;
  double f_hi_;
};

/// Implicit cylinder geometry could not be advanced.
class GeometrySolveError : public Error {
 public:
  GeometrySolveError(double t, double residual_lo, double residual_hi)
      : Error(message(t, residual_lo, residual_hi)),
        t_(t),
        residual_lo_(residual_lo),
        residual_hi_(residual_hi) {}
  double t() const noexcept { return t_; }
  double residual_lo() const noexcept { return residual_lo_; }
  double residual_hi() const noexcept { return residual_hi_; }

 private:
  static std::string message(double t, double lo, double hi) {
    std::ostringstream os;
    os << "geometry solve failed at t = " << t
       << ": pressure residual does not change sign (lo = " << lo
       << ", hi = " << hi << ")";
    return os.str();
  }
  double t_;
  double residual_lo_;
  double residual_hi_;
};

/// Outer radius of the sphere was driven below the fixed inner radius.
class AblationExhaustedError : public Error {
 public:
  AblationExhaustedError(double t, double r1)
      : Error("ablation exhausted the body at t = " + std::to_string(t) +
              " (r1 = " + std::to_string(r1) + ")"),
        t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

/// Semi-Lagrangian step violated the CFL bound.
class CflError : public Error {
 public:
  CflError(double courant, double suggested_dt)
      : Error("CFL violated: Courant number " + std::to_string(courant) +
              ", suggested dt = " + std::to_string(suggested_dt)),
        suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Reading or writing a file or stream failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Aggregated configuration problems; all issues are collected before throwing.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "invalid configuration:";
    for (const auto& s : issues) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> issues_;
};

}  // namespace accrete
