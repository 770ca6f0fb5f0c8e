#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "accrete/errors.hpp"

namespace accrete {

/// Scalar function of time used for growth rates and loads. One of:
/// constant c, ramp a + b t, polynomial sum c_k t^k, or a piecewise-linear
/// table of (t, value) points held constant beyond its ends.
class RateFunction {
 public:
  struct Constant {
    double c;
  };
  struct Ramp {
    double a, b;
  };
  struct Poly {
    std::vector<double> coeffs;
  };
  struct Table {
    std::vector<std::pair<double, double>> points;
  };
  using Form = std::variant<Constant, Ramp, Poly, Table>;

  RateFunction() : form_(Constant{0.0}) {}
  RateFunction(Form form) : form_(std::move(form)) { validate(); }

  static RateFunction constant(double c) { return RateFunction(Constant{c}); }
  static RateFunction ramp(double a, double b) { return RateFunction(Ramp{a, b}); }
  static RateFunction poly(std::vector<double> c) {
    return RateFunction(Poly{std::move(c)});
  }
  static RateFunction table(std::vector<std::pair<double, double>> pts) {
    return RateFunction(Table{std::move(pts)});
  }

  const Form& form() const noexcept { return form_; }

  double operator()(double t) const {
    return std::visit([t](const auto& f) { return eval(f, t); }, form_);
  }

  /// Integral from 0 to t.
  double integral(double t) const {
    return std::visit([t](const auto& f) { return integrate(f, t); }, form_);
  }

  /// Times where the function is not smooth (table points).
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    if (const auto* tab = std::get_if<Table>(&form_))
      for (const auto& pt : tab->points) out.push_back(pt.first);
    return out;
  }

  bool is_zero() const {
    return std::visit(
        [](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Constant>) return f.c == 0.0;
          else if constexpr (std::is_same_v<T, Ramp>) return f.a == 0.0 && f.b == 0.0;
          else if constexpr (std::is_same_v<T, Poly>)
            return std::all_of(f.coeffs.begin(), f.coeffs.end(),
                               [](double c) { return c == 0.0; });
          else
            return std::all_of(f.points.begin(), f.points.end(),
                               [](const auto& p) { return p.second == 0.0; });
        },
        form_);
  }

  /// Smallest and largest value on [a, b]. Exact for constant, ramp and
  /// table forms; polynomials are scanned on a fine grid with the interior
  /// extrema refined by bisection on the derivative sign.
  std::pair<double, double> range_on(double a, double b) const {
    std::vector<double> candidates = {a, b};
    if (const auto* tab = std::get_if<Table>(&form_)) {
      for (const auto& [t, v] : tab->points)
        if (t > a && t < b) candidates.push_back(t);
    } else if (const auto* p = std::get_if<Poly>(&form_)) {
      add_poly_extrema(*p, a, b, candidates);
    }
    double lo = (*this)(candidates.front()), hi = lo;
    for (double t : candidates) {
      const double v = (*this)(t);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return {lo, hi};
  }

 private:
  void validate() const {
    if (const auto* tab = std::get_if<Table>(&form_)) {
      if (tab->points.empty()) throw DomainError("rate table: no points");
      for (std::size_t i = 1; i < tab->points.size(); ++i)
        if (!(tab->points[i].first > tab->points[i - 1].first))
          throw DomainError("rate table: times must be strictly increasing");
    }
    if (const auto* p = std::get_if<Poly>(&form_))
      if (p->coeffs.empty()) throw DomainError("rate poly: no coefficients");
  }

  static double eval(const Constant& f, double) { return f.c; }
  static double eval(const Ramp& f, double t) { return f.a + f.b * t; }
  static double eval(const Poly& f, double t) {
    double v = 0.0;
    for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) v = v * t + *it;
    return v;
  }
  static double eval(const Table& f, double t) {
    const auto& p = f.points;
    if (t <= p.front().first) return p.front().second;
    if (t >= p.back().first) return p.back().second;
    auto it = std::upper_bound(p.begin(), p.end(), t,
                               [](double x, const auto& q) { return x < q.first; });
    const auto& [t1, v1] = *it;
    const auto& [t0, v0] = *(it - 1);
    return v0 + (t - t0) / (t1 - t0) * (v1 - v0);
  }

  static double integrate(const Constant& f, double t) { return f.c * t; }
  static double integrate(const Ramp& f, double t) {
    return f.a * t + 0.5 * f.b * t * t;
  }
  static double integrate(const Poly& f, double t) {
    double v = 0.0;
    for (std::size_t k = f.coeffs.size(); k-- > 0;)
      v = v * t + f.coeffs[k] / static_cast<double>(k + 1);
    return v * t;
  }
  // Exact integral of the interpolant from 0 to t.
  static double integrate(const Table& f, double t) {
    return primitive(f, t) - primitive(f, 0.0);
  }
  // Antiderivative anchored at the first table time.
  static double primitive(const Table& f, double t) {
    const auto& p = f.points;
    if (t <= p.front().first) return p.front().second * (t - p.front().first);
    double acc = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
      const auto& [t0, v0] = p[i - 1];
      const auto& [t1, v1] = p[i];
      if (t <= t1) {
        const double vt = v0 + (t - t0) / (t1 - t0) * (v1 - v0);
        return acc + 0.5 * (v0 + vt) * (t - t0);
      }
      acc += 0.5 * (v0 + v1) * (t1 - t0);
    }
    return acc + p.back().second * (t - p.back().first);
  }

  static void add_poly_extrema(const Poly& p, double a, double b,
                               std::vector<double>& out) {
    if (p.coeffs.size() < 3 || !(b > a)) return;
    auto deriv = [&p](double t) {
      double v = 0.0;
      for (std::size_t k = p.coeffs.size(); k-- > 1;)
        v = v * t + static_cast<double>(k) * p.coeffs[k];
      return v;
    };
    constexpr int n = 1024;
    double t_prev = a, d_prev = deriv(a);
    for (int i = 1; i <= n; ++i) {
      const double t = a + (b - a) * i / n;
      const double d = deriv(t);
      if ((d_prev < 0.0) != (d < 0.0)) {
        double lo = t_prev, hi = t;
        for (int it = 0; it < 80; ++it) {
          const double m = 0.5 * (lo + hi);
          if ((deriv(m) < 0.0) == (d_prev < 0.0)) lo = m;
          else hi = m;
        }
        out.push_back(0.5 * (lo + hi));
      }
      t_prev = t;
      d_prev = d;
    }
  }

  Form form_;
};

}  // namespace accrete
