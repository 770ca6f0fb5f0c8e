#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "accrete/errors.hpp"

namespace accrete {

/// Sampled scalar history with piecewise-linear interpolation.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(std::vector<double> times, std::vector<double> values)
      : t_(std::move(times)), v_(std::move(values)) {
    if (t_.size() != v_.size())
      throw DomainError("TimeSeries: times and values differ in length");
    for (std::size_t i = 1; i < t_.size(); ++i)
      if (!(t_[i] > t_[i - 1]))
        throw DomainError("TimeSeries: times must be strictly increasing");
  }

  void append(double t, double v) {
    if (!t_.empty() && !(t > t_.back()))
      throw DomainError("TimeSeries: appended time must exceed the last one");
    t_.push_back(t);
    v_.push_back(v);
  }
  /// Replaces the value of the last node.
  void set_back(double v) { v_.back() = v; }
  void pop_back() {
    t_.pop_back();
    v_.pop_back();
  }

  std::size_t size() const noexcept { return t_.size(); }
  bool empty() const noexcept { return t_.empty(); }
  const std::vector<double>& times() const noexcept { return t_; }
  const std::vector<double>& values() const noexcept { return v_; }
  double time(std::size_t i) const { return t_[i]; }
  double value(std::size_t i) const { return v_[i]; }
  double t_front() const { return t_.front(); }
  double t_back() const { return t_.back(); }

  /// Index k of the segment [t_k, t_{k+1}] containing t. Nodes belong to the
  /// segment on their left, except the first node.
  std::size_t segment(double t) const {
    require_interpolable();
    const double tc = clamp_time(t);
    auto it = std::lower_bound(t_.begin(), t_.end(), tc);
    std::size_t k = static_cast<std::size_t>(it - t_.begin());
    if (k == 0) return 0;
    return k - 1;
  }

  double operator()(double t) const {
    const std::size_t k = segment(t);
    const double tc = clamp_time(t);
    if (tc == t_[k + 1]) return v_[k + 1];
    const double w = (tc - t_[k]) / (t_[k + 1] - t_[k]);
    return v_[k] + w * (v_[k + 1] - v_[k]);
  }

  /// Slope of the interpolant on the segment containing t (backward
  /// difference at interior nodes).
  double slope(double t) const {
    const std::size_t k = segment(t);
    return (v_[k + 1] - v_[k]) / (t_[k + 1] - t_[k]);
  }

  bool contains(double t) const noexcept {
    if (t_.size() < 2) return false;
    const double slack = 1e-12 * (t_.back() - t_.front());
    return t >= t_.front() - slack && t <= t_.back() + slack;
  }

 private:
  void require_interpolable() const {
    if (t_.size() < 2)
      throw DomainError("TimeSeries: at least two nodes needed to interpolate");
  }
  double clamp_time(double t) const {
    if (!contains(t))
      throw DomainError("TimeSeries: t = " + std::to_string(t) +
                        " outside sampled range [" + std::to_string(t_.front()) +
                        ", " + std::to_string(t_.back()) + "]");
    return std::clamp(t, t_.front(), t_.back());
  }

  std::vector<double> t_;
  std::vector<double> v_;
};

// ---------------------------------------------------------------------------
// Explicit integration

namespace detail {
template <class State>
State axpy(const State& y, double a, const State& k) {
  State out = y;
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
  return out;
}

template <class State>
void require_finite(const State& d, double t) {
  for (std::size_t i = 0; i < d.size(); ++i)
    if (!std::isfinite(d[i])) throw IntegrationError("non-finite derivative", t);
}
}  // namespace detail

/// One classical Runge-Kutta step of size h for y' = f(t, y).
template <class F, class State>
State rk4_step(F&& f, double t, const State& y, double h) {
  const State k1 = f(t, y);
  detail::require_finite(k1, t);
  const State k2 = f(t + 0.5 * h, detail::axpy(y, 0.5 * h, k1));
  detail::require_finite(k2, t + 0.5 * h);
  const State k3 = f(t + 0.5 * h, detail::axpy(y, 0.5 * h, k2));
  detail::require_finite(k3, t + 0.5 * h);
  const State k4 = f(t + h, detail::axpy(y, h, k3));
  detail::require_finite(k4, t + h);
  State out = y;
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

/// Fixed-step RK4 from t0 to t1; returns one series per state component.
template <class F>
std::vector<TimeSeries> rk4_path(F&& f, std::vector<double> y0, double t0,
                                 double t1, int n_steps) {
  if (n_steps < 1) throw DomainError("rk4_path: n_steps must be >= 1");
  if (!(t1 > t0)) throw DomainError("rk4_path: need t1 > t0");
  const double h = (t1 - t0) / n_steps;
  std::vector<std::vector<double>> vals(y0.size());
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(n_steps) + 1);
  auto record = [&](double t, const std::vector<double>& y) {
    times.push_back(t);
    for (std::size_t i = 0; i < y.size(); ++i) vals[i].push_back(y[i]);
  };
  std::vector<double> y = std::move(y0);
  record(t0, y);
  for (int s = 0; s < n_steps; ++s) {
    const double t = t0 + s * h;
    y = rk4_step(f, t, y, h);
    record(s + 1 == n_steps ? t1 : t0 + (s + 1) * h, y);
  }
  std::vector<TimeSeries> out;
  out.reserve(vals.size());
  for (auto& v : vals) out.emplace_back(times, std::move(v));
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature

struct QuadEstimate {
  double value;
  double error;
};

/// 15-point Gauss-Kronrod rule on [a, b] with the embedded 7-point Gauss
/// difference as error estimate.
template <class F>
QuadEstimate gauss_kronrod15(F&& f, double a, double b) {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * wgk[7];
  double gauss = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    kron += wgk[j] * fsum;
    if (j % 2 == 1) gauss += wg[j / 2] * fsum;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

/// Globally adaptive Gauss-Kronrod quadrature of f over [a, b]. Bisects the
/// interval with the largest error estimate until the summed estimate drops
/// below tol (or below rounding level of the result).
template <class F>
double adaptive_quad(F&& f, double a, double b, double tol,
                     int max_subdivisions = 4000) {
  if (!(tol > 0.0)) throw DomainError("adaptive_quad: tol must be positive");
  if (a == b) return 0.0;
  if (a > b) return -adaptive_quad(f, b, a, tol, max_subdivisions);

  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::priority_queue<Piece> heap;
  const auto first = gauss_kronrod15(f, a, b);
  if (!std::isfinite(first.value))
    throw QuadratureError("adaptive_quad: non-finite integrand");
  heap.push({a, b, first.value, first.error});
  double total = first.value;
  double error = first.error;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int n = 0; error > std::max(tol, 50.0 * eps * std::abs(total)); ++n) {
    if (n >= max_subdivisions)
      throw QuadratureError("adaptive_quad: subdivision limit exceeded on [" +
                            std::to_string(a) + ", " + std::to_string(b) +
                            "], error estimate " + std::to_string(error));
    const Piece p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b))
      throw QuadratureError("adaptive_quad: interval underflow near x = " +
                            std::to_string(m));
    const auto l = gauss_kronrod15(f, p.a, m);
    const auto r = gauss_kronrod15(f, m, p.b);
    if (!std::isfinite(l.value) || !std::isfinite(r.value))
      throw QuadratureError("adaptive_quad: non-finite integrand");
    total += l.value + r.value - p.value;
    error += l.error + r.error - p.error;
    heap.push({p.a, m, l.value, l.error});
    heap.push({m, p.b, r.value, r.error});
  }
  // Re-sum to shed the cancellation accumulated by the running updates.
  double sum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    heap.pop();
  }
  return sum;
}

/// Adaptive quadrature over consecutive pieces [x0,x1], [x1,x2], ...; used
/// when the integrand has known kinks. tol is split by piece length.
template <class F>
double piecewise_quad(F&& f, std::span<const double> breaks, double tol) {
  if (breaks.size() < 2) return 0.0;
  const double span_len = std::abs(breaks.back() - breaks.front());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double len = std::abs(breaks[i + 1] - breaks[i]);
    if (len == 0.0) continue;
    const double piece_tol = span_len > 0.0 ? tol * len / span_len : tol;
    sum += adaptive_quad(f, breaks[i], breaks[i + 1],
                         std::max(piece_tol, 1e-300));
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Root finding

struct RootOptions {
  double x_tol = 1e-12;  // relative to max(1, |x|)
  double f_tol = 0.0;    // accept as soon as |f| <= f_tol
  int max_iter = 200;
};

/// Brent's bracketing method: inverse quadratic / secant steps with a
/// bisection fallback. Requires f(lo) f(hi) <= 0.
template <class F>
double find_root(F&& f, double lo, double hi, const RootOptions& opt) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw BracketError("find_root: non-finite value at bracket end", fa, fb);
  if (fa == 0.0 || std::abs(fa) <= opt.f_tol) return a;
  if (fb == 0.0 || std::abs(fb) <= opt.f_tol) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw BracketError("find_root: no sign change on [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]",
                       fa, fb);
  double c = a, fc = fa;
  double d = b - a, e = d;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int it = 0; it < opt.max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 =
        2.0 * eps * std::abs(b) + 0.5 * opt.x_tol * std::max(1.0, std::abs(b));
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0 || std::abs(fb) <= opt.f_tol) return b;

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if (!std::isfinite(fb))
      throw BracketError("find_root: non-finite value inside bracket", fa, fb);
  }
  return b;
}

template <class F>
double find_root(F&& f, double lo, double hi, double tol) {
  return find_root(std::forward<F>(f), lo, hi, RootOptions{tol, tol, 200});
}

}  // namespace accrete
