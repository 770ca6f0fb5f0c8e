#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "accrete/characteristics.hpp"
#include "accrete/errors.hpp"
#include "accrete/material.hpp"
#include "accrete/numerics.hpp"
#include "accrete/rate.hpp"
#include "accrete/tensor.hpp"

namespace accrete {

/// Plane-strain hollow cylinder, initially R0 < r < R1, growing stress-free
/// at its outer surface with speed u_g(t) and loaded by an internal pressure
/// p_i(t) on its inner surface.
struct CylinderScenario {
  double R0 = 1.0;
  double R1 = 2.0;
  RateFunction u_g = RateFunction::constant(0.1);
  RateFunction p_i = RateFunction::constant(0.0);
  double rho = 1.0;
  MaterialModel mat = MaterialModel::neo_hookean(1.0);
};

inline std::vector<std::string> validation_issues(const CylinderScenario& s, double t_end) {
  std::vector<std::string> issues;
  if (!(s.R0 > 0.0)) issues.push_back("R0 must be positive");
  if (!(s.R1 > s.R0)) issues.push_back("R1 must exceed R0");
  if (!(s.rho > 0.0)) issues.push_back("rho must be positive");
  if (!(t_end >= 0.0)) issues.push_back("t_end must be non-negative");
  if (t_end >= 0.0 && !(s.u_g.range_on(0.0, t_end).first > 0.0))
    issues.push_back("u_g must be strictly positive on [0, t_end]");
  if (s.p_i(0.0) != 0.0) issues.push_back("p_i(0) must be 0");
  return issues;
}

/// Geometry of the growing cylinder. r_in(t) and the accreted area measure
/// A(t) = int_0^t u_g r_out dt are stored as piecewise-linear histories;
/// r_out is derived from global incompressibility,
///   r_out^2 = R1^2 - R0^2 + r_in^2 + 2 A.
class GeometryHistory {
 public:
  struct Sample {
    std::size_t seg;   // history segment holding t
    double r_in;
    double A;
    double r_in_rate;  // slope of the segment
  };

  GeometryHistory(double R0, double R1) : R0_(R0), R1_(R1) {
    r_in_.append(0.0, R0);
    A_.append(0.0, 0.0);
  }

  double R0() const noexcept { return R0_; }
  double R1() const noexcept { return R1_; }
  /// R1^2 - R0^2.
  double offset() const noexcept { return R1_ * R1_ - R0_ * R0_; }

  std::size_t size() const noexcept { return r_in_.size(); }
  double time(std::size_t i) const { return r_in_.time(i); }
  double t_end() const { return r_in_.t_back(); }
  const std::vector<double>& times() const noexcept { return r_in_.times(); }

  double r_in_node(std::size_t i) const { return r_in_.value(i); }
  double A_node(std::size_t i) const { return A_.value(i); }
  double r_out_node(std::size_t i) const { return outer_from(r_in_.value(i), A_.value(i)); }

  const TimeSeries& r_in() const noexcept { return r_in_; }
  const TimeSeries& A() const noexcept { return A_; }
  TimeSeries r_out() const {
    std::vector<double> v(size());
    for (std::size_t i = 0; i < size(); ++i) v[i] = r_out_node(i);
    return TimeSeries(r_in_.times(), std::move(v));
  }

  void append(double t, double r_in, double A) {
    if (!(A > A_.values().back()))
      throw DomainError("GeometryHistory: A must increase strictly");
    r_in_.append(t, r_in);
    A_.append(t, A);
  }
  void set_back(double r_in, double A) {
    r_in_.set_back(r_in);
    A_.set_back(A);
  }

  bool contains(double t) const {
    if (size() == 1) return t == 0.0;
    return r_in_.contains(t);
  }

  Sample at(double t) const {
    if (size() == 1) {
      if (t != 0.0) throw DomainError("GeometryHistory: only t = 0 is available");
      return {0, R0_, 0.0, 0.0};
    }
    return at_segment(std::clamp(t, 0.0, t_end()), r_in_.segment(t));
  }

  /// Interpolated state at t using segment k explicitly.
  Sample at_segment(double t, std::size_t k) const {
    const double t0 = time(k), t1 = time(k + 1);
    const double w = (t - t0) / (t1 - t0);
    const double ri0 = r_in_.value(k), ri1 = r_in_.value(k + 1);
    const double a0 = A_.value(k), a1 = A_.value(k + 1);
    const double r_in = t == t1 ? ri1 : ri0 + w * (ri1 - ri0);
    const double A = t == t1 ? a1 : a0 + w * (a1 - a0);
    return {k, r_in, A, (ri1 - ri0) / (t1 - t0)};
  }

  double r_in_at(double t) const { return at(t).r_in; }
  double A_at(double t) const { return at(t).A; }
  double r_out_at(double t) const {
    const Sample s = at(t);
    return outer_from(s.r_in, s.A);
  }
  double r_in_rate(double t) const { return at(t).r_in_rate; }

  /// Current radius of the material that formed the outer surface at t = 0.
  double interface_radius(double t) const {
    const double ri = r_in_at(t);
    return std::sqrt(offset() + ri * ri);
  }

  /// v = r_in r_in' / r.
  double velocity(double r, double t) const {
    require_inside(r, t);
    const Sample s = at(t);
    return s.r_in * s.r_in_rate / r;
  }

  Origin region(double r, double t) const {
    return classify_origin(r, t, [this](double tt) { return interface_radius(tt); },
                           InflowSide::outer);
  }

  /// Time at which the particle now at r (accreted region) joined the body:
  /// the root of A(tau) = A(t) - (r_out(t)^2 - r^2) / 2, solved exactly on
  /// the piecewise-linear A.
  double attachment_time(double r, double t) const {
    require_inside(r, t);
    if (region(r, t) != Origin::inflowBoundary && r < interface_radius(t))
      throw DomainError("attachment_time: r lies in the initial body");
    return locate(r, at(t), t).tau;
  }

  DiagTensor elastic_deformation(double r, double t) const {
    require_inside(r, t);
    return deformation(r, t, at(t));
  }

  /// F_e at (r, t) given an already interpolated sample; no domain check.
  DiagTensor deformation(double r, double t, const Sample& s) const {
    const double rhat2 = offset() + s.r_in * s.r_in;
    if (r * r <= rhat2) {
      const double R = std::sqrt(R0_ * R0_ - s.r_in * s.r_in + r * r);
      return DiagTensor::polar(R / r, r / R);
    }
    const double ro = locate(r, s, t).r_out_tau;
    return DiagTensor::polar(ro / r, r / ro);
  }

  /// Radii at time t of material attached at interior history nodes; the
  /// accreted-region fields have kinks there.
  std::vector<double> attachment_radii(double t) const {
    const Sample s = at(t);
    const double ro = outer_from(s.r_in, s.A);
    std::vector<double> out;
    for (std::size_t j = 1; j < size() && time(j) < t; ++j) {
      const double r2 = ro * ro - 2.0 * (s.A - A_.value(j));
      if (r2 > 0.0) out.push_back(std::sqrt(r2));
    }
    return out;
  }

  /// F_e from the inverse motion: the reference position of each particle
  /// (its location at t = 0, or at its own attachment time) is found by
  /// tracing the pathline backward with RK4, and the gradient of that map is
  /// differentiated with a fourth-order central stencil and inverted.
  DiagTensor inverse_motion_deformation(double r, double t, int steps_per_segment = 8) const {
    require_inside(r, t);
    const double r_lo = r_in_at(t), r_hi = r_out_at(t);
    const double h = 1e-3 * (r_hi - r_lo);
    if (r - 2.0 * h < r_lo || r + 2.0 * h > r_hi)
      throw DomainError("inverse_motion_deformation: stencil leaves the body at r = " +
                        std::to_string(r));
    const double tau = reference_time(r, t, steps_per_segment);
    auto xi = [&](double x) { return trace_back(x, t, tau, steps_per_segment); };
    const double d =
        (-xi(r + 2.0 * h) + 8.0 * xi(r + h) - 8.0 * xi(r - h) + xi(r - 2.0 * h)) / (12.0 * h);
    return DiagTensor::polar(1.0 / d, r / xi(r));
  }

  /// Time at which the backward pathline through (r, t) meets the outer
  /// surface, or 0 if it stays inside back to the initial body.
  double reference_time(double r, double t, int steps_per_segment = 8) const {
    if (size() == 1) return 0.0;
    double x = r;
    double s = std::clamp(t, 0.0, t_end());
    std::size_t k = r_in_.segment(s);
    for (;;) {
      const double lo = time(k);
      const int n = std::max(1, static_cast<int>(std::ceil(
                                    steps_per_segment * (s - lo) / (time(k + 1) - lo) - 1e-9)));
      const double step = (s - lo) / n;
      for (int i = 0; i < n; ++i) {
        const double s1 = i + 1 == n ? lo : s - step;
        const double x1 = rk4_back(x, s, s1, k);
        if (x1 > outer_from(at_segment(s1, k))) {
          auto g = [&](double q) { return rk4_back(x, s, q, k) - outer_from(at_segment(q, k)); };
          return find_root(g, s1, s, RootOptions{1e-15, 0.0, 200});
        }
        x = x1;
        s = s1;
      }
      if (k == 0) return 0.0;
      --k;
    }
  }

  /// Position at time `to` (<= from) of the particle at r at time `from`.
  double trace_back(double r, double from, double to, int steps_per_segment = 8) const {
    if (size() == 1 || from == to) return r;
    double x = r;
    double s = from;
    std::size_t k = r_in_.segment(from);
    while (s > to) {
      const double lo = std::max(time(k), to);
      const int n = std::max(1, static_cast<int>(std::ceil(
                                    steps_per_segment * (s - lo) / (time(k + 1) - time(k)) - 1e-9)));
      const double step = (s - lo) / n;
      for (int i = 0; i < n; ++i) {
        const double s1 = i + 1 == n ? lo : s - step;
        x = rk4_back(x, s, s1, k);
        s = s1;
      }
      if (k == 0) break;
      --k;
    }
    return x;
  }

  VelocityField velocity_field() const {
    VelocityField v;
    v.v_r = [this](double r, double t) {
      const Sample s = at(t);
      return s.r_in * s.r_in_rate / r;
    };
    v.dv_dr = [this](double r, double t) {
      const Sample s = at(t);
      return -s.r_in * s.r_in_rate / (r * r);
    };
    v.domain = [this](double t) { return std::pair{r_in_at(t), r_out_at(t)}; };
    v.breakpoints = times();
    return v;
  }

  void require_inside(double r, double t) const {
    if (!contains(t))
      throw DomainError("cylinder: t = " + std::to_string(t) + " outside the history");
    const double lo = r_in_at(t), hi = r_out_at(t);
    const double slack = 1e-12 * hi;
    if (r < lo - slack || r > hi + slack)
      throw DomainError("cylinder: r = " + std::to_string(r) + " outside the body [" +
                        std::to_string(lo) + ", " + std::to_string(hi) +
                        "] at t = " + std::to_string(t));
  }

  double outer_from(double r_in, double A) const {
    return std::sqrt(offset() + r_in * r_in + 2.0 * A);
  }
  double outer_from(const Sample& s) const { return outer_from(s.r_in, s.A); }

 private:
  struct Attachment {
    double tau;
    double r_out_tau;
  };

  Attachment locate(double r, const Sample& s, double t) const {
    const double ro = outer_from(s.r_in, s.A);
    const double target = std::clamp(s.A - 0.5 * (ro - r) * (ro + r), 0.0, s.A);
    const auto& a = A_.values();
    // nodes 0..seg, then the interpolated point (t, A(t))
    std::size_t j = static_cast<std::size_t>(
        std::upper_bound(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(s.seg) + 1, target) -
        a.begin());
    j = j == 0 ? 0 : j - 1;
    const double t_lo = time(j), a_lo = a[j];
    const double t_hi = j == s.seg ? t : time(j + 1);
    const double a_hi = j == s.seg ? s.A : a[j + 1];
    double tau = a_hi > a_lo ? t_lo + (target - a_lo) / (a_hi - a_lo) * (t_hi - t_lo) : t_lo;
    tau = std::clamp(tau, t_lo, t_hi);
    if (size() == 1) return {0.0, R1_};
    const Sample at_tau = at_segment(tau, std::min(j, size() - 2));
    return {tau, std::sqrt(offset() + at_tau.r_in * at_tau.r_in + 2.0 * target)};
  }

  // One RK4 step of dx/ds = r_in(s) r_in' / x from s0 to s1 on segment k.
  double rk4_back(double x, double s0, double s1, std::size_t k) const {
    const double h = s1 - s0;
    auto f = [&](double s, double y) {
      const Sample q = at_segment(s, k);
      return q.r_in * q.r_in_rate / y;
    };
    const double k1 = f(s0, x);
    const double k2 = f(s0 + 0.5 * h, x + 0.5 * h * k1);
    const double k3 = f(s0 + 0.5 * h, x + 0.5 * h * k2);
    const double k4 = f(s1, x + h * k3);
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  double R0_, R1_;
  TimeSeries r_in_;
  TimeSeries A_;
};

/// Cylinder problem: marches the implicit geometry in time and evaluates
/// F_e and the stress on the resulting history.
class CylinderAccretion {
 public:
  struct Options {
    double dt = 0.01;
    double quad_tol = 1e-13;         // in units of G
    double root_tol = 1e-12;         // pressure residual, units of G
    double fixed_point_tol = 1e-10;  // in units of R0
    int max_corrector = 50;
    double bracket_delta = 0.2;
    int bracket_expansions = 5;
    /// Extra times that become history nodes (e.g. output times), so the
    /// pressure balance is closed exactly there.
    std::vector<double> required_times;
  };

  CylinderAccretion(CylinderScenario s, double t_end) : CylinderAccretion(std::move(s), t_end, Options{}) {}

  CylinderAccretion(CylinderScenario s, double t_end, Options opt)
      : s_(std::move(s)), opt_(opt), hist_(s_.R0, s_.R1) {
    auto issues = validation_issues(s_, t_end);
    if (!(opt_.dt > 0.0)) issues.push_back("dt must be positive");
    if (!issues.empty()) throw ConfigError(std::move(issues));
    evolve(t_end);
  }

  const CylinderScenario& scenario() const noexcept { return s_; }
  const GeometryHistory& history() const noexcept { return hist_; }
  const Options& options() const noexcept { return opt_; }
  double t_end() const { return hist_.t_end(); }

  /// Pressure-balance residual p_i(t) - RHS(r_in) recorded when each node
  /// was accepted.
  const std::vector<double>& step_residuals() const noexcept { return residuals_; }

  double velocity(double r, double t) const { return hist_.velocity(r, t); }
  DiagTensor elastic_deformation(double r, double t) const {
    return hist_.elastic_deformation(r, t);
  }
  double attachment_time(double r, double t) const { return hist_.attachment_time(r, t); }
  Origin region(double r, double t) const { return hist_.region(r, t); }

  /// sigma_rr(r_out(t)); zero when the pressure balance is closed.
  double outer_radial_stress(double t) const {
    const auto s = hist_.at(t);
    return radial_stress(hist_.outer_from(s), t, s);
  }

  /// Cauchy stress: sigma_rr integrated outward from sigma_rr(r_in) = -p_i
  /// through radial equilibrium, then p and sigma_tt from the constitutive
  /// law at the point.
  StressState stress(double r, double t) const {
    hist_.require_inside(r, t);
    const auto smp = hist_.at(t);
    const double rc = std::clamp(r, smp.r_in, hist_.outer_from(smp));
    const double sigma_rr = radial_stress(rc, t, smp);
    const DiagTensor F = hist_.deformation(rc, t, smp);
    const DiagTensor dev = cauchy_stress(F, 0.0, s_.mat);
    const double p = dev.rr() - sigma_rr;
    return {cauchy_stress(F, p, s_.mat), p};
  }

 private:
  double radial_stress(double r, double t, const GeometryHistory::Sample& smp) const {
    std::vector<double> breaks = {smp.r_in};
    const double rhat = std::sqrt(hist_.offset() + smp.r_in * smp.r_in);
    if (rhat < r) {
      breaks.push_back(rhat);
      for (double rj : hist_.attachment_radii(t))
        if (rj > rhat && rj < r) breaks.push_back(rj);
    }
    breaks.push_back(r);
    std::sort(breaks.begin(), breaks.end());
    auto integrand = [&](double rho) {
      return hoop_minus_radial(hist_.deformation(rho, t, smp), s_.mat) / rho;
    };
    const double G = s_.mat.shear_modulus();
    return -s_.p_i(t) + piecewise_quad(integrand, breaks, opt_.quad_tol * G);
  }

  void evolve(double t_end) {
    residuals_.push_back(outer_radial_stress(0.0));
    if (t_end == 0.0) return;
    const double G = s_.mat.shear_modulus();
    const double R0 = s_.R0;
    for (const double t : schedule(t_end)) {
      const double t_prev = hist_.t_end();
      const double dt = t - t_prev;
      const double r_in_prev = hist_.r_in_node(hist_.size() - 1);
      const double A_prev = hist_.A_node(hist_.size() - 1);
      const double r_out_prev = hist_.r_out_node(hist_.size() - 1);
      const double flux_prev = s_.u_g(t_prev) * r_out_prev;

      double A = A_prev + dt * flux_prev;
      double r_in = r_in_prev;
      hist_.append(t, r_in, A);

      auto residual = [&](double x, double a) {
        hist_.set_back(x, a);
        return outer_radial_stress(t);
      };

      bool converged = false;
      for (int it = 0; it < opt_.max_corrector; ++it) {
        const double A_new = A_prev + area_increment(t_prev, t, r_in_prev, r_out_prev, r_in, A);
        const double r_in_new = solve_inner(residual, A_new, r_in, t, G, R0);
        const double change = std::max(std::abs(A_new - A) / R0, std::abs(r_in_new - r_in));
        A = A_new;
        r_in = r_in_new;
        if (change <= opt_.fixed_point_tol * R0) {
          converged = true;
          break;
        }
      }
      hist_.set_back(r_in, A);
      const double res = outer_radial_stress(t);
      if (!converged) throw GeometrySolveError(t, res, res);
      residuals_.push_back(res);
    }
  }

  // Integral of u_g r_out over one step. r_out is the cubic Hermite
  // interpolant of its end values and end rates v(r_out) + u_g, integrated
  // by 3-point Gauss-Legendre.
  double area_increment(double t0, double t1, double r_in0, double r_out0, double r_in1,
                        double A1) const {
    const double dt = t1 - t0;
    const double r_out1 = hist_.outer_from(r_in1, A1);
    const double slope = (r_in1 - r_in0) / dt;
    const double d0 = (r_in0 * slope / r_out0 + s_.u_g(t0)) * dt;
    const double d1 = (r_in1 * slope / r_out1 + s_.u_g(t1)) * dt;
    static constexpr double nodes[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
    static constexpr double weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double x = nodes[i], x2 = x * x, x3 = x2 * x;
      const double h = (2 * x3 - 3 * x2 + 1) * r_out0 + (x3 - 2 * x2 + x) * d0 +
                       (-2 * x3 + 3 * x2) * r_out1 + (x3 - x2) * d1;
      sum += weights[i] * s_.u_g(t0 + x * dt) * h;
    }
    return sum * dt;
  }

  std::vector<double> schedule(double t_end) const {
    const int n = std::max(1, static_cast<int>(std::ceil(t_end / opt_.dt - 1e-9)));
    std::vector<double> ts;
    for (int k = 1; k <= n; ++k) ts.push_back(k == n ? t_end : t_end * k / n);
    std::vector<double> extra = opt_.required_times;
    for (const RateFunction* f : {&s_.u_g, &s_.p_i})
      for (double t : f->breakpoints()) extra.push_back(t);
    for (double t : extra)
      if (t > 0.0 && t < t_end) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    // drop nodes closer than a tiny fraction of dt to their predecessor
    std::vector<double> out;
    double prev = 0.0;
    for (double t : ts) {
      if (t - prev <= 1e-9 * opt_.dt) continue;
      out.push_back(t);
      prev = t;
    }
    if (out.back() != t_end) out.back() = t_end;
    return out;
  }

  template <class Residual>
  double solve_inner(Residual& residual, double A, double guess, double t, double G,
                     double R0) const {
    const double f_tol = opt_.root_tol * G;
    auto f = [&](double x) { return residual(x, A); };
    if (std::abs(f(guess)) <= f_tol) return guess;
    double delta = opt_.bracket_delta;
    double lo = 0.0, hi = 0.0, f_lo = 0.0, f_hi = 0.0;
    for (int e = 0; e <= opt_.bracket_expansions; ++e) {
      lo = std::max(1e-3 * R0, guess * (1.0 - delta));
      hi = guess * (1.0 + delta);
      f_lo = f(lo);
      f_hi = f(hi);
      if ((f_lo > 0.0) != (f_hi > 0.0)) {
        return find_root(f, lo, hi, RootOptions{1e-14, f_tol, 200});
      }
      delta *= 2.0;
    }
    throw GeometrySolveError(t, f_lo, f_hi);
  }

  CylinderScenario s_;
  Options opt_;
  GeometryHistory hist_;
  std::vector<double> residuals_;
};

/// Marches the cylinder geometry to t_end with step dt.
inline GeometryHistory evolve_geometry(const CylinderScenario& s, double t_end, double dt) {
  CylinderAccretion::Options opt;
  opt.dt = dt;
  return CylinderAccretion(s, t_end, opt).history();
}

}  // namespace accrete
