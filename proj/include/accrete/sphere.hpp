#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
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

/// Body present at t = 0 between r0 and r1_initial with a prescribed
/// incompressible elastic deformation F0 = diag(F_rr0, F_tt0, F_tt0).
struct InitialBody {
  double r1_initial;
  std::function<double(double)> F_rr0 = [](double) { return 1.0; };
  std::function<double(double)> F_tt0 = [](double) { return 1.0; };
};

/// Removal of material at the outer sphere surface.
class Ablation {
 public:
  enum class Kind { none, rate, treadmill };

  static Ablation none() { return Ablation(Kind::none, {}); }
  /// Prescribed Z1dot(t) <= 0 (M1 = rho Z1dot).
  static Ablation rate(RateFunction Z1dot) { return Ablation(Kind::rate, std::move(Z1dot)); }
  /// Z1dot = Z0dot r0^2 / r1^2, which holds the outer radius fixed.
  static Ablation treadmill() { return Ablation(Kind::treadmill, {}); }

  Kind kind() const noexcept { return kind_; }
  const RateFunction& rate_function() const noexcept { return Z1dot_; }

  double Z1dot(double t, double r1, double Z0dot_t, double r0) const {
    switch (kind_) {
      case Kind::none: return 0.0;
      case Kind::rate: return Z1dot_(t);
      case Kind::treadmill: return Z0dot_t * r0 * r0 / (r1 * r1);
    }
    return 0.0;
  }

 private:
  Ablation(Kind k, RateFunction f) : kind_(k), Z1dot_(std::move(f)) {}
  Kind kind_;
  RateFunction Z1dot_;
};

/// Hollow sphere growing at the fixed inner radius r0 with accretion
/// displacement rate Z0dot < 0, optionally ablating at its outer surface.
struct SphereScenario {
  double r0 = 1.0;
  RateFunction Z0dot = RateFunction::constant(-1.0);
  Ablation ablation = Ablation::none();
  double rho = 1.0;
  MaterialModel mat = MaterialModel::neo_hookean(1.0);
  std::optional<InitialBody> initial_body;
};

/// Method-of-characteristics solution of the accreting/ablating sphere on
/// [0, t_end]: velocity, geometry, piecewise F_e, and Cauchy stress.
class SphereAccretion {
 public:
  struct Options {
    int steps_per_unit = 1000;  // RK4 steps per unit of -Z0 / r0
    double quad_tol = 1e-12;    // absolute, in units of G
  };

  SphereAccretion(SphereScenario s, double t_end) : SphereAccretion(std::move(s), t_end, Options{}) {}

  SphereAccretion(SphereScenario s, double t_end, Options opt)
      : s_(std::move(s)), t_end_(t_end), opt_(opt) {
    validate();
    build_history();
  }

  const SphereScenario& scenario() const noexcept { return s_; }
  double t_end() const noexcept { return t_end_; }
  double r0() const noexcept { return s_.r0; }

  double Z0(double t) const { return s_.Z0dot.integral(t); }
  double Z0dot(double t) const { return s_.Z0dot(t); }

  /// Radial velocity -Z0dot r0^2 / r^2.
  double velocity(double r, double t) const {
    if (r < s_.r0) throw DomainError("sphere velocity: r below the inner radius");
    return raw_velocity(r, t);
  }
  double velocity_gradient(double r, double t) const {
    return 2.0 * s_.Z0dot(t) * s_.r0 * s_.r0 / (r * r * r);
  }

  /// Radius at time t of the particle that sat on r0 at t = 0:
  /// r^3 = r0^3 - 3 r0^2 Z0(t).
  double front_radius(double t) const {
    if (t < 0.0) throw DomainError("front_radius: negative time");
    const double r0 = s_.r0;
    return std::cbrt(r0 * r0 * r0 - 3.0 * r0 * r0 * Z0(t));
  }

  /// Constant of the pathline through (r, t): r^3 + 3 Z0(t) r0^2.
  double characteristic_constant(double r, double t) const {
    return r * r * r + 3.0 * Z0(t) * s_.r0 * s_.r0;
  }

  /// Outer radius sampled on t_grid, integrated afresh with RK4.
  TimeSeries outer_radius(const std::vector<double>& t_grid) const {
    if (t_grid.empty()) return {};
    std::vector<double> vals;
    vals.reserve(t_grid.size());
    double t = 0.0;
    double r1 = initial_outer_radius();
    const double h_max = node_step();
    for (double tg : t_grid) {
      if (tg < t) throw DomainError("outer_radius: t_grid must be non-decreasing from 0");
      if (tg > t) {
        const int n = std::max(1, static_cast<int>(std::ceil((tg - t) / h_max - 1e-9)));
        r1 = advance_outer(r1, t, tg, n);
        t = tg;
      }
      vals.push_back(r1);
    }
    return TimeSeries(t_grid, std::move(vals));
  }

  /// Outer radius at time t from the stored history.
  double outer_radius(double t) const {
    if (t < 0.0 || t > t_end_ * (1.0 + 1e-12) + 1e-300)
      throw DomainError("outer_radius: t = " + std::to_string(t) + " outside [0, t_end]");
    t = std::min(t, t_end_);
    const std::size_t k = history_.segment(t);
    const double tk = history_.time(k);
    if (t == tk) return history_.value(k);
    if (t == history_.time(k + 1)) return history_.value(k + 1);
    return advance_outer(history_.value(k), tk, t, 2);
  }

  const TimeSeries& outer_radius_history() const noexcept { return history_; }

  /// dr1/dt at time t.
  double outer_radius_rate(double t) const { return outer_rate(t, outer_radius(t)); }

  Origin region(double r, double t) const {
    if (!s_.initial_body) return Origin::inflowBoundary;
    return classify_origin(r, t, [this](double tt) { return front_radius(tt); },
                           InflowSide::inner);
  }

  /// Elastic deformation at (r, t) inside the body.
  DiagTensor elastic_deformation(double r, double t) const {
    require_inside(r, t);
    return deformation_unchecked(r, t);
  }

  /// Attachment time of the particle at (r, t); defined only for accreted
  /// material.
  double attachment_time(double r, double t) const {
    require_inside(r, t);
    if (region(r, t) != Origin::inflowBoundary)
      throw DomainError("attachment_time: point belongs to the initial body");
    const double r0 = s_.r0;
    const double target = Z0(t) + (r * r * r - r0 * r0 * r0) / (3.0 * r0 * r0);
    auto g = [&](double tau) { return Z0(tau) - target; };
    const double g0 = g(0.0), gt = g(t);
    if (g0 <= 0.0) return 0.0;
    if (gt >= 0.0) return t;
    return find_root(g, 0.0, t, RootOptions{1e-15, 0.0, 300});
  }

  /// Cauchy stress with the traction-free outer surface: sigma_rr is
  /// integrated inward from r1(t) through the radial equilibrium equation
  /// and p is recovered pointwise from the constitutive law.
  StressState stress(double r, double t) const {
    require_inside(r, t);
    const double r1 = outer_radius(t);
    const double rr = std::min(r, r1);
    std::vector<double> breaks = {rr};
    if (s_.initial_body) {
      const double rf = front_radius(t);
      if (rf > rr && rf < r1) breaks.push_back(rf);
    }
    breaks.push_back(r1);
    // sigma_rr(r) = int_r^r1 (2/rho)(sigma_rr - sigma_tt) drho
    auto integrand = [&](double rho) {
      return -2.0 / rho * hoop_minus_radial(deformation_unchecked(rho, t), s_.mat);
    };
    const double G = s_.mat.shear_modulus();
    const double sigma_rr = piecewise_quad(integrand, breaks, opt_.quad_tol * G);
    const DiagTensor F = deformation_unchecked(r, t);
    const DiagTensor dev = cauchy_stress(F, 0.0, s_.mat);
    const double p = dev.rr() - sigma_rr;
    return {cauchy_stress(F, p, s_.mat), p};
  }

  VelocityField velocity_field() const {
    VelocityField v;
    v.v_r = [this](double r, double t) { return raw_velocity(r, t); };
    v.dv_dr = [this](double r, double t) { return velocity_gradient(r, t); };
    v.domain = [this](double t) { return std::pair{s_.r0, outer_radius(t)}; };
    v.breakpoints = rate_breakpoints();
    return v;
  }

 private:
  double raw_velocity(double r, double t) const {
    return -s_.Z0dot(t) * s_.r0 * s_.r0 / (r * r);
  }

  double initial_outer_radius() const {
    return s_.initial_body ? s_.initial_body->r1_initial : s_.r0;
  }

  double outer_rate(double t, double r1) const {
    const double z0 = s_.Z0dot(t);
    const double z1 = s_.ablation.Z1dot(t, r1, z0, s_.r0);
    const GrowthFlux ablation{s_.rho * z1, 0.0, s_.rho};
    return ablation.boundary_normal_speed(raw_velocity(r1, t));
  }

  double advance_outer(double r1, double t0, double t1, int n) const {
    auto f = [this](double t, const std::array<double, 1>& y) {
      return std::array<double, 1>{outer_rate(t, y[0])};
    };
    std::array<double, 1> y = {r1};
    const double h = (t1 - t0) / n;
    for (int i = 0; i < n; ++i) {
      const double t = t0 + i * h;
      y = rk4_step(f, t, y, h);
      if (y[0] < s_.r0 * (1.0 - 1e-14)) throw AblationExhaustedError(t + h, y[0]);
    }
    return y[0];
  }

  double node_step() const {
    const double r0 = s_.r0;
    double scale = std::abs(Z0(t_end_)) / r0;
    if (s_.ablation.kind() == Ablation::Kind::rate)
      scale += std::abs(s_.ablation.rate_function().integral(t_end_)) / r0;
    const int n = std::max(64, static_cast<int>(std::ceil(opt_.steps_per_unit * scale)));
    return t_end_ / n;
  }

  void build_history() {
    const double h = node_step();
    const int n = static_cast<int>(std::llround(t_end_ / h));
    std::vector<double> times(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) times[static_cast<std::size_t>(i)] = i == n ? t_end_ : t_end_ * i / n;
    history_ = outer_radius(times);
  }

  std::vector<double> rate_breakpoints() const { return s_.Z0dot.breakpoints(); }

  void require_inside(double r, double t) const {
    const double r1 = outer_radius(t);
    const double slack = 1e-12 * r1;
    if (r < s_.r0 - slack || r > r1 + slack)
      throw DomainError("sphere: r = " + std::to_string(r) + " outside the body [" +
                        std::to_string(s_.r0) + ", " + std::to_string(r1) +
                        "] at t = " + std::to_string(t));
  }

  DiagTensor deformation_unchecked(double r, double t) const {
    const double r0 = s_.r0;
    if (region(r, t) == Origin::inflowBoundary) {
      const double q = r / r0;
      return DiagTensor::spherical(1.0 / (q * q), q, q);
    }
    const double R = std::cbrt(characteristic_constant(r, t));
    const double frr = R * R * s_.initial_body->F_rr0(R) / (r * r);
    const double ftt = r * s_.initial_body->F_tt0(R) / R;
    return DiagTensor::spherical(frr, ftt, ftt);
  }

  void validate() const {
    std::vector<std::string> issues;
    if (!(s_.r0 > 0.0)) issues.push_back("r0 must be positive");
    if (!(t_end_ > 0.0)) issues.push_back("t_end must be positive");
    if (!(s_.rho > 0.0)) issues.push_back("rho must be positive");
    if (t_end_ > 0.0) {
      if (!(s_.Z0dot.range_on(0.0, t_end_).second < 0.0))
        issues.push_back("Z0dot must be negative on [0, t_end] (accretion)");
      if (s_.ablation.kind() == Ablation::Kind::rate &&
          s_.ablation.rate_function().range_on(0.0, t_end_).second > 0.0)
        issues.push_back("Z1dot must be <= 0 on [0, t_end] (ablation)");
    }
    if (s_.initial_body && s_.r0 > 0.0) {
      const auto& ib = *s_.initial_body;
      if (!(ib.r1_initial > s_.r0)) {
        issues.push_back("initial body outer radius must exceed r0");
      } else {
        for (int i = 0; i <= 100; ++i) {
          const double R = s_.r0 + (ib.r1_initial - s_.r0) * i / 100.0;
          const double frr = ib.F_rr0(R), ftt = ib.F_tt0(R);
          if (!(frr > 0.0 && ftt > 0.0) || std::abs(frr * ftt * ftt - 1.0) > 1e-12) {
            issues.push_back("initial deformation is not incompressible at R = " +
                             std::to_string(R));
            break;
          }
        }
      }
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
  }

  SphereScenario s_;
  double t_end_;
  Options opt_;
  TimeSeries history_;
};

}  // namespace accrete
