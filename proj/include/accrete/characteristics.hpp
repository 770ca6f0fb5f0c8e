#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "accrete/errors.hpp"
#include "accrete/numerics.hpp"
#include "accrete/tensor.hpp"

namespace accrete {

/// Radial velocity field v = v_r(r, t) e_r on a time-dependent radial
/// domain [r_lo(t), r_hi(t)].
struct VelocityField {
  std::function<double(double r, double t)> v_r;
  /// Exact radial derivative of v_r.
  std::function<double(double r, double t)> dv_dr;
  std::function<std::pair<double, double>(double t)> domain;
  /// Times at which v is not smooth in t (history nodes); integrators land
  /// on them exactly.
  std::vector<double> breakpoints;
};

enum class Geometry { sphere, cylinder };

inline Frame frame_of(Geometry g) noexcept {
  return g == Geometry::sphere ? Frame::spherical3D : Frame::polar2D;
}

/// Which surface of the body receives new material.
enum class InflowSide { inner, outer };

enum class Origin { initialCondition, inflowBoundary };

/// Origin of a characteristic: the particle was in the body at t = 0 at
/// radius r_at_t0, or it attached through the inflow surface at time tau.
struct FromInitialBody {
  double r_at_t0;
};
struct FromInflow {
  double tau;
};
using CurveOrigin = std::variant<FromInitialBody, FromInflow>;

struct CurveSample {
  double t;
  double r;
  DiagTensor F;
};

struct CharacteristicCurve {
  std::vector<CurveSample> samples;
  CurveOrigin origin;
  /// True if the curve left the body before t_end and was truncated.
  bool exited = false;
};

namespace detail {
inline bool inside_domain(const VelocityField& v, double r, double t) {
  const auto [lo, hi] = v.domain(t);
  const double slack = 1e-9 * std::max(1.0, std::abs(hi));
  return r >= lo - slack && r <= hi + slack;
}

/// Splits [t0, t1] at interior breakpoints and hands out n_steps in
/// proportion to sub-interval length (at least one step per piece).
inline std::vector<std::pair<double, int>> step_plan(
    const std::vector<double>& breakpoints, double t0, double t1, int n_steps) {
  std::vector<double> cuts = {t0};
  for (double b : breakpoints)
    if (b > t0 && b < t1) cuts.push_back(b);
  cuts.push_back(t1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<double, int>> plan;  // (piece end, steps)
  const double total = t1 - t0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double len = cuts[i] - cuts[i - 1];
    if (!(len > 0.0)) continue;
    const int n = std::max(1, static_cast<int>(std::ceil(n_steps * len / total - 1e-9)));
    plan.emplace_back(cuts[i], n);
  }
  return plan;
}
}  // namespace detail

/// Integrates the characteristic system of the F_e transport equation,
///   dr/dt = v_r,  dF_rr/dt = (dv_r/dr) F_rr,  dF_tt/dt = (v_r/r) F_tt
/// (and dF_pp/dt = (v_r/r) F_pp on a sphere), with fixed-step RK4 from
/// (r_start, t_start) to t_end. The curve is truncated with `exited` set
/// when it leaves the body.
inline CharacteristicCurve trace(const VelocityField& v, double r_start,
                                 double t_start, double t_end,
                                 const DiagTensor& F_start, Geometry geom,
                                 int n_steps,
                                 std::optional<CurveOrigin> origin = std::nullopt) {
  if (n_steps < 1) throw DomainError("trace: n_steps must be >= 1");
  if (t_end < t_start) throw DomainError("trace: t_end precedes t_start");
  if (F_start.frame() != frame_of(geom))
    throw DomainError("trace: F_start frame does not match geometry");
  F_start.require_positive("trace");
  if (!detail::inside_domain(v, r_start, t_start))
    throw DomainError("trace: seed r = " + std::to_string(r_start) +
                      " lies outside the body at t = " + std::to_string(t_start));

  CharacteristicCurve curve;
  curve.origin = origin ? *origin
                 : t_start > 0.0 ? CurveOrigin{FromInflow{t_start}}
                                 : CurveOrigin{FromInitialBody{r_start}};
  curve.samples.push_back({t_start, r_start, F_start});
  if (t_end == t_start) return curve;

  const bool sphere = geom == Geometry::sphere;
  using State = std::array<double, 4>;
  // Velocity is sampled with one-sided limits at the ends of each piece, so
  // a field that jumps at a breakpoint is read from the piece being crossed.
  double piece_lo = t_start, piece_hi = t_end;
  auto rhs = [&](double t_raw, const State& y) -> State {
    const double eta = 1e-13 * std::abs(piece_hi - piece_lo);
    const double t = std::clamp(t_raw, std::min(piece_lo, piece_hi) + eta,
                                std::max(piece_lo, piece_hi) - eta);
    const double r = y[0];
    const double vr = v.v_r(r, t);
    const double hoop = vr / r;
    return {vr, v.dv_dr(r, t) * y[1], hoop * y[2], sphere ? hoop * y[3] : 0.0};
  };

  State y = {r_start, F_start.rr(), F_start.tt(), sphere ? F_start.pp() : 1.0};
  double t = t_start;
  for (const auto& [piece_end, n] : detail::step_plan(v.breakpoints, t_start, t_end, n_steps)) {
    const double t_piece0 = t;
    piece_lo = t_piece0;
    piece_hi = piece_end;
    const double h = (piece_end - t_piece0) / n;
    for (int s = 0; s < n; ++s) {
      y = rk4_step(rhs, t, y, h);
      t = s + 1 == n ? piece_end : t_piece0 + (s + 1) * h;
      if (!detail::inside_domain(v, y[0], t)) {
        curve.exited = true;
        return curve;
      }
      const DiagTensor F = sphere ? DiagTensor::spherical(y[1], y[2], y[3])
                                  : DiagTensor::polar(y[1], y[2]);
      curve.samples.push_back({t, y[0], F});
    }
  }
  return curve;
}

/// Region of space-time a point (r, t) belongs to, relative to the dividing
/// front traced by the particle that bounded the initial body at the inflow
/// surface. Material deposited through an inner inflow surface lies inside
/// the front; through an outer one, outside it. Points on the front count
/// as initial-condition points.
inline Origin classify_origin(double r, double t,
                              const std::function<double(double)>& front,
                              InflowSide side) {
  const double rf = front(t);
  if (side == InflowSide::inner) return r < rf ? Origin::inflowBoundary : Origin::initialCondition;
  return r > rf ? Origin::inflowBoundary : Origin::initialCondition;
}

}  // namespace accrete
