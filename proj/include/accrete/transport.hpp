#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "accrete/characteristics.hpp"
#include "accrete/cylinder.hpp"
#include "accrete/errors.hpp"
#include "accrete/sphere.hpp"
#include "accrete/tensor.hpp"

namespace accrete {

/// Radial grid with a fixed node count, mapped affinely onto [lo, hi].
class MovingGrid {
 public:
  MovingGrid(double lo, double hi, int n_cells, double t) : t_(t), n_(n_cells) {
    if (n_cells < 1) throw DomainError("MovingGrid: n_cells must be >= 1");
    if (!(hi > lo)) throw DomainError("MovingGrid: empty domain");
    nodes_.resize(static_cast<std::size_t>(n_cells) + 1);
    for (int i = 0; i <= n_cells; ++i) nodes_[static_cast<std::size_t>(i)] = position(lo, hi, i);
  }

  double t() const noexcept { return t_; }
  int n_cells() const noexcept { return n_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double lo() const noexcept { return nodes_.front(); }
  double hi() const noexcept { return nodes_.back(); }
  double min_spacing() const noexcept { return (hi() - lo()) / n_; }
  /// Fixed logical coordinate of node i in [0, 1].
  double logical(std::size_t i) const noexcept { return static_cast<double>(i) / n_; }

  MovingGrid remapped(double lo, double hi, double t) const { return MovingGrid(lo, hi, n_, t); }

 private:
  double position(double lo, double hi, int i) const {
    if (i == 0) return lo;
    if (i == n_) return hi;
    return lo + (hi - lo) * i / n_;
  }
  double t_;
  int n_;
  std::vector<double> nodes_;
};

/// F_e sampled on the nodes of a grid. F_pp is empty on a cylinder.
struct FieldSnapshot {
  double t = 0.0;
  std::vector<double> r;
  std::vector<double> F_rr, F_tt, F_pp;

  Frame frame() const noexcept { return F_pp.empty() ? Frame::polar2D : Frame::spherical3D; }
  std::size_t size() const noexcept { return r.size(); }

  DiagTensor F(std::size_t i) const {
    return F_pp.empty() ? DiagTensor::polar(F_rr[i], F_tt[i])
                        : DiagTensor::spherical(F_rr[i], F_tt[i], F_pp[i]);
  }
  void set(std::size_t i, const DiagTensor& F) {
    F_rr[i] = F.rr();
    F_tt[i] = F.tt();
    if (!F_pp.empty()) F_pp[i] = F.pp();
  }
  bool all_positive() const {
    for (std::size_t i = 0; i < size(); ++i)
      if (!F(i).is_positive()) return false;
    return true;
  }
};

/// Domain at the end of a step and its boundary velocities.
struct DomainMotion {
  double r_lo, r_hi;
  double lo_rate, hi_rate;
};

namespace detail {
inline std::array<double, 3> log_components(const FieldSnapshot& s, std::size_t i) {
  return {std::log(s.F_rr[i]), std::log(s.F_tt[i]),
          s.F_pp.empty() ? 0.0 : std::log(s.F_pp[i])};
}

// Linear interpolation of log F at x on the snapshot grid, clamped to its
// end values outside.
inline std::array<double, 3> interpolate_log(const FieldSnapshot& s, double x) {
  const auto& r = s.r;
  if (x <= r.front()) return log_components(s, 0);
  if (x >= r.back()) return log_components(s, r.size() - 1);
  const std::size_t j =
      static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), x) - r.begin()) - 1;
  const double w = (x - r[j]) / (r[j + 1] - r[j]);
  const auto a = log_components(s, j), b = log_components(s, j + 1);
  return {a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1]), a[2] + w * (b[2] - a[2])};
}
}  // namespace detail

/// One semi-Lagrangian step of dF/dt + v dF/dr = diag(dv/dr, v/r, v/r) F
/// from snapshot.t to snapshot.t + dt onto the grid mapped to the new
/// domain. Feet of characteristics come from a backward midpoint rule; log F
/// is interpolated linearly there and the source is applied in exponential
/// form at the path midpoint. The inflow node takes inflow_F; the outflow
/// side uses only interior data.
inline FieldSnapshot step(const FieldSnapshot& snap, const VelocityField& v,
                          const DomainMotion& motion, double dt, const DiagTensor& inflow_F,
                          InflowSide inflow_side, double max_courant = 0.9) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  const std::size_t n = snap.size();
  if (n < 2) throw DomainError("step: snapshot needs at least two nodes");
  if (inflow_F.frame() != snap.frame()) throw DomainError("step: inflow_F frame mismatch");
  const int n_cells = static_cast<int>(n) - 1;
  const MovingGrid grid(motion.r_lo, motion.r_hi, n_cells, snap.t + dt);
  const double t1 = snap.t + dt;
  const double th = snap.t + 0.5 * dt;

  double max_rel = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.nodes()[i];
    const double w = grid.logical(i);
    const double grid_speed = (1.0 - w) * motion.lo_rate + w * motion.hi_rate;
    max_rel = std::max(max_rel, std::abs(v.v_r(x, t1) - grid_speed));
  }
  const double dr = std::min(grid.min_spacing(), (snap.r.back() - snap.r.front()) / n_cells);
  const double courant = dt * max_rel / dr;
  if (courant > max_courant) throw CflError(courant, max_courant * dr / max_rel);

  const bool sphere = snap.frame() == Frame::spherical3D;
  auto source = [&](double x, double t) {
    const double vr = v.v_r(x, t);
    return std::array<double, 3>{v.dv_dr(x, t), vr / x, sphere ? vr / x : 0.0};
  };
  const double old_lo = snap.r.front(), old_hi = snap.r.back();

  FieldSnapshot out;
  out.t = t1;
  out.r = grid.nodes();
  out.F_rr.resize(n);
  out.F_tt.resize(n);
  if (sphere) out.F_pp.resize(n);

  const std::size_t inflow_node = inflow_side == InflowSide::inner ? 0 : n - 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == inflow_node) {
      out.set(i, inflow_F);
      continue;
    }
    const double x = grid.nodes()[i];
    const double xm = x - 0.5 * dt * v.v_r(x, t1);
    const double foot = x - dt * v.v_r(xm, th);

    std::array<double, 3> logF;
    double span = dt;
    double x_mid = xm, t_mid = th;
    const bool entered = inflow_side == InflowSide::inner ? foot < old_lo : foot > old_hi;
    if (entered) {
      // The path came in through the inflow surface during the step.
      const double b_old = inflow_side == InflowSide::inner ? old_lo : old_hi;
      const double b_new = inflow_side == InflowSide::inner ? motion.r_lo : motion.r_hi;
      const double denom = (x - foot) - (b_new - b_old);
      const double theta = denom != 0.0 ? std::clamp((b_old - foot) / denom, 0.0, 1.0) : 0.0;
      const double xc = b_old + theta * (b_new - b_old);
      span = (1.0 - theta) * dt;
      x_mid = 0.5 * (xc + x);
      t_mid = t1 - 0.5 * span;
      logF = {std::log(inflow_F.rr()), std::log(inflow_F.tt()),
              sphere ? std::log(inflow_F.pp()) : 0.0};
    } else {
      logF = detail::interpolate_log(snap, foot);
    }
    const auto s = source(x_mid, t_mid);
    const double frr = std::exp(logF[0] + span * s[0]);
    const double ftt = std::exp(logF[1] + span * s[1]);
    if (sphere) {
      out.set(i, DiagTensor::spherical(frr, ftt, std::exp(logF[2] + span * s[2])));
    } else {
      out.set(i, DiagTensor::polar(frr, ftt));
    }
  }
  return out;
}

/// What the grid solver needs from a problem. Only inflow boundary data is
/// exposed; the outflow side never receives a boundary value.
class TransportAdapter {
 public:
  virtual ~TransportAdapter() = default;
  virtual Geometry geometry() const = 0;
  virtual InflowSide inflow_side() const = 0;
  virtual VelocityField velocity() const = 0;
  virtual std::pair<double, double> domain(double t) const = 0;
  virtual std::pair<double, double> domain_rates(double t) const = 0;
  virtual DiagTensor inflow_F(double t) const = 0;
  /// F_e on the whole domain at the start time.
  virtual DiagTensor initial_F(double r) const = 0;
  virtual double t_start() const = 0;
  /// Times at which the velocity field is not smooth.
  virtual std::vector<double> breakpoints() const { return {}; }
  /// Reference solution for error measurement.
  virtual DiagTensor exact_F(double r, double t) const = 0;
};

/// Sphere growing at its fixed inner surface; starts from the closed-form
/// field at t_start > 0 since the body is empty at t = 0 without an initial
/// body.
class SphereTransport : public TransportAdapter {
 public:
  SphereTransport(const SphereAccretion& problem, double t_start)
      : p_(&problem), t0_(t_start) {
    if (!(t_start >= 0.0)) throw DomainError("SphereTransport: t_start must be >= 0");
    if (!(p_->outer_radius(t_start) > p_->r0()))
      throw DomainError("SphereTransport: the body is empty at t_start");
  }
  Geometry geometry() const override { return Geometry::sphere; }
  InflowSide inflow_side() const override { return InflowSide::inner; }
  VelocityField velocity() const override { return p_->velocity_field(); }
  std::pair<double, double> domain(double t) const override {
    return {p_->r0(), p_->outer_radius(t)};
  }
  std::pair<double, double> domain_rates(double t) const override {
    return {0.0, p_->outer_radius_rate(t)};
  }
  DiagTensor inflow_F(double) const override { return DiagTensor::identity(Frame::spherical3D); }
  DiagTensor initial_F(double r) const override { return exact_F(r, t0_); }
  double t_start() const override { return t0_; }
  DiagTensor exact_F(double r, double t) const override {
    const auto [lo, hi] = domain(t);
    return p_->elastic_deformation(std::clamp(r, lo, hi), t);
  }

 private:
  const SphereAccretion* p_;
  double t0_;
};

/// Cylinder accreting at its outer surface on a precomputed geometry history.
class CylinderTransport : public TransportAdapter {
 public:
  explicit CylinderTransport(const CylinderAccretion& problem) : p_(&problem) {}
  Geometry geometry() const override { return Geometry::cylinder; }
  InflowSide inflow_side() const override { return InflowSide::outer; }
  VelocityField velocity() const override { return hist().velocity_field(); }
  std::pair<double, double> domain(double t) const override {
    const auto s = hist().at(t);
    return {s.r_in, hist().outer_from(s)};
  }
  std::pair<double, double> domain_rates(double t) const override {
    const auto s = hist().at(t);
    const double r_out = hist().outer_from(s);
    const double v_out = s.r_in * s.r_in_rate / r_out;
    return {s.r_in_rate, v_out + p_->scenario().u_g(t)};
  }
  DiagTensor inflow_F(double) const override { return DiagTensor::identity(Frame::polar2D); }
  DiagTensor initial_F(double) const override { return DiagTensor::identity(Frame::polar2D); }
  double t_start() const override { return 0.0; }
  std::vector<double> breakpoints() const override { return hist().times(); }
  DiagTensor exact_F(double r, double t) const override {
    const auto [lo, hi] = domain(t);
    return hist().elastic_deformation(std::clamp(r, lo, hi), t);
  }

 private:
  const GeometryHistory& hist() const { return p_->history(); }
  const CylinderAccretion* p_;
};

struct SolveOptions {
  double cfl = 0.9;
  /// Snapshot times; t_end is always included.
  std::vector<double> output_times;
};

/// Marches the grid solver from the adapter's start time to t_end with the
/// largest step allowed by cfl, landing exactly on output times and on the
/// adapter's breakpoints. Returns one snapshot per output time.
inline std::vector<FieldSnapshot> solve(const TransportAdapter& a, int n_cells, double t_end,
                                        const SolveOptions& opt = {}) {
  if (n_cells < 8) throw DomainError("solve: n_cells must be >= 8");
  if (!(opt.cfl > 0.0 && opt.cfl <= 0.9)) throw DomainError("solve: cfl must lie in (0, 0.9]");
  const double t0 = a.t_start();
  if (!(t_end >= t0)) throw DomainError("solve: t_end precedes the start time");

  std::vector<double> outputs;
  for (double t : opt.output_times)
    if (t >= t0 && t < t_end) outputs.push_back(t);
  outputs.push_back(t_end);
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());

  std::vector<double> stops = outputs;
  for (double b : a.breakpoints())
    if (b > t0 && b < t_end) stops.push_back(b);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  const VelocityField v = a.velocity();
  const auto [lo0, hi0] = a.domain(t0);
  const MovingGrid grid(lo0, hi0, n_cells, t0);
  FieldSnapshot snap;
  snap.t = t0;
  snap.r = grid.nodes();
  const bool sphere = a.geometry() == Geometry::sphere;
  snap.F_rr.resize(grid.size());
  snap.F_tt.resize(grid.size());
  if (sphere) snap.F_pp.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) snap.set(i, a.initial_F(snap.r[i]));

  std::vector<FieldSnapshot> result;
  std::size_t next_out = 0, next_stop = 0;
  while (next_out < outputs.size() && outputs[next_out] <= t0) {
    result.push_back(snap);
    ++next_out;
  }
  while (next_stop < stops.size() && stops[next_stop] <= t0) ++next_stop;

  const double dr = (hi0 - lo0) / n_cells;
  while (snap.t < t_end) {
    // Step size from the current relative speed, clipped to the next stop.
    const auto [lo_rate, hi_rate] = a.domain_rates(snap.t);
    double max_rel = 0.0;
    for (std::size_t i = 0; i < snap.size(); ++i) {
      const double w = static_cast<double>(i) / n_cells;
      max_rel = std::max(max_rel, std::abs(v.v_r(snap.r[i], snap.t) -
                                           ((1.0 - w) * lo_rate + w * hi_rate)));
    }
    const double spacing = std::min(dr, (snap.r.back() - snap.r.front()) / n_cells);
    double dt = max_rel > 0.0 ? opt.cfl * spacing / max_rel : t_end - snap.t;
    const double target = stops[next_stop];
    bool lands = false;
    if (snap.t + dt >= target * (1.0 - 1e-14) || target - snap.t - dt < 1e-12 * dt) {
      dt = target - snap.t;
      lands = true;
    }
    for (int attempt = 0;; ++attempt) {
      const double t1 = lands ? target : snap.t + dt;
      const auto [lo, hi] = a.domain(t1);
      const auto [lr, hr] = a.domain_rates(t1);
      try {
        snap = step(snap, v, DomainMotion{lo, hi, lr, hr}, t1 - snap.t, a.inflow_F(t1),
                    a.inflow_side(), 0.9);
        snap.t = t1;
        break;
      } catch (const CflError& e) {
        if (attempt >= 20) throw;
        dt = 0.95 * e.suggested_dt();
        lands = false;
      }
    }
    if (lands) ++next_stop;
    if (next_out < outputs.size() && snap.t >= outputs[next_out]) {
      result.push_back(snap);
      ++next_out;
    }
  }
  return result;
}

struct ErrorNorms {
  double linf = 0.0;
  double l2 = 0.0;    // root mean square over nodes and components
  double det_drift = 0.0;  // max |det F - 1|
};

inline ErrorNorms error_norms(const FieldSnapshot& snap, const TransportAdapter& a) {
  ErrorNorms e;
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < snap.size(); ++i) {
    const DiagTensor F = snap.F(i);
    const DiagTensor ref = a.exact_F(snap.r[i], snap.t);
    for (std::size_t c = 0; c < F.size(); ++c) {
      const double d = std::abs(F[c] - ref[c]);
      e.linf = std::max(e.linf, d);
      sq += d * d;
      ++count;
    }
    e.det_drift = std::max(e.det_drift, std::abs(det(F) - 1.0));
  }
  e.l2 = count ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
  return e;
}

/// Least-squares convergence order p in err ~ C n^-p.
inline double fitted_order(const std::vector<int>& n_cells, const std::vector<double>& errors) {
  if (n_cells.size() != errors.size() || n_cells.size() < 2)
    throw DomainError("fitted_order: need at least two matching samples");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(n_cells.size());
  for (std::size_t i = 0; i < n_cells.size(); ++i) {
    if (!(errors[i] > 0.0)) throw DomainError("fitted_order: errors must be positive");
    const double x = std::log(static_cast<double>(n_cells[i]));
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace accrete
