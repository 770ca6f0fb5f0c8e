// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "accrete/driver.hpp"

using namespace accrete;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %-34s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string sci(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", x);
  return b;
}

fs::path config(const char* name) { return fs::path(ACCRETE_SOURCE_DIR) / "configs" / name; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("accrete_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

// Closed-form stress of the sphere grown from nothing, in units of G.
double sigma_rr_exact(double r, double r1, double r0) {
  return 0.5 * (std::pow(r0 / r, 4) - std::pow(r0 / r1, 4)) + std::pow(r / r0, 2) - std::pow(r1 / r0, 2);
}
double sigma_tt_exact(double r, double r1, double r0) {
  return -0.5 * (std::pow(r0 / r, 4) + std::pow(r0 / r1, 4)) + 2.0 * std::pow(r / r0, 2) -
         std::pow(r1 / r0, 2);
}

SphereScenario ablating_sphere(double G) {
  SphereScenario s;
  s.r0 = 1.0;
  s.Z0dot = RateFunction::constant(-1.0);
  s.ablation = Ablation::rate(RateFunction::constant(-0.2));
  s.mat = MaterialModel::neo_hookean(G);
  return s;
}

CylinderScenario ramp_cylinder() {
  CylinderScenario s;
  s.R0 = 1.0;
  s.R1 = 2.0;
  s.u_g = RateFunction::constant(0.1);
  s.p_i = RateFunction::ramp(0.0, 0.5);
  return s;
}

const CylinderAccretion& ramp_problem() {
  static const CylinderAccretion p(ramp_cylinder(), 1.0);
  return p;
}

}  // namespace

int main() {
  report(1, "incompressibility", [] {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SphereScenario s = ablating_sphere(1.0);
    s.initial_body = InitialBody{2.0};
    const SphereAccretion sphere(s, 2.0);
    const SphereAccretion bare(ablating_sphere(1.0), 2.0);
    const auto& cyl = ramp_problem().history();
    double worst = 0.0;
    int counts[2] = {0, 0};
    for (int i = 0; i < 10000; ++i) {
      DiagTensor F = DiagTensor::identity(Frame::polar2D);
      Origin o;
      const double w = u(rng);
      if (i % 3 == 0) {
        const double t = 2.0 * u(rng);
        const double r = 1.0 + w * (sphere.outer_radius(t) - 1.0);
        F = sphere.elastic_deformation(r, t);
        o = sphere.region(r, t);
      } else if (i % 3 == 1) {
        const double t = 0.01 + 1.99 * u(rng);
        const double r = 1.0 + w * (bare.outer_radius(t) - 1.0);
        F = bare.elastic_deformation(r, t);
        o = bare.region(r, t);
      } else {
        const double t = u(rng);
        const double r = cyl.r_in_at(t) + w * (cyl.r_out_at(t) - cyl.r_in_at(t));
        F = cyl.elastic_deformation(r, t);
        o = cyl.region(r, t);
      }
      worst = std::max(worst, std::abs(det(F) - 1.0));
      ++counts[o == Origin::inflowBoundary];
    }
    return Outcome{worst <= 1e-12 && counts[0] > 0 && counts[1] > 0,
                   "max |det F - 1| = " + sci(worst) + " over 10^4 samples (" + std::to_string(counts[1]) +
                       " accreted, " + std::to_string(counts[0]) + " initial); tol 1e-12"};
  });

  report(2, "sphere closed-form stress", [] {
    const double G = 1.7;
    const SphereAccretion p(ablating_sphere(G), 2.0);
    double worst = 0.0, outer = 0.0;
    for (int it = 1; it <= 10; ++it) {
      const double t = 0.2 * it;
      const double r1 = p.outer_radius(t);
      for (int ir = 0; ir < 100; ++ir) {
        const double r = 1.0 + (r1 - 1.0) * ir / 99.0;
        const StressState st = p.stress(r, t);
        worst = std::max({worst, std::abs(st.sigma.rr() - G * sigma_rr_exact(r, r1, 1.0)),
                          std::abs(st.sigma.tt() - G * sigma_tt_exact(r, r1, 1.0)),
                          std::abs(st.sigma.pp() - G * sigma_tt_exact(r, r1, 1.0))});
      }
      outer = std::max(outer, std::abs(p.stress(r1, t).sigma.rr()));
    }
    return Outcome{worst <= 1e-10 * G && outer <= 1e-10 * G,
                   "max |sigma - exact| / G = " + sci(worst / G) + ", max |sigma_rr(r1)| / G = " + sci(outer / G) +
                       " at 100 radii x 10 times; tol 1e-10"};
  });

  report(3, "sphere geometry", [] {
    SphereScenario s = ablating_sphere(1.0);
    s.ablation = Ablation::none();
    s.Z0dot = RateFunction::ramp(-1.0, -0.5);
    const SphereAccretion grow(s, 3.0);
    double rel = 0.0;
    for (int i = 0; i <= 300; ++i) {
      const double t = 0.01 * i;
      const double exact = std::cbrt(1.0 - 3.0 * grow.Z0(t));
      rel = std::max(rel, std::abs(grow.outer_radius(t) - exact) / exact);
    }
    s = ablating_sphere(1.0);
    s.ablation = Ablation::treadmill();
    s.initial_body = InitialBody{1.5};
    const SphereAccretion mill(s, 10.0);
    double drift = 0.0;
    for (int i = 0; i <= 1000; ++i) drift = std::max(drift, std::abs(mill.outer_radius(0.01 * i) - 1.5) / 1.5);
    return Outcome{rel <= 1e-8 && drift <= 1e-6, "growth rel err = " + sci(rel) + " (tol 1e-8), treadmill drift = " +
                                                     sci(drift) + " over 10 units (tol 1e-6)"};
  });

  report(4, "cylinder zero load", [] {
    CylinderScenario s = ramp_cylinder();
    s.p_i = RateFunction::constant(0.0);
    s.u_g = RateFunction::table({{0.0, 0.1}, {1.0, 0.25}, {2.0, 0.05}});
    const CylinderAccretion p(s, 2.0);
    const auto& h = p.history();
    bool pinned = true;
    double fi = 0.0, sig = 0.0, rout = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double t = h.time(k);
      pinned = pinned && h.r_in_node(k) == s.R0;
      const double exact = s.R1 + s.u_g.integral(t);
      rout = std::max(rout, std::abs(h.r_out_node(k) - exact) / exact);
      for (int i = 0; i <= 10; ++i) {
        const double r = s.R0 + (h.r_out_node(k) - s.R0) * i / 10.0;
        const DiagTensor F = p.elastic_deformation(r, t);
        const StressState st = p.stress(r, t);
        fi = std::max({fi, std::abs(F.rr() - 1.0), std::abs(F.tt() - 1.0)});
        sig = std::max({sig, std::abs(st.sigma.rr()), std::abs(st.sigma.tt())});
      }
    }
    return Outcome{pinned && fi <= 1e-10 && sig <= 1e-10 && rout <= 1e-8,
                   std::string("r_in == R0 exactly: ") + (pinned ? "yes" : "no") + ", |F - I| = " + sci(fi) +
                       ", |sigma| / G = " + sci(sig) + " (tol 1e-10), r_out rel err = " + sci(rout) +
                       " (tol 1e-8)"};
  });

  report(5, "cylinder global identity", [] {
    // r_out integrated on its own from the outer-surface kinematics, using
    // only the inner-radius history, then checked against the stored area
    const CylinderScenario s = ramp_cylinder();
    const auto& h = ramp_problem().history();
    const double ref = s.R1 * s.R1 - s.R0 * s.R0;
    double ident = 0.0, stored = 0.0, ro = s.R1;
    for (std::size_t k = 0; k < h.size(); ++k) {
      if (k > 0) {
        const double t0 = h.time(k - 1), t1 = h.time(k);
        const double ri0 = h.r_in_node(k - 1), slope = (h.r_in_node(k) - ri0) / (t1 - t0);
        auto rate = [&](double t, double r) { return (ri0 + slope * (t - t0)) * slope / r + s.u_g(t); };
        const int n = 20;
        const double dt = (t1 - t0) / n;
        for (int i = 0; i < n; ++i) {
          const double t = t0 + i * dt;
          const double k1 = rate(t, ro), k2 = rate(t + dt / 2, ro + dt / 2 * k1);
          const double k3 = rate(t + dt / 2, ro + dt / 2 * k2), k4 = rate(t + dt, ro + dt * k3);
          ro += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
      }
      const double ri = h.r_in_node(k);
      ident = std::max(ident, std::abs(ro * ro - ri * ri - 2.0 * h.A_node(k) - ref) / ref);
      const double rs = h.r_out_node(k);
      stored = std::max(stored, std::abs(rs * rs - ri * ri - 2.0 * h.A_node(k) - ref) / ref);
    }
    return Outcome{ident <= 1e-8 && stored <= 1e-8,
                   "max rel err = " + sci(ident) + " with r_out integrated independently, " + sci(stored) +
                       " with stored r_out, at " + std::to_string(h.size()) + " nodes; tol 1e-8"};
  });

  report(6, "cylinder residual closure", [] {
    const auto& p = ramp_problem();
    const auto& h = p.history();
    const double G = p.scenario().mat.shear_modulus();
    double stored = 0.0, fresh = 0.0, jump = 0.0;
    for (double r : p.step_residuals()) stored = std::max(stored, std::abs(r));
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double t = h.time(k);
      fresh = std::max(fresh, std::abs(p.outer_radial_stress(t)));
      if (k == 0) continue;
      const double rh = h.interface_radius(t), d = 1e-12 * rh;
      const DiagTensor a = p.elastic_deformation(rh - d, t), b = p.elastic_deformation(rh + d, t);
      jump = std::max({jump, std::abs(a.rr() - b.rr()), std::abs(a.tt() - b.tt())});
    }
    return Outcome{stored <= 1e-10 * G && fresh <= 1e-10 * G && jump <= 1e-10,
                   "max |p_i - RHS(r_in)| / G = " + sci(stored / G) + " (recomputed " + sci(fresh / G) +
                       ", tol 1e-10), F jump at interface = " + sci(jump) + " (tol 1e-10)"};
  });

  report(7, "inverse motion vs transport route", [] {
    const auto& h = ramp_problem().history();
    double worst = 0.0;
    for (int it = 1; it <= 20; ++it) {
      const double t = 0.05 * it;
      const double lo = h.r_in_at(t), hi = h.r_out_at(t);
      for (int ir = 0; ir < 50; ++ir) {
        const double r = lo + (hi - lo) * (ir + 0.5) / 50.0;
        const DiagTensor a = h.inverse_motion_deformation(r, t);
        const DiagTensor b = h.elastic_deformation(r, t);
        worst = std::max({worst, std::abs(a.rr() - b.rr()), std::abs(a.tt() - b.tt())});
      }
    }
    return Outcome{worst <= 1e-8, "max |F_inverse - F_characteristic| = " + sci(worst) + " on 50 x 20 grid; tol 1e-8"};
  });

  report(8, "grid transport convergence", [] {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<int> cells = {64, 128, 256, 512};
    DriverOptions o;
    const auto sph = cmd_compare(load_config(config("sphere_ablation.ini")), cells, scratch("c8s"), o);
    const auto cyl = cmd_compare(load_config(config("cylinder_smooth_ramp.ini")), cells, scratch("c8c"), o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto line = [](const char* name, const RunReport& r) {
      std::string s = std::string(name) + " linf";
      for (const auto& c : r.convergence) s += " " + sci(c.linf);
      return s + " order " + sci(r.fitted_order.value_or(NAN));
    };
    auto monotone = [](const RunReport& r) {
      for (std::size_t i = 1; i < r.convergence.size(); ++i)
        if (!(r.convergence[i].linf < r.convergence[i - 1].linf)) return false;
      return r.convergence.size() == 4;
    };
    const bool ok = monotone(sph) && monotone(cyl) && sph.fitted_order.value_or(0) >= 0.9 &&
                    cyl.fitted_order.value_or(0) >= 0.9 && secs <= 30.0;
    return Outcome{ok, line("sphere", sph) + "; cylinder " + line("", cyl).substr(1) +
                           "; min order 0.9, suite " + sci(secs) + " s (max 30)"};
  });

  report(9, "characteristic conservation", [] {
    const auto sph = cmd_characteristics(load_config(config("sphere_ablation.ini")), {}, scratch("c9s"));
    auto cfg = load_config(config("sphere_treadmill.ini"));
    const auto mill = cmd_characteristics(cfg, parse_seeds("r:1,r:1.2,r:1.5,tau:0,tau:3,tau:7"), scratch("c9t"));
    const auto cyl = cmd_characteristics(load_config(config("cylinder_ramp.ini")),
                                         parse_seeds("tau:0,tau:0.25,tau:0.5,tau:0.75,r:1,r:1.5,r:2"),
                                         scratch("c9c"));
    const double s = std::max(*sph.max_invariant_residual, *mill.max_invariant_residual);
    const double c = *cyl.max_invariant_residual;
    return Outcome{s <= 1e-8 && c <= 1e-8, "sphere r^3 + 3 Z0 r0^2 drift = " + sci(s) + ", cylinder r^2 - r_in^2 drift = " +
                                               sci(c) + " at 1000 steps per unit time; tol 1e-8"};
  });

  report(10, "determinism", [] {
    bool same = true;
    std::size_t bytes = 0;
    for (const char* name : {"sphere_ablation.ini", "cylinder_ramp.ini", "sphere_treadmill.ini"}) {
      const auto cfg = load_config(config(name));
      DriverOptions one, many;
      one.threads = 1;
      many.threads = 8;
      const auto a = scratch("c10a"), b = scratch("c10b");
      cmd_run(cfg, a, one);
      cmd_run(cfg, b, many);
      const std::string x = read_text(a / "results.csv"), y = read_text(b / "results.csv");
      same = same && x == y;
      bytes += x.size();
    }
    return Outcome{same, std::string(same ? "byte-identical" : "DIFFERENT") + " results.csv across repeated runs (" +
                             std::to_string(bytes) + " bytes, 1 and 8 workers)"};
  });

  // informational: the linearly ramped tube has a slope kink at the interface
  try {
    const auto r = cmd_compare(load_config(config("cylinder_ramp.ini")), {64, 128, 256, 512}, scratch("info"));
    std::printf("INFO      linear pressure ramp: fitted order %.3f (kinked field, not a criterion)\n",
                r.fitted_order.value_or(NAN));
  } catch (const std::exception& e) {
    std::printf("INFO      linear pressure ramp study failed: %s\n", e.what());
  }

  std::printf("%d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}
