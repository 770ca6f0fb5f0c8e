#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "accrete/characteristics.hpp"
#include "accrete/cylinder.hpp"
#include "accrete/errors.hpp"
#include "accrete/scenario_io.hpp"
#include "accrete/sphere.hpp"
#include "accrete/transport.hpp"

namespace accrete {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { exit_ok = 0, exit_residual = 1, exit_config = 2, exit_solver = 3 };

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool at_least = false;  // tolerance is a lower bound
};

struct ConvergenceRow {
  int n_cells = 0;
  double linf = 0.0;
  double l2 = 0.0;
  double det_drift = 0.0;
};

/// Summary of one driver command. Residuals are recomputed from the files
/// the command wrote.
struct RunReport {
  std::string command;
  std::string problem;
  std::string summary;
  double wall_seconds = 0.0;
  std::optional<double> max_det_error;
  std::optional<double> outer_radial_residual;   // |sigma_rr(outer)| / G
  std::optional<double> inner_traction_residual; // |sigma_rr(inner) + p_i| / G
  std::optional<double> linf, l2;
  std::vector<ConvergenceRow> convergence;
  std::optional<double> fitted_order;
  std::optional<double> max_invariant_residual;
  std::vector<Check> checks;
  std::vector<std::string> files;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
  int exit_code() const { return passed() ? exit_ok : exit_residual; }

  void check(std::string name, double value, double tol) {
    checks.push_back({std::move(name), value, tol, value <= tol, false});
  }
  void check_at_least(std::string name, double value, double min) {
    checks.push_back({std::move(name), value, min, value >= min, true});
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["problem"] = problem;
    j["summary"] = summary;
    j["wall_seconds"] = wall_seconds;
    auto put = [&j](const char* k, const std::optional<double>& v) {
      if (v) j[k] = *v;
    };
    put("max_det_error", max_det_error);
    put("outer_radial_residual", outer_radial_residual);
    put("inner_traction_residual", inner_traction_residual);
    put("linf", linf);
    put("l2", l2);
    put("fitted_order", fitted_order);
    put("max_invariant_residual", max_invariant_residual);
    if (!convergence.empty()) {
      auto& rows = j["convergence"] = nlohmann::ordered_json::array();
      for (const auto& c : convergence)
        rows.push_back({{"n_cells", c.n_cells}, {"linf", c.linf}, {"l2", c.l2}, {"det_drift", c.det_drift}});
    }
    auto& cs = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks)
      cs.push_back({{"name", c.name}, {"value", c.value}, {c.at_least ? "minimum" : "tolerance", c.tolerance},
                    {"passed", c.passed}});
    j["passed"] = passed();
    j["files"] = files;
    return j;
  }
};

struct DriverOptions {
  double tol_scale = 1.0;
  /// Worker cap; 0 reads ACCRETE_THREADS (0 or unset = hardware concurrency).
  int threads = 0;
};

// ---- worker pool ----

inline int worker_count(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("ACCRETE_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(n, 1);
}

/// Runs body(i) for i in [0, n) on up to `workers` threads. Results must be
/// written to preallocated slots; the first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!err) err = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

// ---- files ----

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline ScenarioConfig load_config(const std::filesystem::path& p) { return parse_config(read_text(p)); }

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + p.string());
}

namespace detail {

inline std::filesystem::path prepare_out(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

inline nlohmann::ordered_json manifest(const ScenarioConfig& c, const std::string& command,
                                       const DriverOptions& o) {
  nlohmann::ordered_json j;
  j["tool"] = "accrete";
  j["version"] = kVersion;
  j["command"] = command;
  j["problem"] = to_string(c.problem);
  j["config"] = render_config(c);
  const auto& n = c.numerics;
  j["tolerances"] = {{"tol_scale", o.tol_scale},     {"det_tol", n.det_tol},
                     {"stress_tol", n.stress_tol},   {"invariant_tol", n.invariant_tol},
                     {"quad_tol", n.quad_tol},       {"root_tol", n.root_tol},
                     {"linf_coefficient", n.linf_coefficient}};
  j["solvers"] = {{"characteristics", "rk4"},
                  {"quadrature", "adaptive gauss-kronrod 7-15"},
                  {"root", "brent"},
                  {"transport", "semi-lagrangian, moving affine grid, log-F interpolation"}};
  return j;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::ordered_json& j) {
  write_text(p, j.dump(2) + "\n");
}

// Numeric CSV with a header line; empty cells are absent values.
struct NumericCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;
};

inline NumericCsv read_numeric_csv(const std::filesystem::path& p) {
  std::istringstream in(read_text(p));
  NumericCsv csv;
  std::string line;
  if (!std::getline(in, line)) throw IoError(p.string() + ": empty file");
  csv.header = tokens(line);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::optional<double>> row;
    std::string_view rest = line;
    while (true) {
      const auto c = rest.find(',');
      const auto cell = trim(rest.substr(0, c));
      if (cell.empty()) {
        row.push_back(std::nullopt);
      } else {
        const auto x = parse_double(cell);
        if (!x) throw IoError(p.string() + ": bad number in '" + line + "'");
        row.push_back(x);
      }
      if (c == std::string_view::npos) break;
      rest = rest.substr(c + 1);
    }
    if (row.size() != csv.header.size()) throw IoError(p.string() + ": ragged row");
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

inline SphereAccretion build_sphere(const ScenarioConfig& c) {
  SphereAccretion::Options o;
  o.steps_per_unit = c.numerics.steps_per_unit;
  o.quad_tol = c.numerics.quad_tol;
  return SphereAccretion(c.sphere(), c.t_end(), o);
}

inline CylinderAccretion build_cylinder(const ScenarioConfig& c) {
  CylinderAccretion::Options o;
  o.dt = c.numerics.dt;
  o.quad_tol = c.numerics.quad_tol;
  o.root_tol = c.numerics.root_tol;
  o.required_times = c.outputs.times;
  return CylinderAccretion(c.cylinder(), c.t_end(), o);
}

inline std::string summary(const ScenarioConfig& c) {
  std::ostringstream os;
  if (c.problem == Problem::sphere) {
    os << "sphere r0=" << format_double(c.r0);
    if (c.r1_initial) os << " r1_initial=" << format_double(*c.r1_initial);
    os << " Z0dot=[" << render_rate(c.Z0dot) << "]";
    switch (c.ablation.kind()) {
      case Ablation::Kind::none: break;
      case Ablation::Kind::treadmill: os << " treadmill"; break;
      case Ablation::Kind::rate: os << " Z1dot=[" << render_rate(c.ablation.rate_function()) << "]"; break;
    }
  } else {
    os << "cylinder R0=" << format_double(c.R0) << " R1=" << format_double(c.R1) << " u_g=["
       << render_rate(c.u_g) << "] p_i=[" << render_rate(c.p_i) << "]";
  }
  os << " G=" << format_double(c.material.G) << " t_end=" << format_double(c.t_end());
  return os.str();
}

// Evenly spaced radii with exact endpoints; a collapsed interval gives one.
inline std::vector<double> radial_samples(double lo, double hi, int n) {
  if (!(hi > lo)) return {lo};
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r[i] = lo + (hi - lo) * i / (n - 1);
  r.back() = hi;
  return r;
}

template <class P>
ResultRow sample_row(const P& p, const ScenarioConfig& c, double r, double t, bool sphere) {
  ResultRow row;
  row.t = t;
  row.r = r;
  const DiagTensor F = p.elastic_deformation(r, t);
  row.F_rr = F.rr();
  row.F_tt = F.tt();
  if (sphere) row.F_pp = F.pp();
  const Origin o = p.region(r, t);
  row.region = region_tag(o);
  if (c.outputs.emit_tau && o == Origin::inflowBoundary) row.tau = p.attachment_time(r, t);
  if (c.outputs.emit_stress) {
    const StressState st = p.stress(r, t);
    row.sigma_rr = st.sigma.rr();
    row.sigma_tt = st.sigma.tt();
    if (sphere) row.sigma_pp = st.sigma.pp();
    row.p = st.p;
  }
  return row;
}

template <class P>
ResultTable sample_fields(const P& p, const ScenarioConfig& c, int workers,
                          std::pair<double, double> (*domain)(const P&, double)) {
  struct Job {
    double r, t;
  };
  std::vector<Job> jobs;
  for (double t : c.outputs.times) {
    const auto [lo, hi] = domain(p, t);
    for (double r : radial_samples(lo, hi, c.outputs.radial_samples)) jobs.push_back({r, t});
  }
  ResultTable table;
  table.rows.resize(jobs.size());
  const bool sphere = c.problem == Problem::sphere;
  parallel_for(jobs.size(), workers,
               [&](std::size_t i) { table.rows[i] = sample_row(p, c, jobs[i].r, jobs[i].t, sphere); });
  table.sort();
  return table;
}

inline std::pair<double, double> sphere_domain(const SphereAccretion& p, double t) {
  return {p.r0(), p.outer_radius(t)};
}
inline std::pair<double, double> cylinder_domain(const CylinderAccretion& p, double t) {
  return {p.history().r_in_at(t), p.history().r_out_at(t)};
}

}  // namespace detail

/// Samples the closed-form fields at the configured output times and writes
/// results.csv, manifest.json and report.json into out_dir.
inline RunReport cmd_run(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                         const DriverOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  const auto dir = detail::prepare_out(out_dir);
  const int workers = worker_count(opt.threads);
  const bool sphere = cfg.problem == Problem::sphere;

  ResultTable table;
  if (sphere) {
    const SphereAccretion p = detail::build_sphere(cfg);
    table = detail::sample_fields(p, cfg, workers, &detail::sphere_domain);
  } else {
    const CylinderAccretion p = detail::build_cylinder(cfg);
    table = detail::sample_fields(p, cfg, workers, &detail::cylinder_domain);
  }
  {
    std::ofstream out(dir / "results.csv", std::ios::binary);
    write_results(table, out);
  }

  RunReport rep;
  rep.command = "run";
  rep.problem = to_string(cfg.problem);
  rep.summary = detail::summary(cfg);
  rep.files = {"results.csv", "manifest.json", "report.json"};

  // residuals from the written file
  std::ifstream in(dir / "results.csv", std::ios::binary);
  const ResultTable back = read_results(in);
  const double G = cfg.material.G;
  double det_err = 0.0;
  std::optional<double> outer, inner;
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    const ResultRow& r = back.rows[i];
    const double d = r.F_rr * r.F_tt * r.F_pp.value_or(1.0);
    det_err = std::max(det_err, std::abs(d - 1.0));
    if (!r.sigma_rr) continue;
    const bool first = i == 0 || back.rows[i - 1].t != r.t;
    const bool last = i + 1 == back.rows.size() || back.rows[i + 1].t != r.t;
    if (last) outer = std::max(outer.value_or(0.0), std::abs(*r.sigma_rr) / G);
    if (first && !sphere)
      inner = std::max(inner.value_or(0.0), std::abs(*r.sigma_rr + cfg.p_i(r.t)) / G);
  }
  const double s = opt.tol_scale;
  rep.max_det_error = det_err;
  rep.check("max |det F - 1|", det_err, cfg.numerics.det_tol * s);
  rep.outer_radial_residual = outer;
  if (outer) rep.check("|sigma_rr(outer)| / G", *outer, cfg.numerics.stress_tol * s);
  rep.inner_traction_residual = inner;
  if (inner) rep.check("|sigma_rr(inner) + p_i| / G", *inner, cfg.numerics.stress_tol * s);

  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::write_json(dir / "manifest.json", detail::manifest(cfg, "run", opt));
  detail::write_json(dir / "report.json", rep.to_json());
  return rep;
}

namespace detail {

inline double transport_start(const ScenarioConfig& c) {
  if (c.numerics.transport_t0) return *c.numerics.transport_t0;
  return c.r1_initial ? 0.0 : c.t_end() / 3.0;
}

struct CompareRun {
  int n_cells;
  std::vector<FieldSnapshot> snaps;
  std::vector<std::vector<DiagTensor>> exact;
};

inline std::vector<CompareRun> run_transport(const TransportAdapter& a, const ScenarioConfig& c,
                                             const std::vector<int>& cells, int workers) {
  std::vector<CompareRun> runs(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t k) {
    CompareRun& run = runs[k];
    run.n_cells = cells[k];
    run.snaps = solve(a, cells[k], c.t_end(), SolveOptions{c.numerics.cfl, c.outputs.times});
    for (const auto& s : run.snaps) {
      std::vector<DiagTensor> ex;
      for (double r : s.r) ex.push_back(a.exact_F(r, s.t));
      run.exact.push_back(std::move(ex));
    }
  });
  return runs;
}

}  // namespace detail

/// Runs the grid transport solver at each resolution in `cells` against the
/// closed-form field. One resolution checks L-infinity against
/// linf_coefficient / n_cells; several form a convergence study that also
/// requires a monotone error decrease and a fitted order of at least 0.9.
inline RunReport cmd_compare(const ScenarioConfig& cfg, std::vector<int> cells,
                             const std::filesystem::path& out_dir, const DriverOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  if (cells.empty()) cells = {cfg.numerics.n_cells};
  {
    std::vector<std::string> issues;
    for (int n : cells)
      if (n < 8) issues.push_back("cells: n_cells must be at least 8, got " + std::to_string(n));
    if (!issues.empty()) throw ConfigError(std::move(issues));
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  const auto dir = detail::prepare_out(out_dir);
  const int workers = worker_count(opt.threads);
  const bool sphere = cfg.problem == Problem::sphere;

  std::vector<detail::CompareRun> runs;
  if (sphere) {
    const SphereAccretion p = detail::build_sphere(cfg);
    const SphereTransport a(p, detail::transport_start(cfg));
    runs = detail::run_transport(a, cfg, cells, workers);
  } else {
    const CylinderAccretion p = detail::build_cylinder(cfg);
    const CylinderTransport a(p);
    runs = detail::run_transport(a, cfg, cells, workers);
  }

  std::string csv = "n_cells,t,r,F_rr,F_tt,F_pp,F_rr_exact,F_tt_exact,F_pp_exact\n";
  for (const auto& run : runs)
    for (std::size_t s = 0; s < run.snaps.size(); ++s) {
      const FieldSnapshot& snap = run.snaps[s];
      for (std::size_t i = 0; i < snap.size(); ++i) {
        const DiagTensor F = snap.F(i), E = run.exact[s][i];
        csv += std::to_string(run.n_cells) + "," + format_double(snap.t) + "," + format_double(snap.r[i]) +
               "," + format_double(F.rr()) + "," + format_double(F.tt()) + "," +
               (sphere ? format_double(F.pp()) : "") + "," + format_double(E.rr()) + "," +
               format_double(E.tt()) + "," + (sphere ? format_double(E.pp()) : "") + "\n";
      }
    }
  write_text(dir / "compare.csv", csv);

  RunReport rep;
  rep.command = "compare";
  rep.problem = to_string(cfg.problem);
  rep.summary = detail::summary(cfg);
  rep.files = {"compare.csv", "manifest.json", "report.json"};

  // norms at t_end, recomputed from the written rows
  const double t_end = cfg.t_end();
  std::vector<ConvergenceRow> table;
  {
    const auto csv = detail::read_numeric_csv(dir / "compare.csv");
    std::map<int, std::pair<ConvergenceRow, std::size_t>> acc;
    for (const auto& f : csv.rows) {
      if (f.size() != 9 || !f[0] || !f[1]) throw IoError("compare.csv: malformed row");
      if (*f[1] != t_end) continue;
      auto& [row, count] = acc[static_cast<int>(*f[0])];
      row.n_cells = static_cast<int>(*f[0]);
      double det = 1.0;
      for (int k = 0; k < 3; ++k) {
        if (!f[3 + k]) continue;
        const double d = std::abs(*f[3 + k] - f[6 + k].value_or(NAN));
        row.linf = std::max(row.linf, d);
        row.l2 += d * d;
        ++count;
        det *= *f[3 + k];
      }
      row.det_drift = std::max(row.det_drift, std::abs(det - 1.0));
    }
    for (auto& [n, rc] : acc) {
      rc.first.l2 = rc.second ? std::sqrt(rc.first.l2 / static_cast<double>(rc.second)) : 0.0;
      table.push_back(rc.first);
    }
  }

  const double s = opt.tol_scale;
  double worst_det = 0.0;
  for (const auto& row : table) {
    worst_det = std::max(worst_det, row.det_drift);
    rep.check("L-inf error at n_cells = " + std::to_string(row.n_cells), row.linf,
              cfg.numerics.linf_coefficient / row.n_cells * s);
  }
  rep.max_det_error = worst_det;
  rep.check("max |det F - 1| (grid solver)", worst_det, cfg.numerics.det_tol * s);
  rep.linf = table.back().linf;
  rep.l2 = table.back().l2;
  double max_linf = 0.0;
  for (const auto& row : table) max_linf = std::max(max_linf, row.linf);
  if (table.size() > 1 && max_linf <= 1e-13) {
    // nothing moves: the grid solver must reproduce the field to rounding
    rep.convergence = table;
    rep.check("L-inf error (exact agreement expected)", max_linf, 1e-13 * s);
  } else if (table.size() > 1) {
    rep.convergence = table;
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < table.size(); ++i)
      worst_ratio = std::max(worst_ratio, table[i].linf / table[i - 1].linf);
    rep.check("max L-inf ratio between successive resolutions", worst_ratio, std::nextafter(1.0, 0.0));
    std::vector<int> ns;
    std::vector<double> es;
    for (const auto& row : table) {
      ns.push_back(row.n_cells);
      es.push_back(row.linf);
    }
    rep.fitted_order = fitted_order(ns, es);
    rep.check_at_least("fitted convergence order", *rep.fitted_order, 0.9);
  }

  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::write_json(dir / "manifest.json", detail::manifest(cfg, "compare", opt));
  detail::write_json(dir / "report.json", rep.to_json());
  return rep;
}

struct Seed {
  enum class Kind { tau, r } kind;
  double value;
};

/// Parses "tau:0,r:1.2"; tau seeds start on the accreting surface at that
/// time, r seeds start in the initial body at t = 0.
inline std::vector<Seed> parse_seeds(std::string_view text) {
  std::vector<Seed> seeds;
  std::vector<std::string> issues;
  for (const auto& tok : detail::tokens(text)) {
    const auto colon = tok.find(':');
    const std::string kind = tok.substr(0, colon);
    const auto x = colon == std::string::npos ? std::nullopt : parse_double(tok.substr(colon + 1));
    if ((kind != "tau" && kind != "r") || !x || !std::isfinite(*x)) {
      issues.push_back("seed '" + tok + "' is not tau:<time> or r:<radius>");
      continue;
    }
    seeds.push_back({kind == "tau" ? Seed::Kind::tau : Seed::Kind::r, *x});
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return seeds;
}

namespace detail {

struct CurveJob {
  double r_start, t_start;
  DiagTensor F_start;
  CurveOrigin origin;
};

inline std::vector<CharacteristicCurve> trace_all(const VelocityField& v, const std::vector<CurveJob>& jobs,
                                                  double t_end, Geometry g, int steps_per_unit,
                                                  int workers) {
  std::vector<CharacteristicCurve> curves(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const CurveJob& j = jobs[i];
    const int n = std::max(1, static_cast<int>(std::ceil(steps_per_unit * (t_end - j.t_start) - 1e-9)));
    curves[i] = trace(v, j.r_start, j.t_start, t_end, j.F_start, g, n, j.origin);
  });
  return curves;
}

}  // namespace detail

/// Traces characteristic curves from the given seeds (default: eight seeds
/// spread over the accreting surface) and writes curve_NN.csv with
/// (t, r, F, conserved-quantity residual) per curve.
inline RunReport cmd_characteristics(const ScenarioConfig& cfg, std::vector<Seed> seeds,
                                     const std::filesystem::path& out_dir, const DriverOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  const double t_end = cfg.t_end();
  if (seeds.empty())
    for (int k = 0; k < 8; ++k) seeds.push_back({Seed::Kind::tau, t_end * k / 8.0});
  const bool sphere = cfg.problem == Problem::sphere;
  const Geometry geom = sphere ? Geometry::sphere : Geometry::cylinder;
  const int workers = worker_count(opt.threads);

  std::optional<SphereAccretion> sp;
  std::optional<CylinderAccretion> cy;
  if (sphere) sp.emplace(detail::build_sphere(cfg));
  else cy.emplace(detail::build_cylinder(cfg));

  auto domain = [&](double t) {
    return sphere ? detail::sphere_domain(*sp, t) : detail::cylinder_domain(*cy, t);
  };
  auto invariant = [&](double r, double t) {
    if (sphere) return r * r * r + 3.0 * sp->Z0(t) * cfg.r0 * cfg.r0;
    const double ri = cy->history().r_in_at(t);
    return r * r - ri * ri;
  };
  const double scale = sphere ? cfg.r0 * cfg.r0 * cfg.r0 : cfg.R0 * cfg.R0;

  std::vector<detail::CurveJob> jobs;
  std::vector<std::string> issues;
  for (const Seed& s : seeds) {
    double r = 0.0, t = 0.0;
    if (s.kind == Seed::Kind::tau) {
      if (!(s.value >= 0.0 && s.value <= t_end)) {
        issues.push_back("seed tau:" + format_double(s.value) + " lies outside [0, t_end]");
        continue;
      }
      t = s.value;
      r = sphere ? cfg.r0 : domain(t).second;
    } else {
      r = s.value;
      const auto [lo, hi] = domain(0.0);
      const double slack = 1e-12 * std::max(1.0, std::abs(hi));
      if (!(r >= lo - slack && r <= hi + slack)) {
        issues.push_back("seed r:" + format_double(r) + " lies outside the body [" + format_double(lo) +
                         ", " + format_double(hi) + "] at t = 0");
        continue;
      }
      r = std::clamp(r, lo, hi);
    }
    const DiagTensor F0 = sphere ? sp->elastic_deformation(r, t) : cy->elastic_deformation(r, t);
    const CurveOrigin origin = s.kind == Seed::Kind::tau ? CurveOrigin{FromInflow{t}} : CurveOrigin{FromInitialBody{r}};
    jobs.push_back({r, t, F0, origin});
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));

  const VelocityField v = sphere ? sp->velocity_field() : cy->history().velocity_field();
  const auto curves = detail::trace_all(v, jobs, t_end, geom, cfg.numerics.steps_per_unit, workers);

  const auto dir = detail::prepare_out(out_dir);
  RunReport rep;
  rep.command = "characteristics";
  rep.problem = to_string(cfg.problem);
  rep.summary = detail::summary(cfg) + " curves=" + std::to_string(curves.size());

  for (std::size_t i = 0; i < curves.size(); ++i) {
    std::string csv = "t,r,F_rr,F_tt,F_pp,invariant_residual\n";
    const double k0 = invariant(jobs[i].r_start, jobs[i].t_start);
    const double denom = std::max(std::abs(k0), scale);
    for (const auto& smp : curves[i].samples) {
      csv += format_double(smp.t) + "," + format_double(smp.r) + "," + format_double(smp.F.rr()) + "," +
             format_double(smp.F.tt()) + "," + (sphere ? format_double(smp.F.pp()) : "") + "," +
             format_double(std::abs(invariant(smp.r, smp.t) - k0) / denom) + "\n";
    }
    char name[32];
    std::snprintf(name, sizeof name, "curve_%02zu.csv", i);
    write_text(dir / name, csv);
    rep.files.push_back(name);
  }

  // residuals recomputed from the curve files
  double worst_inv = 0.0, worst_det = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto csv = detail::read_numeric_csv(dir / rep.files[i]);
    std::optional<double> k0;
    double denom = scale;
    for (const auto& f : csv.rows) {
      if (f.size() != 6 || !f[0] || !f[1] || !f[2] || !f[3]) throw IoError(rep.files[i] + ": malformed row");
      const double k = invariant(*f[1], *f[0]);
      if (!k0) {
        k0 = k;
        denom = std::max(std::abs(k), scale);
      }
      worst_inv = std::max(worst_inv, std::abs(k - *k0) / denom);
      worst_det = std::max(worst_det, std::abs(*f[2] * *f[3] * f[4].value_or(1.0) - 1.0));
    }
  }
  rep.files.push_back("manifest.json");
  rep.files.push_back("report.json");
  const double s = opt.tol_scale;
  rep.max_invariant_residual = worst_inv;
  rep.check("conserved quantity relative drift", worst_inv, cfg.numerics.invariant_tol * s);
  rep.max_det_error = worst_det;
  rep.check("max |det F - 1| along curves", worst_det, cfg.numerics.invariant_tol * s);

  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail::write_json(dir / "manifest.json", detail::manifest(cfg, "characteristics", opt));
  detail::write_json(dir / "report.json", rep.to_json());
  return rep;
}

}  // namespace accrete
