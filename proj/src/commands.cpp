#include "chemotax/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "chemotax/diagnostics.hpp"
#include "chemotax/error.hpp"
#include "chemotax/kernels.hpp"
#include "chemotax/model.hpp"
#include "chemotax/solver.hpp"

namespace chemotax {

namespace {

std::ostream& out_of(const CommandOptions& o) { return o.out ? *o.out : std::cout; }
std::ostream& err_of(const CommandOptions& o) { return o.err ? *o.err : std::cerr; }

std::filesystem::path output_dir(const RunConfig& cfg, const CommandOptions& opts) {
  return opts.output_dir ? *opts.output_dir : cfg.output_dir;
}

InitialData load_data(const RunConfig& cfg, const GridPtr& grid) {
  InitialData data = build_initial_data(cfg, grid);
  try {
    data.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("initial", e.what());
  }
  return data;
}

std::string summary_json(const RunConfig& cfg, const RunResult& r) {
  double peak_u = 0.0, peak_v = 0.0, peak_w = 0.0, peak_psi = 0.0, drift = 0.0;
  bool violation = false, cfl = false;
  const double mass0 = r.records.empty() ? 0.0 : r.records.front().mass_u;
  for (const auto& rec : r.records) {
    peak_u = std::max(peak_u, rec.linf_u);
    peak_v = std::max(peak_v, rec.linf_v);
    peak_w = std::max(peak_w, rec.linf_w);
    peak_psi = std::max(peak_psi, rec.psi);
    if (mass0 > 0.0) drift = std::max(drift, std::fabs(rec.mass_u - mass0) / mass0);
    violation = violation || rec.bound_violation;
    cfl = cfl || rec.cfl_violation;
  }
  JsonWriter j;
  j.begin_object();
  j.field("termination", to_string(r.termination));
  j.field("blowup_detected", r.termination == Termination::blowup_detected);
  j.key("blowup_time");
  r.blowup_time ? j.value(*r.blowup_time) : j.null();
  j.field("steps", r.steps);
  j.field("t_final", r.final_state.t);
  j.field("dt", cfg.solver.dt);
  j.field("tau", cfg.params.tau);
  j.field("records", static_cast<long>(r.records.size()));
  if (!r.records.empty()) {
    j.field("initial_linf_u", r.records.front().linf_u);
    j.field("initial_psi", r.records.front().psi);
    j.field("initial_mass_u", mass0);
  }
  j.field("peak_linf_u", peak_u);
  j.field("peak_linf_v", peak_v);
  j.field("peak_linf_w", peak_w);
  j.field("peak_psi", peak_psi);
  j.field("max_relative_mass_drift", drift);
  j.field("M1", r.bounds.m1);
  j.field("M2", r.bounds.m2);
  j.field("M3", r.bounds.m3);
  j.field("bound_violation", violation);
  j.field("cfl_violation", cfl);
  j.key("first_cfl_violation");
  r.first_cfl_violation ? j.value(*r.first_cfl_violation) : j.null();
  j.field("message", r.message);
  j.end_object();
  return j.str();
}

GridSpec refined(const GridSpec& g) {
  GridSpec r = g;
  for (int a = 0; a < 3; ++a) r.n[a] = 2 * (g.n[a] - 1) + 1;
  return r;
}

}  // namespace

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GeometryError& e) {
    err << "geometry error: " << e.what() << "\n";
    return kExitGeometry;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << " (residual " << e.residual() << " after "
        << e.iterations() << " iterations)\n";
    return kExitSolver;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int cmd_simulate(const RunConfig& cfg, const CommandOptions& opts) {
  const GridPtr grid = make_grid(cfg.grid);
  const InitialData data = load_data(cfg, grid);

  const std::filesystem::path dir = output_dir(cfg, opts);
  ensure_directory(dir);
  const std::filesystem::path snap_dir = dir / "snapshots";
  if (cfg.snapshot_stride > 0) ensure_directory(snap_dir);

  const std::filesystem::path csv_path = dir / "diagnostics.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot open " + csv_path.string() + " for writing");
  write_csv_header(csv);

  RunSinks sinks;
  sinks.record = [&](const DiagnosticsRecord& rec) { write_csv_row(csv, rec); };
  sinks.snapshot_stride = cfg.snapshot_stride;
  sinks.snapshot = [&](const SimState& s) { write_snapshot(snap_dir, s, cfg.snapshot_format); };

  const RunResult result = run(cfg.params, data, cfg.solver, sinks);
  csv.close();
  if (!csv) throw IoError("write failed: " + csv_path.string());
  write_text(dir / "summary.json", summary_json(cfg, result));

  std::ostream& out = out_of(opts);
  out << "termination: " << to_string(result.termination) << "\n";
  out << "steps: " << result.steps << "\n";
  if (result.blowup_time) out << "blowup_time: " << format_real(*result.blowup_time) << "\n";
  if (result.first_cfl_violation)
    out << "warning: CFL condition violated from t = " << format_real(*result.first_cfl_violation)
        << "\n";
  out << "output: " << dir.string() << "\n";
  if (result.termination == Termination::solver_failure) {
    err_of(opts) << "solver failure: " << result.message << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

std::string bound_report_json(const BoundConstants& b, const ModelParams& params,
                              const std::optional<BoundConstants>& refined) {
  JsonWriter j;
  j.begin_object();
  j.field("rho", b.rho);
  j.field("d", b.dmax);
  j.field("A1", b.a1);
  j.field("A2", b.a2);
  j.field("A3", b.a3);
  j.field("scriptA", b.script_a);
  j.field("scriptB", b.script_b);
  j.field("scriptC", b.script_c);
  j.field("psi0", b.psi0);
  j.field("t_lower", b.t_lower);
  j.field("tau", b.tau);
  j.key("parameters").begin_object();
  j.field("chi", params.chi);
  j.field("alpha", params.alpha);
  j.field("beta", params.beta);
  j.field("gamma", params.gamma);
  j.field("delta", params.delta);
  j.field("mu", params.mu);
  j.field("tau", params.tau);
  j.field("M2", b.m2);
  j.field("M3", b.m3);
  j.end_object();
  if (refined) {
    j.key("refined").begin_object();
    j.field("psi0", refined->psi0);
    j.field("t_lower", refined->t_lower);
    j.end_object();
  }
  j.end_object();
  return j.str();
}

int cmd_bound(const RunConfig& cfg, const CommandOptions& opts) {
  const GridPtr grid = make_grid(cfg.grid);
  const InitialData data = load_data(cfg, grid);
  const BoundConstants b = evaluate_bound(cfg.params, data);
  std::optional<BoundConstants> fine;
  if (opts.refine) {
    for (const FieldSource* s : {&cfg.u0, &cfg.v0, &cfg.w0})
      if (s->kind == FieldSource::Kind::file)
        throw ConfigError("initial", "--refine needs gaussian or constant initial data");
    const GridPtr fine_grid = make_grid(refined(cfg.grid));
    fine = evaluate_bound(cfg.params, load_data(cfg, fine_grid));
  }
  const std::string text = bound_report_json(b, cfg.params, fine);
  const std::filesystem::path dir = output_dir(cfg, opts);
  ensure_directory(dir);
  write_text(dir / "bound.json", text);
  out_of(opts) << text;
  return kExitOk;
}

int cmd_certify(const RunConfig& cfg, const CommandOptions& opts) {
  const GridPtr grid = make_grid(cfg.grid);
  const InitialData data = load_data(cfg, grid);
  const CertificateReport rep = boundedness_certificate(cfg.params, data, 3);
  std::ostream& out = out_of(opts);
  out << "certificate: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  out << "tau: " << rep.tau << "\n";
  out << "K: " << format_real(rep.K) << "\n";
  out << "threshold: " << format_real(rep.threshold) << "\n";
  out << "margin: " << format_real(rep.margin) << "\n";
  if (rep.tau == 0) out << "note: condition holds automatically for tau = 0\n";
  if (rep.eps) out << "eps: " << format_real(*rep.eps) << "\n";
  if (rep.certificate) {
    const PhiCertificate& c = *rep.certificate;
    out << "p: " << format_real(c.p) << "\n";
    out << "phi_limit: " << format_real(phi_admissible_limit(c.p, c.eps)) << "\n";
    if (c.satisfied) {
      const PhiResiduals r = phi_residuals(c, 1000);
      out << "phi_min: " << format_real(r.min_phi) << "\n";
      out << "phi_max_over_phiK: " << format_real(r.max_phi_over_phiK) << "\n";
      out << "phi_prime_min: " << format_real(r.min_phi_prime) << "\n";
      out << "convexity_min: " << format_real(r.min_convexity) << "\n";
      out << "identity_max: " << format_real(r.max_identity) << "\n";
      out << "monotone: " << (r.monotone ? "true" : "false") << "\n";
    }
  }
  return kExitOk;
}

int cmd_phi_check(double p, double eps, double K, const CommandOptions& opts) {
  const PhiCertificate c = make_phi_certificate(p, eps, K);
  std::ostream& out = out_of(opts);
  out << "condition: " << (c.satisfied ? "PASS" : "FAIL") << "\n";
  out << "K: " << format_real(K) << "\n";
  out << "limit: " << format_real(phi_admissible_limit(p, eps)) << "\n";
  out << "k: " << format_real(c.k) << "\nl: " << format_real(c.l) << "\nm: " << format_real(c.m)
      << "\nr: " << format_real(c.r) << "\n";
  if (c.satisfied) {
    const PhiResiduals r = phi_residuals(c, 1000);
    out << "phi_min: " << format_real(r.min_phi) << "\n";
    out << "phi_max_over_phiK: " << format_real(r.max_phi_over_phiK) << "\n";
    out << "phi_prime_min: " << format_real(r.min_phi_prime) << "\n";
    out << "convexity_min: " << format_real(r.min_convexity) << "\n";
    out << "identity_max: " << format_real(r.max_identity) << "\n";
    out << "monotone: " << (r.monotone ? "true" : "false") << "\n";
  }
  return kExitOk;
}

}  // namespace chemotax
