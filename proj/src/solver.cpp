#include "chemotax/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chemotax/error.hpp"

namespace chemotax {

void SolverConfig::validate() const {
  auto in_unit = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw InvalidArgument(std::string(name) + " must lie in (0, 1)");
  };
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be >= 0");
  in_unit(cg_tol, "cg_tol");
  in_unit(newton_tol, "newton_tol");
  if (cg_maxiter < 1) throw InvalidArgument("cg_maxiter must be >= 1");
  if (newton_maxiter < 1) throw InvalidArgument("newton_maxiter must be >= 1");
  if (!(blowup_threshold > 0.0)) throw InvalidArgument("blowup_threshold must be positive");
  if (record_stride < 1) throw InvalidArgument("record_stride must be >= 1");
}

namespace {

struct AxisLayout {
  std::size_t stride;
  std::size_t n;
};

AxisLayout axis_layout(const Grid& g, int axis) {
  const std::size_t strides[3] = {1, g.n(0), g.n(0) * g.n(1)};
  return {strides[axis], g.n(axis)};
}

std::size_t axis_coord(const Grid& g, std::size_t idx, int axis) {
  switch (axis) {
    case 0:
      return idx % g.n(0);
    case 1:
      return (idx / g.n(0)) % g.n(1);
    default:
      return idx / (g.n(0) * g.n(1));
  }
}

// chi * central difference of v along `axis`; zero on the two boundary planes.
std::vector<double> chemotactic_velocity(const ScalarField& v, double chi, int axis) {
  const Grid& g = v.grid();
  const AxisLayout ax = axis_layout(g, axis);
  const double inv2h = 1.0 / (2.0 * g.h(axis));
  std::vector<double> vel(g.size());
  const double* vd = v.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(g.size()); ++s) {
    const std::size_t idx = static_cast<std::size_t>(s);
    const std::size_t i = axis_coord(g, idx, axis);
    vel[idx] = (i == 0 || i + 1 == ax.n) ? 0.0 : chi * ((vd[idx + ax.stride] - vd[idx - ax.stride]) * inv2h);
  }
  return vel;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

ScalarField ones_like(const ScalarField& f) { return ScalarField(f.grid_ptr(), 1.0); }

}  // namespace

ScalarField chemotaxis_divergence(const ScalarField& u, const ScalarField& v, double chi) {
  require_same_grid(u, v);
  const Grid& g = u.grid();
  ScalarField out(u.grid_ptr());
  const double* ud = u.data();
  double* od = out.data();
  for (int axis = 0; axis < 3; ++axis) {
    const AxisLayout ax = axis_layout(g, axis);
    const std::vector<double> vel = chemotactic_velocity(v, chi, axis);
    const double lambda = max_abs(vel);
    std::vector<double> q(g.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx) q[idx] = ud[idx] * vel[idx];
    const double inv_h = 1.0 / g.h(axis);
    const double half_lambda = 0.5 * lambda;
    // Flux through the face between a and a + stride; both neighbours evaluate
    // the same expression, so the discrete sum telescopes exactly.
    auto face = [&](std::size_t a) {
      const std::size_t b = a + ax.stride;
      return 0.5 * (q[a] + q[b]) - half_lambda * (ud[b] - ud[a]);
    };
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(g.size()); ++s) {
      const std::size_t idx = static_cast<std::size_t>(s);
      const std::size_t i = axis_coord(g, idx, axis);
      double contribution;
      if (i == 0)
        contribution = 2.0 * face(idx) * inv_h;
      else if (i + 1 == ax.n)
        contribution = -2.0 * face(idx - ax.stride) * inv_h;
      else
        contribution = (face(idx) - face(idx - ax.stride)) * inv_h;
      od[idx] += contribution;
    }
  }
  return out;
}

Vec3 chemotactic_speeds(const ScalarField& v, double chi) {
  Vec3 speeds{};
  for (int axis = 0; axis < 3; ++axis) speeds[axis] = max_abs(chemotactic_velocity(v, chi, axis));
  return speeds;
}

bool cfl_violated(const SimState& state, const ModelParams& params, const SolverConfig& cfg) {
  const Grid& g = state.u.grid();
  const Vec3 speeds = chemotactic_speeds(state.v, params.chi);
  double hmin = g.h(0);
  for (int a = 0; a < 3; ++a) {
    hmin = std::min(hmin, g.h(a));
    if (speeds[a] > 0.0 && cfg.dt > g.h(a) / (3.0 * speeds[a])) return true;
  }
  return cfg.dt > hmin * hmin / 6.0;
}

ScalarField crank_nicolson(const ScalarField& f, const ScalarField& source, double dt,
                           const SolverConfig& cfg) {
  const ScalarField lap = laplacian(f);
  ScalarField rhs(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = (f[i] + 0.5 * dt * lap[i]) + dt * source[i];
  const ScalarField ones = ones_like(f);
  const double half_dt = 0.5 * dt;
  LinearOperator op = [&](const ScalarField& x, ScalarField& out) {
    helmholtz_apply(x, ones, half_dt, out);
  };
  CgResult res = cg_solve(op, rhs, cfg.cg_tol, cfg.cg_maxiter, &f);
  if (!res.converged)
    throw SolverError("Crank-Nicolson CG did not converge (relative residual " +
                          std::to_string(res.relative_residual) + ")",
                      res.relative_residual, res.iterations);
  return std::move(res.x);
}

namespace {

ScalarField advance_u(const ScalarField& u, const ScalarField& v, const ModelParams& params,
                      const SolverConfig& cfg) {
  ScalarField source = chemotaxis_divergence(u, v, params.chi);
  for (double& x : source.values()) x = -x;
  return crank_nicolson(u, source, cfg.dt, cfg);
}

}  // namespace

SimState step_parabolic(const SimState& state, const ModelParams& params,
                        const SolverConfig& cfg) {
  if (params.tau != 1) throw InvalidArgument("step_parabolic requires tau = 1");
  const ScalarField& u = state.u;
  const ScalarField& v = state.v;
  const ScalarField& w = state.w;
  require_same_grid(u, v);
  require_same_grid(u, w);

  ScalarField rv(u.grid_ptr()), rw(u.grid_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) {
    rv[i] = (params.alpha * w[i] - params.beta * v[i]) - params.gamma * u[i] * v[i];
    rw[i] = -params.delta * u[i] * w[i] + params.mu * w[i] * (1.0 - w[i]);
  }
  SimState next;
  next.u = advance_u(u, v, params, cfg);
  next.v = crank_nicolson(v, rv, cfg.dt, cfg);
  next.w = crank_nicolson(w, rw, cfg.dt, cfg);
  next.step = state.step + 1;
  next.t = state.t + cfg.dt;
  return next;
}

ScalarField elliptic_residual_v(const ScalarField& u, const ScalarField& v, const ScalarField& w,
                                const ModelParams& params) {
  ScalarField diag(u.grid_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) diag[i] = params.beta + params.gamma * u[i];
  ScalarField res(u.grid_ptr());
  helmholtz_apply(v, diag, 1.0, res);
  for (std::size_t i = 0; i < u.size(); ++i) res[i] -= params.alpha * w[i];
  return res;
}

ScalarField elliptic_residual_w(const ScalarField& u, const ScalarField& w,
                                const ModelParams& params) {
  ScalarField diag(u.grid_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) diag[i] = params.delta * u[i] - params.mu;
  ScalarField res(u.grid_ptr());
  helmholtz_apply(w, diag, 1.0, res);
  for (std::size_t i = 0; i < u.size(); ++i) res[i] += params.mu * w[i] * w[i];
  return res;
}

ScalarField elliptic_solve_v(const ScalarField& u, const ScalarField& w, const ModelParams& params,
                             const SolverConfig& cfg, const ScalarField* guess) {
  require_same_grid(u, w);
  ScalarField diag(u.grid_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) diag[i] = params.beta + params.gamma * u[i];
  ScalarField rhs(u.grid_ptr());
  for (std::size_t i = 0; i < u.size(); ++i) rhs[i] = params.alpha * w[i];
  LinearOperator op = [&](const ScalarField& x, ScalarField& out) {
    helmholtz_apply(x, diag, 1.0, out);
  };
  CgResult res = cg_solve(op, rhs, cfg.cg_tol, cfg.cg_maxiter, guess);
  if (!res.converged)
    throw SolverError("elliptic v solve did not converge (relative residual " +
                          std::to_string(res.relative_residual) + ")",
                      res.relative_residual, res.iterations);
  return std::move(res.x);
}

ScalarField elliptic_solve_w(const ScalarField& u, const ModelParams& params,
                             const ScalarField& guess, const SolverConfig& cfg) {
  require_same_grid(u, guess);
  constexpr int kMaxHalvings = 30;
  ScalarField w = guess;
  ScalarField residual = elliptic_residual_w(u, w, params);
  double res_norm = linf_norm(residual);
  ScalarField jac_diag(u.grid_ptr());
  for (int it = 0; it <= cfg.newton_maxiter; ++it) {
    if (res_norm <= cfg.newton_tol) return w;
    if (!std::isfinite(res_norm) || it == cfg.newton_maxiter) break;

    // Jacobian -Lap + (delta u - mu + 2 mu w). A negative diagonal does not by
    // itself make the operator indefinite, so the plain system is tried first.
    // If CG meets non-positive curvature, the diagonal is shifted so its
    // smallest entry becomes mu and the shifted step acts as extra damping.
    double min_diag = INFINITY;
    for (std::size_t i = 0; i < u.size(); ++i) {
      jac_diag[i] = params.delta * u[i] - params.mu + 2.0 * params.mu * w[i];
      min_diag = std::min(min_diag, jac_diag[i]);
    }
    ScalarField rhs = residual;
    for (double& x : rhs.values()) x = -x;
    LinearOperator op = [&](const ScalarField& x, ScalarField& out) {
      helmholtz_apply(x, jac_diag, 1.0, out);
    };
    // Once the residual is small, solve only as accurately as the Newton
    // tolerance requires.
    const double lin_tol = std::clamp(0.1 * cfg.newton_tol / res_norm, cfg.cg_tol, 1e-2);
    CgResult lin = cg_solve(op, rhs, lin_tol, cfg.cg_maxiter);
    if (!lin.converged && min_diag <= 0.0) {
      const double shift = params.mu - min_diag;
      for (double& d : jac_diag.values()) d += shift;
      lin = cg_solve(op, rhs, lin_tol, cfg.cg_maxiter);
    }
    if (!lin.converged)
      throw SolverError("Newton linear solve for w did not converge", lin.relative_residual,
                        lin.iterations);

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
      ScalarField trial = w;
      axpy(trial, step, lin.x);
      ScalarField trial_res = elliptic_residual_w(u, trial, params);
      const double trial_norm = linf_norm(trial_res);
      if (trial_norm < res_norm) {
        w = std::move(trial);
        residual = std::move(trial_res);
        res_norm = trial_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  throw SolverError("Newton iteration for w did not converge (residual " +
                        std::to_string(res_norm) + ")",
                    res_norm, cfg.newton_maxiter);
}

SimState step_elliptic(const SimState& state, const ModelParams& params,
                       const SolverConfig& cfg) {
  if (params.tau != 0) throw InvalidArgument("step_elliptic requires tau = 0");
  SimState next;
  next.w = elliptic_solve_w(state.u, params, state.w, cfg);
  next.v = elliptic_solve_v(state.u, next.w, params, cfg, &state.v);
  next.u = advance_u(state.u, next.v, params, cfg);
  next.step = state.step + 1;
  next.t = state.t + cfg.dt;
  return next;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::completed:
      return "completed";
    case Termination::blowup_detected:
      return "blowup_detected";
    case Termination::solver_failure:
      return "solver_failure";
  }
  return "unknown";
}

RunResult run(const ModelParams& params, const InitialData& data, const SolverConfig& cfg,
              const RunSinks& sinks) {
  params.validate();
  cfg.validate();
  data.validate();

  RunResult result;
  result.bounds = max_bounds(params, data);
  constexpr double kBoundTol = 1e-6;

  SimState state;
  state.u = data.u0;
  try {
    if (params.tau == 1) {
      state.v = data.v0;
      state.w = data.w0;
    } else {
      state.w = elliptic_solve_w(data.u0, params, ScalarField(data.u0.grid_ptr(), 1.0), cfg);
      state.v = elliptic_solve_v(data.u0, state.w, params, cfg, &data.v0);
    }
  } catch (const SolverError& e) {
    result.termination = Termination::solver_failure;
    result.message = std::string("initial elliptic solve: ") + e.what();
    result.final_state = std::move(state);
    return result;
  }

  auto emit = [&](const DiagnosticsRecord& rec) {
    result.records.push_back(rec);
    if (sinks.record) sinks.record(rec);
  };
  auto snapshot = [&](const SimState& s) {
    if (sinks.snapshot && sinks.snapshot_stride > 0 && s.step % sinks.snapshot_stride == 0)
      sinks.snapshot(s);
  };
  auto exploded = [&](const DiagnosticsRecord& rec) {
    return !rec.finite() || rec.linf_u > cfg.blowup_threshold;
  };

  DiagnosticsRecord rec =
      make_record(state, params.tau, bound_monitor(state, result.bounds, kBoundTol).any(), false);
  emit(rec);
  snapshot(state);
  if (exploded(rec)) {
    result.termination = Termination::blowup_detected;
    result.blowup_time = state.t;
    result.final_state = std::move(state);
    return result;
  }

  const long nsteps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  for (long s = 1; s <= nsteps; ++s) {
    const bool cfl = cfg.cfl_warn && cfl_violated(state, params, cfg);
    if (cfl && !result.first_cfl_violation) result.first_cfl_violation = state.t;
    SimState next;
    try {
      next = params.tau == 1 ? step_parabolic(state, params, cfg)
                             : step_elliptic(state, params, cfg);
    } catch (const SolverError& e) {
      result.termination = Termination::solver_failure;
      result.message = "step " + std::to_string(s) + ": " + e.what();
      break;
    }
    next.step = s;
    next.t = static_cast<double>(s) * cfg.dt;
    state = std::move(next);
    result.steps = s;

    rec = make_record(state, params.tau, bound_monitor(state, result.bounds, kBoundTol).any(), cfl);
    if (exploded(rec)) {
      emit(rec);
      snapshot(state);
      result.termination = Termination::blowup_detected;
      result.blowup_time = state.t;
      break;
    }
    if (s % cfg.record_stride == 0 || s == nsteps) emit(rec);
    snapshot(state);
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace chemotax
