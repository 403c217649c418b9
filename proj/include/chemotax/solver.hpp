#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chemotax/diagnostics.hpp"
#include "chemotax/linear.hpp"
#include "chemotax/model.hpp"
#include "chemotax/state.hpp"

namespace chemotax {

struct SolverConfig {
  double dt = 1e-6;
  double t_end = 1e-5;
  double cg_tol = 1e-10;
  int cg_maxiter = 2000;
  double newton_tol = 1e-10;
  int newton_maxiter = 50;
  double blowup_threshold = 1e9;
  bool cfl_warn = true;
  int record_stride = 1;

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

/// Conservative divergence of chi u grad v with local Lax-Friedrichs face
/// fluxes. Along each axis,
///   F_{i+1/2} = (q_i + q_{i+1})/2 - lambda/2 (u_{i+1} - u_i),  q = chi u dv,
/// with dv the central difference of v and lambda the largest |chi dv| on
/// that axis. Boundary faces carry no flux; a boundary node owns half a cell,
/// which is what ghost reflection of u and v produces.
ScalarField chemotaxis_divergence(const ScalarField& u, const ScalarField& v, double chi);

/// Largest |chi dv/dx_a| over the grid for a = 0, 1, 2.
Vec3 chemotactic_speeds(const ScalarField& v, double chi);

/// True when dt exceeds h / (3 max|chi grad v|) or h^2 / 6.
bool cfl_violated(const SimState& state, const ModelParams& params, const SolverConfig& cfg);

/// One Crank-Nicolson solve (I - dt/2 Lap) f_new = f + dt source + dt/2 Lap f.
/// Throws SolverError if CG does not converge.
ScalarField crank_nicolson(const ScalarField& f, const ScalarField& source, double dt,
                           const SolverConfig& cfg);

/// Fully parabolic step (tau = 1): explicit transport/reaction sources at t,
/// then a Crank-Nicolson solve per unknown.
SimState step_parabolic(const SimState& state, const ModelParams& params, const SolverConfig& cfg);

/// Solves (-Lap + beta + gamma u) v = alpha w.
ScalarField elliptic_solve_v(const ScalarField& u, const ScalarField& w, const ModelParams& params,
                             const SolverConfig& cfg, const ScalarField* guess = nullptr);

/// Solves -Lap w + delta u w - mu w (1 - w) = 0 by damped Newton from `guess`.
ScalarField elliptic_solve_w(const ScalarField& u, const ModelParams& params,
                             const ScalarField& guess, const SolverConfig& cfg);

/// Residual -Lap v + (beta + gamma u) v - alpha w.
ScalarField elliptic_residual_v(const ScalarField& u, const ScalarField& v, const ScalarField& w,
                                const ModelParams& params);
/// Residual -Lap w + delta u w - mu w + mu w^2.
ScalarField elliptic_residual_w(const ScalarField& u, const ScalarField& w,
                                const ModelParams& params);

/// Parabolic-elliptic-elliptic step (tau = 0): w and v from the current u,
/// then the u update of step_parabolic.
SimState step_elliptic(const SimState& state, const ModelParams& params, const SolverConfig& cfg);

enum class Termination { completed, blowup_detected, solver_failure };

std::string_view to_string(Termination t);

struct RunSinks {
  std::function<void(const DiagnosticsRecord&)> record;
  std::function<void(const SimState&)> snapshot;
  int snapshot_stride = 0;  // 0 disables snapshots
};

struct RunResult {
  Termination termination = Termination::completed;
  std::optional<double> blowup_time;
  std::optional<double> first_cfl_violation;
  long steps = 0;
  std::string message;
  std::vector<DiagnosticsRecord> records;
  SimState final_state;
  MaxBounds bounds;
};

/// Integrates from `data` until t_end, until ||u||_inf exceeds the blow-up
/// threshold or a field turns non-finite, or until a solver fails.
RunResult run(const ModelParams& params, const InitialData& data, const SolverConfig& cfg,
              const RunSinks& sinks = {});

}  // namespace chemotax
