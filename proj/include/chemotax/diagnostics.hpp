#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>

#include "chemotax/model.hpp"
#include "chemotax/state.hpp"

namespace chemotax {

/// One row of the per-step observable stream.
struct DiagnosticsRecord {
  long step = 0;
  double t = 0.0;
  double mass_u = 0.0;
  double linf_u = 0.0;
  double linf_v = 0.0;
  double linf_w = 0.0;
  double psi = 0.0;      // int u^2 + tau * grad_v4 + tau * grad_w2
  double grad_v4 = 0.0;  // int |grad v|^4
  double grad_w2 = 0.0;  // int |grad w|^2
  bool bound_violation = false;
  bool cfl_violation = false;

  bool finite() const noexcept;
};

/// The energy functional and its three parts.
struct PsiParts {
  double u2 = 0.0;
  double grad_v4 = 0.0;
  double grad_w2 = 0.0;
  double psi = 0.0;
};

PsiParts psi_parts(const SimState& state, int tau);
inline double psi_tau(const SimState& state, int tau) { return psi_parts(state, tau).psi; }

struct ViolationReport {
  bool v_above = false;  // some v > m3 (1 + tol)
  bool w_above = false;  // some w > m2 (1 + tol)
  bool negative = false; // some u, v or w < -tol max(1, field max)
  double max_v = 0.0;
  double max_w = 0.0;
  double min_u = 0.0;
  double min_v = 0.0;
  double min_w = 0.0;

  bool any() const noexcept { return v_above || w_above || negative; }
};

ViolationReport bound_monitor(const SimState& state, const MaxBounds& bounds, double tol);

/// Observables of `state`; bound and CFL flags are supplied by the caller.
DiagnosticsRecord make_record(const SimState& state, int tau, bool bound_violation,
                              bool cfl_violation);

struct BlowupReport {
  std::size_t index = 0;  // position in the record sequence
  long step = 0;
  double t = 0.0;
  bool non_finite = false;
  double linf_ratio = 0.0;  // linf_u at the last record / linf_u at record 0
  double psi_ratio = 0.0;   // psi at the last record / psi at record 0
};

/// First record whose linf_u exceeds `threshold` or that carries a
/// non-finite observable. Records must be time ordered.
std::optional<BlowupReport> detect_blowup(std::span<const DiagnosticsRecord> records,
                                          double threshold);

/// CSV with columns step,t,mass_u,linf_u,linf_v,linf_w,psi,grad_v4,grad_w2,
/// bound_violation,cfl_violation; reals carry 17 significant digits.
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const DiagnosticsRecord& rec);

}  // namespace chemotax
