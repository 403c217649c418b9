#include "chemotax/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace chemotax {

bool DiagnosticsRecord::finite() const noexcept {
  return std::isfinite(mass_u) && std::isfinite(linf_u) && std::isfinite(linf_v) &&
         std::isfinite(linf_w) && std::isfinite(psi);
}

PsiParts psi_parts(const SimState& state, int tau) {
  PsiParts parts;
  ScalarField sq = state.u;
  for (double& x : sq.values()) x = x * x;
  parts.u2 = integrate(sq);
  ScalarField gv = gradient_sq(state.v);
  for (double& x : gv.values()) x = x * x;
  parts.grad_v4 = integrate(gv);
  parts.grad_w2 = integrate(gradient_sq(state.w));
  parts.psi = tau != 0 ? parts.u2 + parts.grad_v4 + parts.grad_w2 : parts.u2;
  return parts;
}

ViolationReport bound_monitor(const SimState& state, const MaxBounds& bounds, double tol) {
  ViolationReport rep;
  rep.max_v = state.v.max();
  rep.max_w = state.w.max();
  rep.min_u = state.u.min();
  rep.min_v = state.v.min();
  rep.min_w = state.w.min();
  rep.v_above = !(rep.max_v <= bounds.m3 * (1.0 + tol));
  rep.w_above = !(rep.max_w <= bounds.m2 * (1.0 + tol));
  auto below = [tol](double lo, double hi) { return !(lo >= -tol * std::max(1.0, hi)); };
  rep.negative = below(rep.min_u, state.u.max()) || below(rep.min_v, rep.max_v) ||
                 below(rep.min_w, rep.max_w);
  return rep;
}

DiagnosticsRecord make_record(const SimState& state, int tau, bool bound_violation,
                              bool cfl_violation) {
  DiagnosticsRecord rec;
  rec.step = state.step;
  rec.t = state.t;
  rec.mass_u = integrate(state.u);
  rec.linf_u = linf_norm(state.u);
  rec.linf_v = linf_norm(state.v);
  rec.linf_w = linf_norm(state.w);
  const PsiParts parts = psi_parts(state, tau);
  rec.psi = parts.psi;
  rec.grad_v4 = parts.grad_v4;
  rec.grad_w2 = parts.grad_w2;
  rec.bound_violation = bound_violation;
  rec.cfl_violation = cfl_violation;
  return rec;
}

std::optional<BlowupReport> detect_blowup(std::span<const DiagnosticsRecord> records,
                                          double threshold) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const bool non_finite = !r.finite();
    if (non_finite || r.linf_u > threshold) {
      BlowupReport rep;
      rep.index = i;
      rep.step = r.step;
      rep.t = r.t;
      rep.non_finite = non_finite;
      rep.linf_ratio = records.back().linf_u / records.front().linf_u;
      rep.psi_ratio = records.back().psi / records.front().psi;
      return rep;
    }
  }
  return std::nullopt;
}

namespace {
void put_real(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}
}  // namespace

void write_csv_header(std::ostream& os) {
  os << "step,t,mass_u,linf_u,linf_v,linf_w,psi,grad_v4,grad_w2,bound_violation,cfl_violation\n";
}

void write_csv_row(std::ostream& os, const DiagnosticsRecord& rec) {
  os << rec.step << ',';
  for (double v : {rec.t, rec.mass_u, rec.linf_u, rec.linf_v, rec.linf_w, rec.psi, rec.grad_v4,
                   rec.grad_w2}) {
    put_real(os, v);
    os << ',';
  }
  os << (rec.bound_violation ? 1 : 0) << ',' << (rec.cfl_violation ? 1 : 0) << '\n';
}

}  // namespace chemotax
