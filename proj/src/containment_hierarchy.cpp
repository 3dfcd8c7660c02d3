#include "containment_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spectainer {

using detail::LogLevel;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void append_note(Verdict& v, const std::string& s) {
  if (!v.note.empty()) v.note += "; ";
  v.note += s;
}

}  // namespace

Verdict hierarchy(const LinearPencil& a, const LinearPencil& b, int t_max, HierarchyMode mode,
                  const ContainmentOptions& opts) {
  const detail::Stopwatch sw;
  if (b.m() != 0) throw ContractViolation("hierarchy: outer pencil is projected");
  if (a.d() != b.d()) throw ContractViolation("hierarchy: dimensions differ");
  if (t_max < 0) throw ContractViolation("hierarchy: negative order");
  const std::string method = mode == HierarchyMode::Projected ? "hierarchy" : "hierarchy-plain";
  if (auto v = detail::empty_inner_verdict(a, method, opts.sdp)) {
    v->wall_time_ms = sw.ms();
    return *v;
  }
  Verdict v;
  v.method = method;
  v.status = VerdictStatus::Unknown;
  const auto strict = is_strictly_feasible(a);
  if (!strict || !*strict) append_note(v, "inner pencil is not strictly feasible");

  for (int t = 0; t <= t_max; ++t) {
    auto prog = std::make_shared<SosProgram>(
        mode == HierarchyMode::Projected ? build_projected_module_membership(a, b, t)
                                         : build_plain_module_membership(a, b, t));
    const int neq = compile(*prog).equations;
    if (neq > opts.max_equations) {
      append_note(v, "order " + std::to_string(t) + " skipped (" + std::to_string(neq) +
                         " equations)");
      break;
    }
    const detail::Stopwatch order_sw;
    const SosResult res = solve_sos(*prog, opts.sdp);
    detail::log(LogLevel::Info, method + " t=" + std::to_string(t) + " status " +
                                    to_string(res.status) +
                                    (res.mu ? " mu " + fmt(*res.mu) : std::string()) + " (" +
                                    fmt(order_sw.ms()) + " ms)");
    if (res.status == SdpStatus::Stalled) {
      append_note(v, "order " + std::to_string(t) + " stalled");
      continue;
    }
    if (res.status == SdpStatus::PrimalInfeasible) {
      append_note(v, "order " + std::to_string(t) + " infeasible for every margin");
      continue;
    }
    if (res.status == SdpStatus::DualInfeasible) {
      v.status = VerdictStatus::Contained;
      v.order = t;
      v.mu = std::numeric_limits<double>::infinity();
      append_note(v, "margin unbounded; inner set is empty");
      break;
    }
    v.mu_sequence.push_back(*res.mu);
    if (v.status == VerdictStatus::Contained) continue;
    v.order = t;
    v.mu = *res.mu;
    if (*res.mu >= -opts.feas_tol) {
      if (res.certificate) {
        v.status = VerdictStatus::Contained;
        v.residual = res.certificate->residual;
        v.evidence = SosEvidence{t, prog, *res.certificate};
        if (opts.stop_at_first) break;
      } else {
        append_note(v, "order " + std::to_string(t) + ": " + res.certificate_error);
      }
    }
  }
  v.wall_time_ms = sw.ms();
  return v;
}

double ball_margin(const LinearPencil& a, int ball_dim, double r, MarginMethod method,
                   const ContainmentOptions& opts) {
  if (a.d() != ball_dim) throw ContractViolation("ball_margin: ball dimension differs from d");
  const LinearPencil b = ball_pencil(ball_dim, r);
  const Verdict v = method == MarginMethod::Solitary ? solitary_criterion(a, b, opts)
                                                     : hierarchy(a, b, 0, HierarchyMode::Projected,
                                                                 opts);
  if (!v.mu) throw NumericalFailure("ball_margin: no margin at r = " + fmt(r) + " (" + v.note + ")");
  return *v.mu;
}

RadiusResult circumradius(const LinearPencil& a, int ball_dim, double r_lo, double r_hi,
                          double tol_r, MarginMethod method, int jobs,
                          const ContainmentOptions& opts) {
  if (!(r_lo < r_hi) || r_lo <= 0.0) throw ContractViolation("circumradius: need 0 < lo < hi");
  if (tol_r <= 0.0) throw ContractViolation("circumradius: tol_r must be positive");
  jobs = std::max(1, jobs);
  RadiusResult out;
  auto eval = [&](double r, const ContainmentOptions& o) {
    const detail::Stopwatch sw;
    const double mu = ball_margin(a, ball_dim, r, method, o);
    return RadiusRow{r, mu, sw.ms()};
  };
  const RadiusRow lo_row = eval(r_lo, opts);
  const RadiusRow hi_row = eval(r_hi, opts);
  out.trace = {lo_row, hi_row};
  if ((lo_row.mu >= 0.0) == (hi_row.mu >= 0.0))
    throw ContractViolation("circumradius: margin has the same sign at both ends (" +
                            fmt(lo_row.mu) + ", " + fmt(hi_row.mu) + ")");
  if (lo_row.mu >= 0.0) throw ContractViolation("circumradius: inner set fits in the lower ball");

  double lo = r_lo;
  double hi = r_hi;
  if (jobs == 1) {
    while (hi - lo > tol_r) {
      const RadiusRow row = eval(0.5 * (lo + hi), opts);
      out.trace.push_back(row);
      (row.mu >= 0.0 ? hi : lo) = row.r;
    }
  } else {
    ContainmentOptions inner = opts;
    inner.sdp.parallel = false;
    std::vector<RadiusRow> rows(jobs);
    while (hi - lo > tol_r) {
      const double step = (hi - lo) / (jobs + 1);
      std::vector<std::string> errors(jobs);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
      for (int j = 0; j < jobs; ++j) {
        try {
          rows[j] = eval(lo + (j + 1) * step, inner);
        } catch (const std::exception& e) {
          errors[j] = e.what();
        }
      }
      for (const auto& e : errors)
        if (!e.empty()) throw NumericalFailure(e);
      double new_lo = lo;
      double new_hi = hi;
      for (const auto& row : rows) {
        out.trace.push_back(row);
        if (row.mu >= 0.0) {
          new_hi = std::min(new_hi, row.r);
        }
      }
      for (const auto& row : rows)
        if (row.mu < 0.0 && row.r < new_hi) new_lo = std::max(new_lo, row.r);
      lo = new_lo;
      hi = new_hi;
    }
  }
  out.radius = 0.5 * (lo + hi);
  return out;
}

Verdict check_auto(const LinearPencil& a, const LinearPencil& b, const ContainmentOptions& opts) {
  if (a.d() != b.d()) throw ContractViolation("check: dimensions differ");
  if (b.m() > 0) {
    if (a.is_diagonal() && b.is_diagonal())
      return bilinear_ph_ph(normal_form_to_polyhedron(a), normal_form_to_polyhedron(b), 2, opts);
    return bilinear_ps_ps(a, b, 2, opts);
  }
  if (a.is_diagonal() && b.is_diagonal())
    return lp_containment(normal_form_to_polyhedron(a), normal_form_to_polyhedron(b), true, opts);
  if (simultaneous_diagonalizer(b)) return pis_in_h_exact(a, b, opts);

  Verdict v = solitary_criterion(a, b, opts);
  if (v.status != VerdictStatus::Unknown) return v;
  const double solitary_ms = v.wall_time_ms;
  v = hierarchy(a, b, 2, HierarchyMode::Projected, opts);
  v.wall_time_ms += solitary_ms;
  if (v.status != VerdictStatus::Unknown) return v;

  // Sufficient-only criteria failed; a validated sample point still decides.
  const detail::Stopwatch sw;
  const OracleResult o = sampling_oracle(a, b, 8 * opts.witness_directions, opts.seed, opts);
  v.wall_time_ms += sw.ms();
  if (o.witness) {
    v.status = VerdictStatus::NotContained;
    v.method += "+oracle";
    v.evidence = *o.witness;
  }
  return v;
}

}  // namespace spectainer
