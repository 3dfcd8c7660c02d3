#include "containment_internal.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace spectainer {

using detail::LogLevel;

namespace {

struct DualPoint {
  Matrix value;  // W (reduced spectraplex) or z (reduced simplex, as a column)
  double objective = 0.0;
};

struct PrimalPoint {
  Vector x;
  Vector y;
  double objective = 0.0;
};

using DualStep = std::function<std::optional<DualPoint>(const Vector&)>;
using PrimalStep = std::function<std::optional<PrimalPoint>(const Matrix&)>;
using Validate = std::function<std::optional<Witness>(const PrimalPoint&, const DualPoint&)>;

// Alternating minimization of the bilinear objective; each half-step is a
// convex program.
std::optional<Witness> alternate(const Vector& seed, const DualStep& dual_step,
                                 const PrimalStep& primal_step, const Validate& validate) {
  auto dual = dual_step(seed);
  if (!dual) return std::nullopt;
  std::optional<Witness> best;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    const auto primal = primal_step(dual->value);
    if (!primal) break;
    if (primal->objective <= -detail::kViolationTol) {
      if (auto w = validate(*primal, *dual)) {
        if (!best || w->violation < best->violation) best = w;
      }
    }
    const auto next = dual_step(primal->x);
    if (!next) break;
    if (next->objective <= -detail::kViolationTol) {
      if (auto w = validate(*primal, *next)) {
        if (!best || w->violation < best->violation) best = w;
      }
    }
    if (next->objective > last - 1e-9 * (1.0 + std::abs(last))) break;
    last = next->objective;
    dual = next;
  }
  return best;
}

std::vector<Vector> witness_seeds(const LinearPencil& a, const std::optional<Vector>& moments,
                                  const ContainmentOptions& opts) {
  std::vector<Vector> seeds;
  if (moments && moments->head(a.d()).allFinite()) seeds.push_back(moments->head(a.d()));
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < opts.witness_directions; ++i) {
    Vector c(a.d());
    for (int p = 0; p < a.d(); ++p) c(p) = normal(rng);
    const detail::LinearMin m = detail::minimize_linear(a, c, 0.0, opts.sdp);
    if (m.status == LmiStatus::Optimal) seeds.push_back(m.x);
  }
  return seeds;
}

struct RelaxationOutcome {
  std::optional<SosEvidence> evidence;
  std::optional<Vector> moments;
};

// Runs orders 1..t_max of the relaxation of dom, filling mu/notes in v.
RelaxationOutcome run_relaxation(const BilinearDomain& dom, int t_max,
                                 const ContainmentOptions& opts, Verdict& v) {
  RelaxationOutcome out;
  for (int t = 1; t <= t_max; ++t) {
    auto prog = std::make_shared<SosProgram>(build_bilinear_relaxation(dom, t));
    const int neq = compile(*prog).equations;
    if (neq > opts.max_equations) {
      if (!v.note.empty()) v.note += "; ";
      v.note += "order " + std::to_string(t) + " skipped (" + std::to_string(neq) + " equations)";
      break;
    }
    const detail::Stopwatch sw;
    const SosResult res = solve_sos(*prog, opts.sdp);
    detail::log(LogLevel::Info, "bilinear t=" + std::to_string(t) + " status " +
                                    to_string(res.status) + " equations " +
                                    std::to_string(res.equations) + " (" +
                                    std::to_string(sw.ms()) + " ms)");
    if (res.moments) out.moments = res.moments;
    if (res.status != SdpStatus::Optimal) {
      if (!v.note.empty()) v.note += "; ";
      v.note += "order " + std::to_string(t) + " " + to_string(res.status);
      continue;
    }
    v.order = t;
    v.mu = *res.mu;
    v.mu_sequence.push_back(*res.mu);
    if (*res.mu >= -opts.feas_tol) {
      if (res.certificate) {
        v.residual = res.certificate->residual;
        out.evidence = SosEvidence{t, prog, *res.certificate};
        return out;
      }
      if (!v.note.empty()) v.note += "; ";
      v.note += res.certificate_error;
    }
  }
  return out;
}

}  // namespace

Verdict bilinear_ps_ps(const LinearPencil& a, const LinearPencil& b, int t_max,
                       const ContainmentOptions& opts) {
  const detail::Stopwatch sw;
  if (a.d() != b.d()) throw ContractViolation("bilinear: dimensions differ");
  if (t_max < 1) throw ContractViolation("bilinear: order must be at least 1");
  const std::string method = "bilinear";
  if (auto v = detail::empty_inner_verdict(a, method, opts.sdp)) {
    v->wall_time_ms = sw.ms();
    return *v;
  }
  Verdict v;
  v.method = method;

  // Facial reduction of the spectraplex slice until the constraint
  // qualification holds on the reduced face.
  const int l = b.k();
  Matrix basis = Matrix::Identity(l, l);
  bool closure = false;
  if (b.m() > 0) {
    const CqResult cq = outer_projection_cq(b);
    if (cq.status == CqStatus::WholeSpace) {
      Matrix s = Matrix::Zero(l, l);
      for (int q = 0; q < b.m(); ++q) s += cq.coefficients(q) * b.ay()[q].mat();
      v.status = VerdictStatus::Contained;
      v.evidence = WholeSpaceCertificate{cq.coefficients, lambda_min(SymMat(s))};
      v.note = "outer projection is the whole space";
      v.wall_time_ms = sw.ms();
      return v;
    }
    if (cq.status == CqStatus::Unknown) {
      v.status = VerdictStatus::Unknown;
      v.note = "constraint qualification undecided";
      v.wall_time_ms = sw.ms();
      return v;
    }
    CqResult cur = cq;
    while (cur.status == CqStatus::CQFails) {
      closure = true;
      const Matrix ker = nullspace_basis(cur.direction->mat(), 1e-7);
      if (ker.cols() == 0) break;
      basis = basis * ker;
      cur = outer_projection_cq(congruence(b, basis));
    }
    if (cur.status != CqStatus::CQHolds) {
      v.status = VerdictStatus::Unknown;
      v.note = "facial reduction of the outer slice did not terminate cleanly";
      v.wall_time_ms = sw.ms();
      return v;
    }
    detail::log(LogLevel::Info, "bilinear: slice face dimension " + std::to_string(basis.cols()));
  }

  BilinearDomain dom = spectrahedral_bilinear_domain(a, b, basis, true);
  if (opts.arch_bound) add_archimedean_ball(dom, *opts.arch_bound);
  const RelaxationOutcome rel = run_relaxation(dom, t_max, opts, v);
  if (rel.evidence) {
    v.status = closure ? VerdictStatus::ContainedInClosure : VerdictStatus::Contained;
    if (closure) {
      if (!v.note.empty()) v.note += "; ";
      v.note += "constraint qualification fails; containment holds for the closure";
    }
    v.evidence = *rel.evidence;
    v.wall_time_ms = sw.ms();
    return v;
  }

  const LinearPencil reduced = congruence(b, basis);
  const int r = static_cast<int>(basis.cols());
  const DualStep dual_step = [&](const Vector& x) -> std::optional<DualPoint> {
    const Matrix bx = evaluate(reduced, x).mat();
    SdpBuilder builder;
    const int blk = builder.add_block(r, r == 1 ? BlockKind::Diagonal : BlockKind::Psd);
    auto add_pairing = [&](LinExpr& e, const Matrix& m, double s) {
      for (int j = 0; j < r; ++j)
        for (int i = 0; i <= j; ++i) {
          const double c = i == j ? m(i, i) : 2.0 * m(i, j);
          if (c != 0.0) e.add_x(builder.coord(blk, i, j), s * c);
        }
    };
    LinExpr tr;
    add_pairing(tr, Matrix::Identity(r, r), 1.0);
    builder.add_equation(tr, 1.0);
    for (const auto& bq : reduced.ay()) {
      LinExpr e;
      add_pairing(e, bq.mat(), 1.0);
      if (!e.x.empty()) builder.add_equation(e, 0.0);
    }
    LinExpr obj;
    add_pairing(obj, bx, -1.0);
    builder.set_objective(obj);
    const CompiledSdp comp = builder.compile();
    if (comp.inconsistent) return std::nullopt;
    const SdpSolution sol = solve(comp.problem, opts.sdp);
    if (sol.status != SdpStatus::Optimal) return std::nullopt;
    Matrix w = r == 1 ? Matrix::Constant(1, 1, sol.X[blk](0, 0))
                      : Matrix(0.5 * (sol.X[blk] + sol.X[blk].transpose()));
    return DualPoint{w, bx.cwiseProduct(w).sum()};
  };
  const PrimalStep primal_step = [&](const Matrix& w) -> std::optional<PrimalPoint> {
    const Matrix z = basis * w * basis.transpose();
    Vector c(b.d());
    for (int p = 0; p < b.d(); ++p) c(p) = b.ax()[p].mat().cwiseProduct(z).sum();
    const detail::LinearMin m =
        detail::minimize_linear(a, c, b.a0().mat().cwiseProduct(z).sum(), opts.sdp);
    if (m.status != LmiStatus::Optimal) return std::nullopt;
    return PrimalPoint{m.x, m.y, m.value};
  };
  const Validate validate = [&](const PrimalPoint& p, const DualPoint& d) -> std::optional<Witness> {
    const Matrix z = basis * d.value * basis.transpose();
    Witness w;
    w.x = p.x;
    if (a.m() > 0) w.y = p.y;
    w.Z = SymMat(0.5 * (z + z.transpose()));
    w.violation = detail::pairing(b, p.x, w.Z->mat());
    if (w.violation > -detail::kViolationTol) return std::nullopt;
    const MembershipResult mem = membership(a, p.x);
    if (!mem.member || !*mem.member) return std::nullopt;
    return w;
  };
  for (const Vector& seed : witness_seeds(a, rel.moments, opts)) {
    if (auto w = alternate(seed, dual_step, primal_step, validate)) {
      v.status = VerdictStatus::NotContained;
      v.evidence = *w;
      v.wall_time_ms = sw.ms();
      return v;
    }
  }
  v.status = VerdictStatus::Unknown;
  if (!v.note.empty()) v.note += "; ";
  v.note += "relaxation margin negative and no violating pair was found";
  v.wall_time_ms = sw.ms();
  return v;
}

Verdict bilinear_ph_ph(const HPolyhedronProj& inner, const HPolyhedronProj& outer, int t_max,
                       const ContainmentOptions& opts) {
  const detail::Stopwatch sw;
  if (inner.d() != outer.d()) throw ContractViolation("bilinear: dimensions differ");
  if (t_max < 1) throw ContractViolation("bilinear: order must be at least 1");
  const std::string method = "bilinear";
  const LinearPencil pa = polyhedron_to_normal_form(inner);
  const LinearPencil pb = polyhedron_to_normal_form(outer);
  if (auto v = detail::empty_inner_verdict(pa, method, opts.sdp)) {
    v->wall_time_ms = sw.ms();
    return *v;
  }
  Verdict v;
  v.method = method;

  // Rows forced to z_j = 0 on the kernel simplex are dropped.
  std::vector<int> keep(outer.rows());
  for (int j = 0; j < outer.rows(); ++j) keep[j] = j;
  if (outer.m() > 0) {
    const CqResult cq = outer_projection_cq(pb);
    if (cq.status == CqStatus::WholeSpace) {
      const Vector s = outer.Aprime * cq.coefficients;
      v.status = VerdictStatus::Contained;
      v.evidence = WholeSpaceCertificate{cq.coefficients, s.minCoeff()};
      v.note = "outer projection is the whole space";
      v.wall_time_ms = sw.ms();
      return v;
    }
    if (cq.status == CqStatus::Unknown) {
      v.status = VerdictStatus::Unknown;
      v.note = "constraint qualification undecided";
      v.wall_time_ms = sw.ms();
      return v;
    }
    CqResult cur = cq;
    while (cur.status == CqStatus::CQFails) {
      const Matrix& dir = cur.direction->mat();
      std::vector<int> next;
      for (size_t j = 0; j < keep.size(); ++j)
        if (dir(j, j) <= 1e-7) next.push_back(keep[j]);
      if (next.size() == keep.size() || next.empty()) break;
      keep = next;
      Vector a(keep.size());
      Matrix ap(keep.size(), outer.m());
      for (size_t j = 0; j < keep.size(); ++j) {
        a(j) = outer.a(keep[j]);
        ap.row(j) = outer.Aprime.row(keep[j]);
      }
      cur = outer_projection_cq(polyhedron_to_normal_form(
          HPolyhedronProj(a, Matrix::Zero(keep.size(), outer.d()), ap)));
    }
    if (cur.status != CqStatus::CQHolds) {
      v.status = VerdictStatus::Unknown;
      v.note = "facial reduction of the outer slice did not terminate cleanly";
      v.wall_time_ms = sw.ms();
      return v;
    }
  }
  const int nk = static_cast<int>(keep.size());
  Vector rb(nk);
  Matrix rB(nk, outer.d());
  Matrix rBp(nk, outer.m());
  for (int j = 0; j < nk; ++j) {
    rb(j) = outer.a(keep[j]);
    rB.row(j) = outer.A.row(keep[j]);
    rBp.row(j) = outer.Aprime.row(keep[j]);
  }
  const HPolyhedronProj reduced(rb, rB, rBp);

  BilinearDomain dom = polyhedral_bilinear_domain(inner, reduced, true);
  if (opts.arch_bound) add_archimedean_ball(dom, *opts.arch_bound);
  const RelaxationOutcome rel = run_relaxation(dom, t_max, opts, v);
  if (rel.evidence) {
    v.status = VerdictStatus::Contained;
    v.evidence = *rel.evidence;
    v.wall_time_ms = sw.ms();
    return v;
  }

  const DualStep dual_step = [&](const Vector& x) -> std::optional<DualPoint> {
    const Vector vals = rb + rB * x;
    SdpBuilder builder;
    const int blk = builder.add_block(nk, BlockKind::Diagonal);
    LinExpr sum;
    for (int j = 0; j < nk; ++j) sum.add_x(builder.coord(blk, j, j), 1.0);
    builder.add_equation(sum, 1.0);
    for (int q = 0; q < reduced.m(); ++q) {
      LinExpr e;
      for (int j = 0; j < nk; ++j)
        if (rBp(j, q) != 0.0) e.add_x(builder.coord(blk, j, j), rBp(j, q));
      if (!e.x.empty()) builder.add_equation(e, 0.0);
    }
    LinExpr obj;
    for (int j = 0; j < nk; ++j)
      if (vals(j) != 0.0) obj.add_x(builder.coord(blk, j, j), -vals(j));
    builder.set_objective(obj);
    const CompiledSdp comp = builder.compile();
    if (comp.inconsistent) return std::nullopt;
    const SdpSolution sol = solve(comp.problem, opts.sdp);
    if (sol.status != SdpStatus::Optimal) return std::nullopt;
    const Matrix z = sol.X[blk].cwiseMax(0.0);
    return DualPoint{z, vals.dot(z.col(0))};
  };
  const PrimalStep primal_step = [&](const Matrix& z) -> std::optional<PrimalPoint> {
    const Vector c = rB.transpose() * z.col(0);
    const detail::LinearMin m = detail::minimize_linear(pa, c, rb.dot(z.col(0)), opts.sdp);
    if (m.status != LmiStatus::Optimal) return std::nullopt;
    return PrimalPoint{m.x, m.y, m.value};
  };
  const Validate validate = [&](const PrimalPoint& p, const DualPoint& d) -> std::optional<Witness> {
    Vector z = Vector::Zero(outer.rows());
    for (int j = 0; j < nk; ++j) z(keep[j]) = d.value(j, 0);
    z /= z.sum();
    Witness w;
    w.x = p.x;
    if (inner.m() > 0) w.y = p.y;
    w.z = z;
    w.violation = z.dot(outer.a + outer.A * p.x);
    if (w.violation > -detail::kViolationTol) return std::nullopt;
    const MembershipResult mem = membership(pa, p.x);
    if (!mem.member || !*mem.member) return std::nullopt;
    return w;
  };
  for (const Vector& seed : witness_seeds(pa, rel.moments, opts)) {
    if (auto w = alternate(seed, dual_step, primal_step, validate)) {
      v.status = VerdictStatus::NotContained;
      v.evidence = *w;
      v.wall_time_ms = sw.ms();
      return v;
    }
  }
  v.status = VerdictStatus::Unknown;
  if (!v.note.empty()) v.note += "; ";
  v.note += "relaxation margin negative and no violating pair was found";
  v.wall_time_ms = sw.ms();
  return v;
}

}  // namespace spectainer
