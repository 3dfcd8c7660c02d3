#include "containment_internal.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace spectainer {

using detail::LogLevel;

namespace {

// Per-row minimization of (b + B x)_i over pi(P_A); the most violated row
// that validates becomes the witness.
std::optional<Witness> polyhedral_row_witness(const HPolyhedronProj& inner,
                                              const HPolyhedronProj& outer,
                                              const SdpOptions& opts) {
  const LinearPencil pa = polyhedron_to_normal_form(inner);
  std::optional<Witness> best;
  for (int i = 0; i < outer.rows(); ++i) {
    const Vector c = outer.A.row(i).transpose();
    const detail::LinearMin r = detail::minimize_linear(pa, c, outer.a(i), opts);
    if (r.status != LmiStatus::Optimal || r.value > -detail::kViolationTol) continue;
    const Vector vals = outer.a + outer.A * r.x;
    const double viol = vals.minCoeff();
    if (viol > -detail::kViolationTol) continue;
    const MembershipResult mem = membership(pa, r.x);
    if (!mem.member || !*mem.member) continue;
    if (!best || viol < best->violation) {
      Witness w;
      w.x = r.x;
      if (inner.m() > 0) w.y = r.y;
      w.violation = viol;
      best = w;
    }
  }
  return best;
}

}  // namespace

Verdict lp_containment(const HPolyhedronProj& inner, const HPolyhedronProj& outer, bool allow_c0,
                       const ContainmentOptions& opts) {
  const detail::Stopwatch sw;
  if (outer.m() != 0) throw ContractViolation("lp_containment: outer polyhedron is projected");
  if (inner.d() != outer.d()) throw ContractViolation("lp_containment: dimensions differ");
  const std::string method = "lp";
  if (auto v = detail::empty_inner_verdict(polyhedron_to_normal_form(inner), method, opts.sdp)) {
    v->wall_time_ms = sw.ms();
    return *v;
  }

  const int na = inner.rows();
  const int nb = outer.rows();
  const int d = inner.d();
  const int ma = inner.m();
  const int neq_row = 1 + d + ma;
  const int nc = nb * na;
  const int n0 = allow_c0 ? nb : 0;
  const int nslack = 2 * nb * neq_row;

  // Outer rows decouple; each is normalized by its largest coefficient.
  Vector rscale(nb);
  for (int i = 0; i < nb; ++i) {
    double s = std::abs(outer.a(i));
    if (d > 0) s = std::max(s, outer.A.row(i).cwiseAbs().maxCoeff());
    rscale(i) = s > 0.0 ? 1.0 / s : 1.0;
  }

  SdpBuilder builder;
  const int blk = builder.add_block(nc + n0 + nslack, BlockKind::Diagonal);
  auto cvar = [&](int i, int j) { return builder.coord(blk, i * na + j, i * na + j); };
  int slack = nc + n0;
  LinExpr obj;
  auto add_row = [&](LinExpr row, double rhs) {
    const long sp = builder.coord(blk, slack, slack);
    const long sm = builder.coord(blk, slack + 1, slack + 1);
    slack += 2;
    row.add_x(sp, 1.0);
    row.add_x(sm, -1.0);
    obj.add_x(sp, -1.0);
    obj.add_x(sm, -1.0);
    builder.add_equation(std::move(row), rhs);
  };
  for (int i = 0; i < nb; ++i) {
    LinExpr row;
    for (int j = 0; j < na; ++j) row.add_x(cvar(i, j), inner.a(j));
    if (allow_c0) row.add_x(builder.coord(blk, nc + i, nc + i), 1.0);
    add_row(row, outer.a(i) * rscale(i));
    for (int p = 0; p < d; ++p) {
      LinExpr rp;
      for (int j = 0; j < na; ++j) rp.add_x(cvar(i, j), inner.A(j, p));
      add_row(rp, outer.A(i, p) * rscale(i));
    }
    for (int q = 0; q < ma; ++q) {
      LinExpr rq;
      for (int j = 0; j < na; ++j) rq.add_x(cvar(i, j), inner.Aprime(j, q));
      add_row(rq, 0.0);
    }
  }
  builder.set_objective(obj);
  const CompiledSdp comp = builder.compile();
  const SdpSolution sol = solve(comp.problem, opts.sdp);

  Verdict v;
  v.method = method;
  if (sol.status != SdpStatus::Optimal) {
    v.status = VerdictStatus::Unknown;
    v.note = std::string("LP solve ended with status ") + to_string(sol.status);
    v.wall_time_ms = sw.ms();
    return v;
  }
  const Matrix& x = sol.X[blk];
  Matrix c(nb, na);
  Vector c0 = Vector::Zero(nb);
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < na; ++j) c(i, j) = x(i * na + j, 0) / rscale(i);
    if (allow_c0) c0(i) = x(nc + i, 0) / rscale(i);
  }
  const double slack_sum = -sol.primal_obj;
  const double scale = std::max(outer.a.cwiseAbs().maxCoeff(),
                                d > 0 ? outer.A.cwiseAbs().maxCoeff() : 0.0);
  const double resid = detail::lp_residual(inner, outer, c0, c);
  v.system_feasible = slack_sum <= 1e-7 * (1.0 + nb * neq_row);
  v.residual = resid;
  if (*v.system_feasible && resid <= kCertificateTol * (1.0 + scale)) {
    v.status = VerdictStatus::Contained;
    v.evidence = LpCertificate{c0, c, resid};
    v.wall_time_ms = sw.ms();
    return v;
  }
  if (*v.system_feasible) {
    v.status = VerdictStatus::Unknown;
    v.note = "LP certificate failed re-verification";
    v.wall_time_ms = sw.ms();
    return v;
  }

  if (auto w = polyhedral_row_witness(inner, outer, opts.sdp)) {
    v.status = VerdictStatus::NotContained;
    v.evidence = *w;
  } else {
    v.status = VerdictStatus::Unknown;
    v.note = allow_c0 ? "system infeasible but no violating point was found"
                      : "system without c0 is infeasible; that form is exact only for "
                        "polytopes that are not singletons";
  }
  v.wall_time_ms = sw.ms();
  return v;
}

Verdict solitary_criterion(const LinearPencil& a, const LinearPencil& b,
                           const ContainmentOptions& opts) {
  const detail::Stopwatch sw;
  if (b.m() != 0) throw ContractViolation("solitary_criterion: outer pencil is projected");
  if (a.d() != b.d()) throw ContractViolation("solitary_criterion: dimensions differ");
  const std::string method = "solitary";
  if (auto v = detail::empty_inner_verdict(a, method, opts.sdp)) {
    v->wall_time_ms = sw.ms();
    return *v;
  }
  const int k = a.k();
  const int l = b.k();
  const int d = a.d();
  const double bmax = b.coefficient_scale();
  const double tau = bmax > 0.0 ? 1.0 / bmax : 1.0;

  // Block, equation and variable order follow the order-0 projected module,
  // so both constructions yield the same SDP.
  SdpBuilder builder;
  std::vector<int> psd;
  int c0blk = -1;
  int cblk = -1;
  const int nd = (l == 1 ? 1 : 0) + (k * l == 1 ? 1 : 0);
  if (l > 1) c0blk = builder.add_block(l, BlockKind::Psd);
  if (k * l > 1) cblk = builder.add_block(k * l, BlockKind::Psd);
  const int dblk = nd > 0 ? builder.add_block(nd, BlockKind::Diagonal) : -1;
  int dpos = 0;
  const int c0pos = l == 1 ? dpos++ : -1;
  const int cpos = k * l == 1 ? dpos++ : -1;
  auto c0coord = [&](int i, int j) {
    return c0blk >= 0 ? builder.coord(c0blk, i, j) : builder.coord(dblk, c0pos, c0pos);
  };
  // C row a * l + i is stored at i * k + a, the Gram layout of the module.
  auto ccoord = [&](int a, int i, int b, int j) {
    return cblk >= 0 ? builder.coord(cblk, i * k + a, j * k + b)
                     : builder.coord(dblk, cpos, cpos);
  };
  const int mu = builder.add_free();

  auto combine = [&](LinExpr& row, const SymMat& m, int i, int j) {
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q)
        if (m(p, q) != 0.0) row.add_x(ccoord(p, i, q, j), m(p, q));
  };
  for (int j = 0; j < l; ++j) {
    for (int i = 0; i <= j; ++i) {
      LinExpr r0;
      combine(r0, a.a0(), i, j);
      r0.add_x(c0coord(i, j), 1.0);
      if (i == j) r0.add_f(mu, 1.0);
      builder.add_equation(r0, tau * b.a0()(i, j));
      for (int p = 0; p < d; ++p) {
        LinExpr rp;
        combine(rp, a.ax()[p], i, j);
        if (rp.x.empty() && b.ax()[p](i, j) == 0.0) continue;
        builder.add_equation(rp, tau * b.ax()[p](i, j));
      }
    }
  }
  for (int q = 0; q < a.m(); ++q) {
    for (int j = 0; j < l; ++j) {
      for (int i = 0; i <= j; ++i) {
        LinExpr rq;
        combine(rq, a.ay()[q], i, j);
        if (!rq.x.empty()) builder.add_equation(rq, 0.0);
      }
    }
  }
  LinExpr obj;
  obj.add_f(mu, 1.0);
  builder.set_objective(obj);
  const CompiledSdp comp = builder.compile();

  Verdict v;
  v.method = method;
  v.order = 0;
  if (comp.inconsistent) {
    v.status = VerdictStatus::Unknown;
    v.system_feasible = false;
    v.note = "solitary system is inconsistent";
    v.wall_time_ms = sw.ms();
    return v;
  }
  const SdpSolution sol = solve(comp.problem, opts.sdp);
  switch (sol.status) {
    case SdpStatus::PrimalInfeasible:
      v.status = VerdictStatus::Unknown;
      v.system_feasible = false;
      v.note = "solitary system is infeasible for every margin";
      v.wall_time_ms = sw.ms();
      return v;
    case SdpStatus::DualInfeasible:
      v.status = VerdictStatus::Contained;
      v.system_feasible = true;
      v.mu = std::numeric_limits<double>::infinity();
      v.note = "margin unbounded; inner set is empty";
      v.wall_time_ms = sw.ms();
      return v;
    case SdpStatus::Stalled:
      v.status = VerdictStatus::Unknown;
      v.note = "solver stalled";
      v.wall_time_ms = sw.ms();
      return v;
    case SdpStatus::Optimal:
      break;
  }
  const Vector free = comp.recover_free(sol.X);
  const double m = free(mu) / tau;
  auto gram = [&](int blk, int pos, int n) -> Matrix {
    if (blk >= 0) return 0.5 * (sol.X[blk] + sol.X[blk].transpose()) / tau;
    return Matrix::Constant(n, n, sol.X[dblk](pos, 0) / tau);
  };
  SolitaryCertificate cert;
  cert.mu = m;
  cert.C0 = gram(c0blk, c0pos, l);
  const Matrix stored = gram(cblk, cpos, k * l);
  cert.C.resize(k * l, k * l);
  for (int i = 0; i < l; ++i)
    for (int a = 0; a < k; ++a)
      for (int j = 0; j < l; ++j)
        for (int b = 0; b < k; ++b) cert.C(a * l + i, b * l + j) = stored(i * k + a, j * k + b);
  cert.residual = detail::solitary_residual(a, b, m, cert.C0, cert.C);
  v.mu = m;
  v.mu_sequence = {m};
  v.residual = cert.residual;
  v.system_feasible = m >= -opts.feas_tol;
  const bool verified = cert.residual <= kCertificateTol * (1.0 + bmax);
  if (*v.system_feasible && verified) {
    v.status = VerdictStatus::Contained;
  } else {
    v.status = VerdictStatus::Unknown;
    if (!verified) v.note = "solitary certificate failed re-verification";
  }
  v.evidence = cert;
  v.wall_time_ms = sw.ms();
  return v;
}

std::optional<Matrix> simultaneous_diagonalizer(const LinearPencil& b, double tol) {
  const int l = b.k();
  std::vector<Matrix> mats{b.a0().mat()};
  for (const auto& m : b.ax()) mats.push_back(m.mat());
  for (const auto& m : b.ay()) mats.push_back(m.mat());
  bool diag = true;
  for (const auto& m : mats) diag = diag && SymMat(m).is_diagonal();
  if (diag) return Matrix(Matrix::Identity(l, l));

  // A positive definite element of the span.
  Matrix w;
  if (lambda_min(b.a0()) > tol) {
    w = mats[0];
  } else {
    const MarginResult r = feasibility_margin(b);
    if (r.status != LmiStatus::Optimal || r.margin <= tol) return std::nullopt;
    w = evaluate(b, r.x, r.y).mat();
  }
  const Eigendecomposition we = sym_eig(SymMat(w));
  const Matrix wih = we.vectors * we.values.cwiseSqrt().cwiseInverse().asDiagonal() *
                     we.vectors.transpose();
  std::vector<Matrix> ms;
  Matrix combo = Matrix::Zero(l, l);
  for (size_t i = 0; i < mats.size(); ++i) {
    ms.push_back(wih * mats[i] * wih);
    combo += (1.0 / (static_cast<double>(i) + std::sqrt(2.0))) * ms.back();
  }
  for (size_t i = 0; i < ms.size(); ++i)
    for (size_t j = i + 1; j < ms.size(); ++j)
      if ((ms[i] * ms[j] - ms[j] * ms[i]).norm() > tol * (1.0 + ms[i].norm() * ms[j].norm()))
        return std::nullopt;
  const Eigendecomposition ce = sym_eig(SymMat(0.5 * (combo + combo.transpose())));
  const Matrix t = wih * ce.vectors;
  for (const auto& m : mats) {
    Matrix dm = t.transpose() * m * t;
    const double scale = 1.0 + dm.norm();
    dm.diagonal().setZero();
    if (dm.norm() > 1e3 * tol * scale) return std::nullopt;
  }
  return t;
}

Verdict pis_in_h_exact(const LinearPencil& a, const LinearPencil& b,
                       const ContainmentOptions& opts) {
  const detail::Stopwatch sw;
  if (b.m() != 0) throw ContractViolation("pis_in_h_exact: outer pencil is projected");
  if (a.d() != b.d()) throw ContractViolation("pis_in_h_exact: dimensions differ");
  const std::optional<Matrix> t = simultaneous_diagonalizer(b);
  if (!t) throw ContractViolation("pis_in_h_exact: outer coefficients are not simultaneously diagonalizable");
  const std::string method = "pis-in-h-exact";
  if (auto v = detail::empty_inner_verdict(a, method, opts.sdp)) {
    v->wall_time_ms = sw.ms();
    return *v;
  }
  const auto strict = is_strictly_feasible(a);

  auto prog = std::make_shared<SosProgram>(build_projected_module_membership(a, b, 0));
  const SosResult res = solve_sos(*prog, opts.sdp);
  Verdict v;
  v.method = method;
  v.order = 0;
  if (res.mu) {
    v.mu = *res.mu;
    v.mu_sequence = {*res.mu};
  }
  if (res.status == SdpStatus::Optimal && *res.mu >= -opts.feas_tol) {
    if (res.certificate) {
      v.status = VerdictStatus::Contained;
      v.residual = res.certificate->residual;
      v.evidence = SosEvidence{0, prog, *res.certificate};
    } else {
      v.status = VerdictStatus::Unknown;
      v.note = res.certificate_error;
    }
    v.wall_time_ms = sw.ms();
    return v;
  }
  if (res.status == SdpStatus::Stalled) {
    v.status = VerdictStatus::Unknown;
    v.note = "solver stalled";
    v.wall_time_ms = sw.ms();
    return v;
  }

  // Rows of T' B(x) T are linear; minimize each over pi(S_A).
  const Matrix& tm = *t;
  std::optional<Witness> best;
  for (int r = 0; r < b.k(); ++r) {
    const Vector col = tm.col(r);
    Vector c(b.d());
    for (int p = 0; p < b.d(); ++p) c(p) = col.dot(b.ax()[p].mat() * col);
    const double c0 = col.dot(b.a0().mat() * col);
    const detail::LinearMin lm = detail::minimize_linear(a, c, c0, opts.sdp);
    if (lm.status != LmiStatus::Optimal || lm.value >= 0.0) continue;
    const double lmin = lambda_min(evaluate(b, lm.x));
    if (lmin > -detail::kViolationTol) continue;
    const MembershipResult mem = membership(a, lm.x);
    if (!mem.member || !*mem.member) continue;
    if (!best || lmin < best->violation) {
      Witness w;
      w.x = lm.x;
      if (a.m() > 0) w.y = lm.y;
      w.violation = lmin;
      best = w;
    }
  }
  if (best) {
    v.status = VerdictStatus::NotContained;
    v.evidence = *best;
  } else {
    v.status = VerdictStatus::Unknown;
    v.note = strict && *strict ? "order-0 margin negative but no violating point was found"
                               : "inner pencil is not strictly feasible; order 0 is not exact";
  }
  v.wall_time_ms = sw.ms();
  return v;
}

PositiveMapResult positive_map_matrix(const LinearPencil& a, const LinearPencil& b,
                                      const ContainmentOptions& opts) {
  const int k = a.k();
  const int l = b.k();
  const int nc = a.d() + a.m();
  if (nc > 0) {
    Matrix vecs(k * k, nc);
    for (int p = 0; p < a.d(); ++p) vecs.col(p) = a.ax()[p].mat().reshaped();
    for (int q = 0; q < a.m(); ++q) vecs.col(a.d() + q) = a.ay()[q].mat().reshaped();
    const Matrix ker = nullspace_basis(vecs, 1e-10);
    if (ker.cols() > 0) {
      std::ostringstream os;
      os << "positive_map_matrix: coefficients are linearly dependent, combination [";
      for (int i = 0; i < nc; ++i) os << (i ? ", " : "") << ker(i, 0);
      os << "] vanishes";
      throw ContractViolation(os.str());
    }
  }
  PositiveMapResult out;
  out.solitary = solitary_criterion(a, b, opts);
  const auto* cert = std::get_if<SolitaryCertificate>(&out.solitary.evidence);
  if (!cert) {
    if (out.solitary.system_feasible && !*out.solitary.system_feasible)
      out.completely_positive = false;
    return out;
  }
  Matrix chat = Matrix::Zero((k + 1) * l, (k + 1) * l);
  chat.topLeftCorner(l, l) = cert->C0 + cert->mu * Matrix::Identity(l, l);
  chat.bottomRightCorner(k * l, k * l) = cert->C;
  out.chat = chat;
  out.psd = lambda_min(SymMat(0.5 * (chat + chat.transpose()))) >= -opts.feas_tol;
  out.completely_positive = out.psd;

  // Choi-type action N -> sum_ij N_ij chat_ij on (1 (+) A_0), (0 (+) A_p),
  // (0 (+) A'_q).
  auto apply = [&](double corner, const Matrix& m) {
    Matrix n = Matrix::Zero(k + 1, k + 1);
    n(0, 0) = corner;
    n.bottomRightCorner(k, k) = m;
    Matrix img = Matrix::Zero(l, l);
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j)
        if (n(i, j) != 0.0) img += n(i, j) * chat.block(i * l, j * l, l, l);
    return img;
  };
  double r = (apply(1.0, a.a0().mat()) - b.a0().mat()).cwiseAbs().maxCoeff();
  for (int p = 0; p < a.d(); ++p)
    r = std::max(r, (apply(0.0, a.ax()[p].mat()) - b.ax()[p].mat()).cwiseAbs().maxCoeff());
  for (int q = 0; q < a.m(); ++q)
    r = std::max(r, apply(0.0, a.ay()[q].mat()).cwiseAbs().maxCoeff());
  out.map_residual = r;
  return out;
}

}  // namespace spectainer
