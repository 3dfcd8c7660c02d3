#include "spectainer/schur.hpp"
#include "spectainer/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spectainer {

namespace {

struct Scaled {
  SdpProblem p;
  Vector row_norm;
  double beta_b = 1.0;
  double beta_c = 1.0;
};

Scaled scale_problem(const SdpProblem& in) {
  Scaled s;
  s.p = in;
  const int m = in.num_constraints();
  s.row_norm = Vector::Ones(m);
  for (int i = 0; i < m; ++i) {
    const double nrm = in.a[i].frobenius();
    if (nrm > 0) {
      s.row_norm(i) = nrm;
      for (auto& e : s.p.a[i].entries) e.v /= nrm;
      s.p.b(i) /= nrm;
    }
  }
  s.beta_b = std::max(1.0, s.p.b.norm());
  s.beta_c = std::max(1.0, s.p.c.frobenius());
  s.p.b /= s.beta_b;
  for (auto& e : s.p.c.entries) e.v /= s.beta_c;
  return s;
}

// Inverse of each block of a strictly positive block matrix.
bool invert(const std::vector<BlockSpec>& blocks, const BlockMatrix& s,
            BlockMatrix& out) {
  out.resize(blocks.size());
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].kind == BlockKind::Diagonal) {
      if ((s[b].array() <= 0).any()) return false;
      out[b] = s[b].cwiseInverse();
    } else {
      Eigen::LLT<Matrix> llt(s[b]);
      if (llt.info() != Eigen::Success) return false;
      Matrix inv = llt.solve(Matrix::Identity(s[b].rows(), s[b].cols()));
      out[b] = 0.5 * (inv + inv.transpose());
    }
  }
  return true;
}

// Largest step a with base + a*dir in the cone, capped at 1/frac.
double max_step(const std::vector<BlockSpec>& blocks, const BlockMatrix& base,
                const BlockMatrix& dir) {
  double alpha = std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].kind == BlockKind::Diagonal) {
      for (Eigen::Index i = 0; i < base[b].rows(); ++i)
        if (dir[b](i, 0) < 0) alpha = std::min(alpha, -base[b](i, 0) / dir[b](i, 0));
    } else {
      Eigen::LLT<Matrix> llt(base[b]);
      if (llt.info() != Eigen::Success) return 0.0;
      Matrix t = llt.matrixL().solve(dir[b]);
      t = llt.matrixL().solve(Matrix(t.transpose()));
      const double lmin = sym_eig(Matrix(0.5 * (t + t.transpose()))).values(0);
      if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
    }
  }
  return alpha;
}

// sym(P * Q * R) for block matrices; diagonal blocks multiply elementwise.
BlockMatrix sym_prod3(const std::vector<BlockSpec>& blocks, const BlockMatrix& p,
                      const BlockMatrix& q, const BlockMatrix& r) {
  BlockMatrix out(blocks.size());
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].kind == BlockKind::Diagonal) {
      out[b] = p[b].cwiseProduct(q[b]).cwiseProduct(r[b]);
    } else {
      Matrix t = p[b] * q[b] * r[b];
      out[b] = 0.5 * (t + t.transpose());
    }
  }
  return out;
}

void add_scaled(BlockMatrix& a, double s, const BlockMatrix& b) {
  for (size_t k = 0; k < a.size(); ++k) a[k] += s * b[k];
}

double frob(const BlockMatrix& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

Vector apply_a(const SdpProblem& p, const BlockMatrix& x) {
  Vector v(p.num_constraints());
  for (int i = 0; i < p.num_constraints(); ++i) v(i) = inner(p.a[i], x, p.blocks);
  return v;
}

BlockMatrix apply_at(const SdpProblem& p, const Vector& y) {
  BlockMatrix m = zero_blocks(p.blocks);
  for (int i = 0; i < p.num_constraints(); ++i) axpy(y(i), p.a[i], m, p.blocks);
  return m;
}

struct Iterate {
  BlockMatrix X;
  Vector y;
  BlockMatrix S;
};

SdpSolution unscale(const SdpProblem& orig, const DedupeResult& dd,
                    const Scaled& sc, const Iterate& it, SdpStatus status,
                    int iters) {
  SdpSolution sol;
  sol.status = status;
  sol.iterations = iters;
  sol.X = it.X;
  for (auto& b : sol.X) b *= sc.beta_b;
  sol.S = it.S;
  for (auto& b : sol.S) b *= sc.beta_c;
  sol.y = Vector::Zero(orig.num_constraints());
  for (size_t q = 0; q < dd.kept.size(); ++q)
    sol.y(dd.kept[q]) = sc.beta_c * it.y(q) / sc.row_norm(q);
  return sol;
}

void finish(const SdpProblem& orig, SdpSolution& sol) {
  sol.primal_obj = inner(orig.c, sol.X, orig.blocks);
  sol.dual_obj = orig.b.dot(sol.y);
  sol.residuals = verify(orig, sol);
}

}  // namespace

SdpSolution solve(const SdpProblem& orig, const SdpOptions& opts) {
  orig.validate();
  const auto& blocks = orig.blocks;
  DedupeResult dd = dedupe(orig);
  if (!dd.consistent) {
    SdpSolution sol;
    sol.status = SdpStatus::PrimalInfeasible;
    sol.X = zero_blocks(blocks);
    sol.S = zero_blocks(blocks);
    sol.y = dd.ray;
    sol.S = apply_at(orig, sol.y);
    finish(orig, sol);
    return sol;
  }
  const Scaled sc = scale_problem(dd.problem);
  const SdpProblem& p = sc.p;
  const int m = p.num_constraints();
  const double ntot = p.total_dim();

  Iterate it;
  it.X = zero_blocks(blocks);
  it.S = zero_blocks(blocks);
  it.y = Vector::Zero(m);
  for (size_t b = 0; b < blocks.size(); ++b) {
    const double n = blocks[b].size;
    double amax = 0.0;
    double xi = std::max(10.0, std::sqrt(n));
    for (int i = 0; i < m; ++i) {
      double nb = 0.0;
      for (const auto& e : p.a[i].entries)
        if (e.block == static_cast<int>(b))
          nb += (e.i == e.j ? 1.0 : 2.0) * e.v * e.v;
      nb = std::sqrt(nb);
      amax = std::max(amax, nb);
      xi = std::max(xi, n * (1.0 + std::abs(p.b(i))) / (1.0 + nb));
    }
    double cb = 0.0;
    for (const auto& e : p.c.entries)
      if (e.block == static_cast<int>(b)) cb += (e.i == e.j ? 1.0 : 2.0) * e.v * e.v;
    const double eta = std::max({10.0, std::sqrt(n), amax, std::sqrt(cb)});
    if (blocks[b].kind == BlockKind::Diagonal) {
      it.X[b].setConstant(xi);
      it.S[b].setConstant(eta);
    } else {
      it.X[b] = xi * Matrix::Identity(blocks[b].size, blocks[b].size);
      it.S[b] = eta * Matrix::Identity(blocks[b].size, blocks[b].size);
    }
  }

  const SchurPlan plan(p);
  BlockMatrix cmat = zero_blocks(blocks);
  axpy(1.0, p.c, cmat, blocks);

  SdpStatus status = SdpStatus::Stalled;
  int iter = 0;
  int tiny_steps = 0;
  Iterate best = it;
  double best_merit = std::numeric_limits<double>::infinity();

  auto merit_of = [&](const SdpSolution& s) {
    return std::max({s.residuals.primal, s.residuals.dual, s.residuals.gap});
  };

  for (;; ++iter) {
    SdpSolution cur = unscale(orig, dd, sc, it, SdpStatus::Stalled, iter);
    finish(orig, cur);
    const double merit = merit_of(cur);
    if (merit < best_merit) {
      best_merit = merit;
      best = it;
    }
    if (cur.residuals.primal <= opts.tol_p && cur.residuals.dual <= opts.tol_d &&
        cur.residuals.gap <= opts.tol_g) {
      status = SdpStatus::Optimal;
      best = it;
      break;
    }

    const Vector ax = apply_a(p, it.X);
    BlockMatrix rd = cmat;
    add_scaled(rd, 1.0, it.S);
    add_scaled(rd, -1.0, apply_at(p, it.y));

    // Infeasibility rays, tested in the scaled space.
    const double by = p.b.dot(it.y);
    if (by < 0) {
      BlockMatrix aty = apply_at(p, it.y);
      BlockMatrix diff = aty;
      add_scaled(diff, -1.0, it.S);
      if (frob(diff) / -by <= opts.tol_inf) {
        double lmin = 0.0;
        for (size_t b = 0; b < blocks.size(); ++b)
          lmin = std::min(lmin, block_lambda_min(aty[b], blocks[b].kind) / -by);
        if (lmin >= -opts.tol_inf * (1.0 + frob(aty) / -by)) {
          SdpSolution sol = unscale(orig, dd, sc, it, SdpStatus::PrimalInfeasible,
                                    iter);
          const double oby = orig.b.dot(sol.y);
          sol.y /= -oby;
          sol.S = apply_at(orig, sol.y);
          finish(orig, sol);
          return sol;
        }
      }
    }
    const double cx = inner(p.c, it.X, blocks);
    if (cx > 0 && ax.norm() / cx <= opts.tol_inf) {
      SdpSolution sol = unscale(orig, dd, sc, it, SdpStatus::DualInfeasible, iter);
      const double ocx = inner(orig.c, sol.X, blocks);
      for (auto& b : sol.X) b /= ocx;
      finish(orig, sol);
      return sol;
    }

    if (iter >= opts.max_iter) break;

    BlockMatrix sinv;
    if (!invert(blocks, it.S, sinv)) break;
    const double mu = inner(it.X, it.S) / ntot;

    Matrix M = schur_hkm(p, plan, it.X, sinv, opts.parallel);
    // Symmetric diagonal equilibration before factoring.
    Vector dscale = M.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    M = dscale.asDiagonal() * M * dscale.asDiagonal();
    Eigen::LLT<Matrix> chol(M);
    for (double reg = 1e-14; chol.info() != Eigen::Success && reg <= 1e-6; reg *= 100.0) {
      Matrix mr = M;
      mr.diagonal().array() += reg;
      chol.compute(mr);
    }
    if (chol.info() != Eigen::Success) break;
    auto schur_solve = [&](const Vector& r) -> Vector {
      return dscale.asDiagonal() * chol.solve(dscale.asDiagonal() * r);
    };

    const BlockMatrix xrs = sym_prod3(blocks, it.X, rd, sinv);
    const Vector a_xrs = apply_a(p, xrs);
    const Vector a_sinv = apply_a(p, sinv);

    auto direction = [&](double sigma, const BlockMatrix* corr, BlockMatrix& dx,
                         Vector& dy, BlockMatrix& ds) {
      Vector rhs = -p.b + a_xrs + sigma * mu * a_sinv;
      if (corr) rhs -= apply_a(p, *corr);
      dy = m > 0 ? schur_solve(rhs) : Vector(0);
      ds = apply_at(p, dy);
      add_scaled(ds, -1.0, rd);
      dx = sym_prod3(blocks, it.X, ds, sinv);
      for (auto& b : dx) b = -b;
      add_scaled(dx, sigma * mu, sinv);
      add_scaled(dx, -1.0, it.X);
      if (corr) add_scaled(dx, -1.0, *corr);
    };

    BlockMatrix dxa;
    BlockMatrix dsa;
    Vector dya;
    direction(0.0, nullptr, dxa, dya, dsa);
    const double ap_a = std::min(1.0, opts.step_frac * max_step(blocks, it.X, dxa));
    const double ad_a = std::min(1.0, opts.step_frac * max_step(blocks, it.S, dsa));
    BlockMatrix xn = it.X;
    add_scaled(xn, ap_a, dxa);
    BlockMatrix sn = it.S;
    add_scaled(sn, ad_a, dsa);
    const double ratio = std::max(0.0, inner(xn, sn) / (mu * ntot));
    const double expon = std::max(1.0, 3.0 * std::min(ap_a, ad_a) * std::min(ap_a, ad_a));
    const double sigma = std::min(1.0, std::pow(ratio, expon));

    const BlockMatrix corr = sym_prod3(blocks, dxa, dsa, sinv);
    BlockMatrix dx;
    BlockMatrix ds;
    Vector dy;
    direction(sigma, &corr, dx, dy, ds);
    const double ap = std::min(1.0, opts.step_frac * max_step(blocks, it.X, dx));
    const double ad = std::min(1.0, opts.step_frac * max_step(blocks, it.S, ds));
    if (!std::isfinite(ap) || !std::isfinite(ad)) break;
    add_scaled(it.X, ap, dx);
    add_scaled(it.S, ad, ds);
    it.y += ad * dy;
    for (size_t b = 0; b < blocks.size(); ++b) {
      if (blocks[b].kind == BlockKind::Psd) {
        it.X[b] = 0.5 * (it.X[b] + it.X[b].transpose()).eval();
        it.S[b] = 0.5 * (it.S[b] + it.S[b].transpose()).eval();
      }
    }
    tiny_steps = (ap < 1e-9 && ad < 1e-9) ? tiny_steps + 1 : 0;
    if (tiny_steps >= 3) break;
  }

  SdpSolution sol = unscale(orig, dd, sc, status == SdpStatus::Optimal ? it : best,
                            status, iter);
  finish(orig, sol);
  return sol;
}

}  // namespace spectainer
