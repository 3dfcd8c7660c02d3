#include "spectainer/schur.hpp"

#include <array>

namespace spectainer {

SchurPlan::SchurPlan(const SdpProblem& p) {
  ranges.resize(p.a.size());
  for (size_t i = 0; i < p.a.size(); ++i) {
    const auto& e = p.a[i].entries;
    int begin = 0;
    for (int k = 1; k <= static_cast<int>(e.size()); ++k) {
      if (k == static_cast<int>(e.size()) || e[k].block != e[begin].block) {
        ranges[i].push_back({e[begin].block, begin, k});
        begin = k;
      }
    }
  }
}

namespace {

// G = X A_j S^{-1} restricted to one psd block.
void form_g(const std::vector<SparseEntry>& e, int begin, int end,
            const Matrix& x, const Matrix& sinv, Matrix& g) {
  const int n = static_cast<int>(x.rows());
  const int nnz = end - begin;
  g.setZero(n, n);
  if (nnz > n) {
    Matrix a = Matrix::Zero(n, n);
    for (int q = begin; q < end; ++q) {
      a(e[q].i, e[q].j) += e[q].v;
      if (e[q].i != e[q].j) a(e[q].j, e[q].i) += e[q].v;
    }
    g.noalias() = x * a * sinv;
    return;
  }
  for (int q = begin; q < end; ++q) {
    const int a = e[q].i;
    const int b = e[q].j;
    g.noalias() += e[q].v * x.col(a) * sinv.row(b);
    if (a != b) g.noalias() += e[q].v * x.col(b) * sinv.row(a);
  }
}

double trace_with(const std::vector<SparseEntry>& e, int begin, int end,
                  const Matrix& g) {
  double s = 0.0;
  for (int q = begin; q < end; ++q) {
    const int a = e[q].i;
    const int b = e[q].j;
    s += a == b ? e[q].v * g(a, a) : e[q].v * (g(b, a) + g(a, b));
  }
  return s;
}

double block_term(const SdpProblem& p, const SchurPlan& plan, int i, int blk,
                  const Matrix& g, const Vector* wdiag) {
  for (const auto& r : plan.ranges[i]) {
    if (r[0] != blk) continue;
    const auto& e = p.a[i].entries;
    if (wdiag) {
      double s = 0.0;
      for (int q = r[1]; q < r[2]; ++q) s += e[q].v * (*wdiag)(e[q].i);
      return s;
    }
    return trace_with(e, r[1], r[2], g);
  }
  return 0.0;
}

}  // namespace

Matrix schur_hkm(const SdpProblem& p, const SchurPlan& plan,
                 const BlockMatrix& X, const BlockMatrix& Sinv,
                 bool parallel) {
  const int m = p.num_constraints();
  Matrix M = Matrix::Zero(m, m);

  // Which constraints touch each block, so column j only visits i >= j that
  // share a block with it.
  const int nb = static_cast<int>(p.blocks.size());
  std::vector<std::vector<int>> users(nb);
  for (int i = 0; i < m; ++i)
    for (const auto& r : plan.ranges[i]) users[r[0]].push_back(i);

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int j = 0; j < m; ++j) {
    Matrix g;
    Vector w;
    for (const auto& r : plan.ranges[j]) {
      const int blk = r[0];
      const auto& e = p.a[j].entries;
      if (p.blocks[blk].kind == BlockKind::Diagonal) {
        w.setZero(p.blocks[blk].size);
        for (int q = r[1]; q < r[2]; ++q)
          w(e[q].i) = e[q].v * X[blk](e[q].i, 0) * Sinv[blk](e[q].i, 0);
        for (int i : users[blk])
          if (i >= j) M(i, j) += block_term(p, plan, i, blk, g, &w);
      } else {
        form_g(e, r[1], r[2], X[blk], Sinv[blk], g);
        for (int i : users[blk])
          if (i >= j) M(i, j) += block_term(p, plan, i, blk, g, nullptr);
      }
    }
  }
  for (int j = 0; j < m; ++j)
    for (int i = j + 1; i < m; ++i) M(j, i) = M(i, j);
  return M;
}

Matrix schur_hkm_reference(const SdpProblem& p, const BlockMatrix& X,
                           const BlockMatrix& Sinv) {
  const int m = p.num_constraints();
  const int nb = static_cast<int>(p.blocks.size());
  std::vector<std::vector<Matrix>> dense(m, std::vector<Matrix>(nb));
  for (int i = 0; i < m; ++i) {
    for (int b = 0; b < nb; ++b)
      dense[i][b] = Matrix::Zero(p.blocks[b].size, p.blocks[b].size);
    for (const auto& e : p.a[i].entries) {
      dense[i][e.block](e.i, e.j) += e.v;
      if (e.i != e.j) dense[i][e.block](e.j, e.i) += e.v;
    }
  }
  std::vector<Matrix> xd(nb);
  std::vector<Matrix> sd(nb);
  for (int b = 0; b < nb; ++b) {
    if (p.blocks[b].kind == BlockKind::Diagonal) {
      xd[b] = X[b].col(0).asDiagonal();
      sd[b] = Sinv[b].col(0).asDiagonal();
    } else {
      xd[b] = X[b];
      sd[b] = Sinv[b];
    }
  }
  Matrix M = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int b = 0; b < nb; ++b)
        M(i, j) += (dense[i][b] * xd[b] * dense[j][b] * sd[b]).trace();
  return M;
}

}  // namespace spectainer
