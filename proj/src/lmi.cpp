#include "spectainer/lmi.hpp"

#include <cmath>

namespace spectainer {

LmiBlock& LmiProblem::add_block(BlockKind kind, const Matrix& f0) {
  LmiBlock b;
  b.kind = kind;
  b.f0 = f0;
  b.f.assign(nvars, Matrix());
  blocks.push_back(std::move(b));
  return blocks.back();
}

void LmiProblem::add_box(double bound) {
  Matrix f0 = Matrix::Constant(2 * nvars, 1, bound);
  LmiBlock& b = add_block(BlockKind::Diagonal, f0.asDiagonal());
  for (int i = 0; i < nvars; ++i) {
    Matrix fi = Matrix::Zero(2 * nvars, 2 * nvars);
    fi(2 * i, 2 * i) = 1.0;
    fi(2 * i + 1, 2 * i + 1) = -1.0;
    b.f[i] = fi;
  }
}

void LmiProblem::add_linear(double g0, const Vector& g) {
  LmiBlock& b = add_block(BlockKind::Diagonal, Matrix::Constant(1, 1, g0));
  for (int i = 0; i < nvars; ++i)
    if (g(i) != 0.0) b.f[i] = Matrix::Constant(1, 1, g(i));
}

const char* to_string(LmiStatus s) {
  switch (s) {
    case LmiStatus::Optimal: return "Optimal";
    case LmiStatus::Infeasible: return "Infeasible";
    case LmiStatus::Unbounded: return "Unbounded";
    case LmiStatus::Unknown: return "Unknown";
  }
  return "?";
}

namespace {

void add_matrix(SparseSym& s, int block, BlockKind kind, const Matrix& m,
                double scale) {
  if (m.size() == 0) return;
  const int n = static_cast<int>(m.rows());
  for (int j = 0; j < n; ++j) {
    if (kind == BlockKind::Diagonal) {
      if (m(j, j) != 0.0) s.add(block, j, j, scale * m(j, j));
      continue;
    }
    for (int i = 0; i <= j; ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      if (v != 0.0) s.add(block, i, j, scale * v);
    }
  }
}

}  // namespace

// S = sum_i y_i A_i - C with y = w, A_i = F_i, C = -F_0, b = -c.
SdpProblem to_sdp(const LmiProblem& lmi) {
  SdpProblem p;
  for (const auto& b : lmi.blocks) p.blocks.push_back({static_cast<int>(b.f0.rows()), b.kind});
  p.a.resize(lmi.nvars);
  p.b = -lmi.c;
  for (size_t k = 0; k < lmi.blocks.size(); ++k) {
    const auto& blk = lmi.blocks[k];
    add_matrix(p.c, static_cast<int>(k), blk.kind, blk.f0, -1.0);
    for (int i = 0; i < lmi.nvars; ++i)
      add_matrix(p.a[i], static_cast<int>(k), blk.kind, blk.f[i], 1.0);
  }
  p.c.canonicalize();
  for (auto& a : p.a) a.canonicalize();
  return p;
}

LmiResult solve_lmi(const LmiProblem& lmi, const SdpOptions& opts) {
  LmiResult r;
  r.raw = solve(to_sdp(lmi), opts);
  switch (r.raw.status) {
    case SdpStatus::Optimal: r.status = LmiStatus::Optimal; break;
    case SdpStatus::PrimalInfeasible: r.status = LmiStatus::Unbounded; break;
    case SdpStatus::DualInfeasible: r.status = LmiStatus::Infeasible; break;
    case SdpStatus::Stalled: r.status = LmiStatus::Unknown; break;
  }
  r.w = r.raw.y;
  r.value = -r.raw.dual_obj;
  return r;
}

}  // namespace spectainer
