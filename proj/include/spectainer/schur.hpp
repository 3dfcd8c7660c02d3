// Schur complement M_ij = tr(A_i X A_j S^{-1}) of the HKM direction.
#pragma once

#include "spectainer/sdp.hpp"

#include <array>

namespace spectainer {

/// Per-constraint entry ranges grouped by block, built once per solve.
struct SchurPlan {
  // ranges[i] lists (block, begin, end) into a[i].entries.
  std::vector<std::vector<std::array<int, 3>>> ranges;

  explicit SchurPlan(const SdpProblem& p);
};

/// OpenMP kernel: columns are distributed over threads; each entry is
/// produced by exactly one thread with a fixed summation order, so the
/// result does not depend on the thread count.
Matrix schur_hkm(const SdpProblem& p, const SchurPlan& plan,
                 const BlockMatrix& X, const BlockMatrix& Sinv,
                 bool parallel = true);

/// Serial dense reference: forms every A_i explicitly and multiplies.
Matrix schur_hkm_reference(const SdpProblem& p, const BlockMatrix& X,
                           const BlockMatrix& Sinv);

}  // namespace spectainer
