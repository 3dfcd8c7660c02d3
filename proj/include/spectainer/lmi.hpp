// Linear matrix inequality problems in the variables w:
//
//   max c'w  s.t.  F_b(w) = F_b0 + sum_i w_i F_bi  in K_b  for every block b
//
// solved as the dual side of a standard-form SdpProblem.
#pragma once

#include "spectainer/sdp.hpp"

namespace spectainer {

struct LmiBlock {
  BlockKind kind = BlockKind::Psd;
  Matrix f0;
  std::vector<Matrix> f;  // one per variable; missing entries treated as 0
};

struct LmiProblem {
  int nvars = 0;
  Vector c;
  std::vector<LmiBlock> blocks;

  explicit LmiProblem(int n) : nvars(n), c(Vector::Zero(n)) {}

  LmiBlock& add_block(BlockKind kind, const Matrix& f0);
  /// Box |w_i| <= bound on all variables, as one diagonal block.
  void add_box(double bound);
  /// Linear inequality g0 + g'w >= 0.
  void add_linear(double g0, const Vector& g);
};

enum class LmiStatus { Optimal, Infeasible, Unbounded, Unknown };

const char* to_string(LmiStatus s);

struct LmiResult {
  LmiStatus status = LmiStatus::Unknown;
  Vector w;
  double value = 0.0;
  SdpSolution raw;  // primal X is the dual certificate of the LMI
};

SdpProblem to_sdp(const LmiProblem& lmi);
LmiResult solve_lmi(const LmiProblem& lmi, const SdpOptions& opts = {});

}  // namespace spectainer
