// Block-diagonal standard-form semidefinite programs and the interior-point
// solver.
//
//   primal:  max <C,X>  s.t. <A_i,X> = b_i,  X in K
//   dual:    min b'y    s.t. sum_i y_i A_i - C = S,  S in K
//
// K is a product of dense psd cones and nonnegative orthants ("diagonal"
// blocks). Diagonal blocks store their iterates as n x 1 columns.
#pragma once

#include "spectainer/symcore.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spectainer {

enum class BlockKind { Psd, Diagonal };

struct BlockSpec {
  int size = 1;
  BlockKind kind = BlockKind::Psd;
};

/// One upper-triangle entry (i <= j) of a block-diagonal symmetric matrix.
struct SparseEntry {
  int block = 0;
  int i = 0;
  int j = 0;
  double v = 0.0;
};

/// Block-diagonal symmetric matrix stored as its upper-triangle entries,
/// sorted by (block, i, j) with duplicates merged.
struct SparseSym {
  std::vector<SparseEntry> entries;

  void add(int block, int i, int j, double v);
  void canonicalize();
  double frobenius() const;
  bool operator==(const SparseSym& o) const;
};

using BlockMatrix = std::vector<Matrix>;

struct SdpProblem {
  std::vector<BlockSpec> blocks;
  std::vector<SparseSym> a;
  Vector b;
  SparseSym c;

  int num_constraints() const { return static_cast<int>(a.size()); }
  int total_dim() const;
  /// Throws ContractViolation on entries outside their block, i > j, or
  /// off-diagonal entries in diagonal blocks.
  void validate() const;
  bool operator==(const SdpProblem& o) const;
};

enum class SdpStatus { Optimal, PrimalInfeasible, DualInfeasible, Stalled };

const char* to_string(SdpStatus s);

struct SdpOptions {
  double tol_p = 1e-8;
  double tol_d = 1e-8;
  double tol_g = 1e-8;
  double tol_inf = 1e-8;
  int max_iter = 200;
  double step_frac = 0.98;
  bool parallel = true;
};

struct SdpResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

/// For PrimalInfeasible, y holds a ray with b'y = -1 and sum y_i A_i psd.
/// For DualInfeasible, X holds a ray with <C,X> = 1 and A(X) ~ 0.
struct SdpSolution {
  SdpStatus status = SdpStatus::Stalled;
  BlockMatrix X;
  Vector y;
  BlockMatrix S;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  SdpResiduals residuals;
  int iterations = 0;
};

// Block-matrix helpers (diagonal blocks are n x 1 columns).
BlockMatrix zero_blocks(const std::vector<BlockSpec>& blocks);
double inner(const SparseSym& a, const BlockMatrix& x,
             const std::vector<BlockSpec>& blocks);
double inner(const BlockMatrix& x, const BlockMatrix& y);
/// Adds s * A into the block matrix m.
void axpy(double s, const SparseSym& a, BlockMatrix& m,
          const std::vector<BlockSpec>& blocks);
double block_lambda_min(const Matrix& block, BlockKind kind);

/// Recomputes residuals from scratch using only the problem data and the
/// stored iterates.
SdpResiduals verify(const SdpProblem& p, const SdpSolution& sol);

struct DedupeResult {
  SdpProblem problem;
  std::vector<int> kept;  // indices into the original constraint list
  bool consistent = true;
  // When inconsistent: y with sum y_i A_i = 0 and b'y = -1.
  Vector ray;
};

/// Removes linearly dependent constraints by pivoted Cholesky on the Gram
/// matrix <A_i, A_j>. A dependent row whose b_i disagrees with the
/// combination of kept rows marks the system inconsistent.
DedupeResult dedupe(const SdpProblem& p, double tol = 1e-10);

SdpSolution solve(const SdpProblem& p, const SdpOptions& opts = {});

/// Linear expression over packed cone coordinates and free scalars.
/// Cone coordinate (block, i, j), i <= j, multiplies the matrix entry X_ij.
struct LinExpr {
  std::map<long, double> x;
  std::map<int, double> f;

  void add_x(long coord, double v);
  void add_f(int var, double v);
};

struct CompiledSdp;

/// Collects cone blocks, free scalars and linear equations, then eliminates
/// the free scalars to produce a pure standard-form SdpProblem.
class SdpBuilder {
 public:
  int add_block(int size, BlockKind kind);
  int add_free();
  long coord(int block, int i, int j) const;
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_free() const { return num_free_; }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }

  void add_equation(LinExpr row, double rhs);
  /// Objective to maximize, plus a constant offset.
  void set_objective(LinExpr obj, double constant = 0.0);

  CompiledSdp compile(double drop_tol = 1e-13) const;

 private:
  std::vector<BlockSpec> blocks_;
  std::vector<long> offsets_;
  long next_offset_ = 0;
  int num_free_ = 0;
  std::vector<LinExpr> rows_;
  std::vector<double> rhs_;
  LinExpr objective_;
  double obj_constant_ = 0.0;
};

struct CompiledSdp {
  SdpProblem problem;
  double objective_constant = 0.0;
  bool inconsistent = false;
  bool objective_unbounded = false;

  struct Pivot {
    int var;
    LinExpr row;
    double rhs;
  };
  std::vector<Pivot> pivots;
  int num_free = 0;
  std::vector<long> offsets;

  /// Back-substitutes the free scalars from a primal iterate.
  Vector recover_free(const BlockMatrix& X) const;
  double objective(const BlockMatrix& X) const;
};

}  // namespace spectainer
