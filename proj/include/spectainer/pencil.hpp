// Linear pencils A(x,y) = A_0 + sum_p x_p A_p + sum_q y_q A'_q, projected
// polyhedra, the named instances and the basic set predicates.
#pragma once

#include "spectainer/lmi.hpp"
#include "spectainer/symcore.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spectainer {

class LinearPencil {
 public:
  LinearPencil(SymMat a0, std::vector<SymMat> ax, std::vector<SymMat> ay = {});

  int k() const { return a0_.n(); }
  int d() const { return static_cast<int>(ax_.size()); }
  int m() const { return static_cast<int>(ay_.size()); }
  const SymMat& a0() const { return a0_; }
  const std::vector<SymMat>& ax() const { return ax_; }
  const std::vector<SymMat>& ay() const { return ay_; }
  /// Largest absolute coefficient over all matrices.
  double coefficient_scale() const;
  bool is_diagonal() const;

 private:
  SymMat a0_;
  std::vector<SymMat> ax_;
  std::vector<SymMat> ay_;
};

/// { x | exists y : a + A x + A' y >= 0 }.
struct HPolyhedronProj {
  Vector a;
  Matrix A;
  Matrix Aprime;

  HPolyhedronProj(Vector a, Matrix A, Matrix Aprime);
  HPolyhedronProj(Vector a, Matrix A);
  int rows() const { return static_cast<int>(a.size()); }
  int d() const { return static_cast<int>(A.cols()); }
  int m() const { return static_cast<int>(Aprime.cols()); }
};

SymMat evaluate(const LinearPencil& p, const Vector& x, const Vector& y);
SymMat evaluate(const LinearPencil& p, const Vector& x);

LinearPencil polyhedron_to_normal_form(const HPolyhedronProj& h);
/// Inverse of the normal form for diagonal pencils.
HPolyhedronProj normal_form_to_polyhedron(const LinearPencil& p);

LinearPencil ball_pencil(int d, double r);

/// Treats the projection variables as ordinary ones (no projection).
LinearPencil lift(const LinearPencil& p);

/// Congruence V' A(x,y) V of every coefficient.
LinearPencil congruence(const LinearPencil& p, const Matrix& v);

/// Named instances. Polyhedral ones are returned in normal form.
LinearPencil instance(const std::string& name);
std::optional<HPolyhedronProj> polyhedron_instance(const std::string& name);
std::vector<std::string> instance_names();

/// Adds A(x,y) in K to an LMI whose first d variables are x and next m are
/// y (offset shifts both). A diagonal pencil becomes an LP block.
void add_pencil_block(LmiProblem& lmi, const LinearPencil& p, int offset = 0,
                      const std::optional<Vector>& fixed_x = std::nullopt);

inline constexpr double kFeasTol = 1e-7;

/// max t s.t. A(x,y) - t I psd, t <= 1, over (x, y).
struct MarginResult {
  LmiStatus status = LmiStatus::Unknown;
  double margin = 0.0;
  Vector x;
  Vector y;
};
MarginResult feasibility_margin(const LinearPencil& p, const SdpOptions& opts = {});

/// nullopt means the solver could not decide.
std::optional<bool> is_empty(const LinearPencil& p, double tol = kFeasTol);
std::optional<bool> is_strictly_feasible(const LinearPencil& p,
                                         double tol = kFeasTol);

enum class CqStatus { WholeSpace, CQHolds, CQFails, Unknown };
const char* to_string(CqStatus s);

struct CqResult {
  CqStatus status = CqStatus::Unknown;
  /// WholeSpace: a positive definite element of span{A'_q}.
  /// CQFails: a nonzero psd element of span{A'_q} with trace 1.
  std::optional<SymMat> direction;
  Vector coefficients;
};
CqResult outer_projection_cq(const LinearPencil& p, double tol = kFeasTol);

/// Advisory only: false when some coordinate direction of x is unbounded
/// on the recession cone of S_A (checked inside a large box).
bool projection_looks_bounded(const LinearPencil& p);

}  // namespace spectainer
