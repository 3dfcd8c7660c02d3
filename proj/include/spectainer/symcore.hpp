// Dense symmetric-matrix linear algebra shared by every other module.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace spectainer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when a caller breaks an operation's documented preconditions.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative numerical kernel fails to converge.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Default relative tolerance for positive semidefiniteness tests.
inline constexpr double kPsdTol = 1e-8;

/// Relative asymmetry above which SymMat construction rejects its input.
inline constexpr double kAsymmetryTol = 1e-9;

/// A real symmetric n×n matrix, n ≥ 1. Entries are symmetrized on
/// construction via (M + Mᵀ)/2, so (i,j) and (j,i) agree bit-for-bit.
class SymMat {
 public:
  SymMat() : m_(Matrix::Zero(1, 1)) {}
  explicit SymMat(const Matrix& m);

  static SymMat zero(int n);
  static SymMat identity(int n);
  /// E_ij + E_ji for i≠j, E_ii otherwise.
  static SymMat unit(int n, int i, int j);
  static SymMat diagonal(const Vector& d);

  int n() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Matrix& mat() const { return m_; }

  double frobenius() const { return m_.norm(); }
  /// Frobenius inner product ⟨this, other⟩.
  double dot(const SymMat& other) const;
  bool is_diagonal(double tol = 0.0) const;

  SymMat operator+(const SymMat& o) const;
  SymMat operator-(const SymMat& o) const;
  SymMat operator*(double s) const;
  SymMat& operator+=(const SymMat& o);
  /// Congruence Vᵀ M V (V may be rectangular; result has V.cols() rows).
  SymMat congruence(const Matrix& v) const;

 private:
  struct Trusted {};
  SymMat(Matrix m, Trusted) : m_(std::move(m)) {}
  Matrix m_;
};

struct Eigendecomposition {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns matching values
};

/// Cyclic Jacobi for n ≤ 64, tridiagonal QL above.
Eigendecomposition sym_eig(const SymMat& m);
Eigendecomposition sym_eig(const Matrix& symmetric);
/// Same as sym_eig but always uses the Jacobi kernel (exposed for tests).
Eigendecomposition jacobi_eig(const Matrix& symmetric);

double lambda_min(const SymMat& m);

/// λ_min(M) ≥ −tol·(1 + ‖M‖_F).
bool is_psd(const SymMat& m, double tol = kPsdTol);

/// The l×l matrix of blockwise inner products ⟨M_ij, N⟩ where M_ij is the
/// (i,j) k×k block of M ∈ S^{kl} and N ∈ S^k.
SymMat lth_scalar_product(const SymMat& m, const SymMat& n, int l);

SymMat kron(const SymMat& a, const SymMat& b);

/// Orthonormal basis (as columns) of ker(M): right singular vectors whose
/// singular value is below tol·σ_max. Empty (cols()==0) when M is injective.
Matrix nullspace_basis(const Matrix& m, double tol);

}  // namespace spectainer
