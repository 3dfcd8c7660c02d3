#include "spectainer/symcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spectainer {

SymMat::SymMat(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ContractViolation("SymMat: expected a non-empty square matrix, got " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
  const double asym = (m - m.transpose()).norm();
  if (asym > kAsymmetryTol * m.norm()) {
    throw ContractViolation("SymMat: input is not symmetric (asymmetry " +
                            std::to_string(asym) + ")");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMat SymMat::zero(int n) { return SymMat(Matrix::Zero(n, n), Trusted{}); }

SymMat SymMat::identity(int n) {
  return SymMat(Matrix::Identity(n, n), Trusted{});
}

SymMat SymMat::unit(int n, int i, int j) {
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  m(j, i) = 1.0;
  return SymMat(std::move(m), Trusted{});
}

SymMat SymMat::diagonal(const Vector& d) {
  return SymMat(Matrix(d.asDiagonal()), Trusted{});
}

double SymMat::dot(const SymMat& other) const {
  return m_.cwiseProduct(other.m_).sum();
}

bool SymMat::is_diagonal(double tol) const {
  for (int j = 0; j < n(); ++j)
    for (int i = 0; i < n(); ++i)
      if (i != j && std::abs(m_(i, j)) > tol) return false;
  return true;
}

SymMat SymMat::operator+(const SymMat& o) const {
  return SymMat(m_ + o.m_, Trusted{});
}
SymMat SymMat::operator-(const SymMat& o) const {
  return SymMat(m_ - o.m_, Trusted{});
}
SymMat SymMat::operator*(double s) const { return SymMat(m_ * s, Trusted{}); }
SymMat& SymMat::operator+=(const SymMat& o) {
  m_ += o.m_;
  return *this;
}

SymMat SymMat::congruence(const Matrix& v) const {
  Matrix r = v.transpose() * m_ * v;
  return SymMat(0.5 * (r + r.transpose()), Trusted{});
}

namespace {

constexpr int kJacobiMaxDim = 64;
constexpr int kJacobiMaxSweeps = 100;

Eigendecomposition sorted(Vector values, Matrix vectors) {
  const auto n = values.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return values(a) < values(b); });
  Eigendecomposition out{Vector(n), Matrix(vectors.rows(), n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = values(order[i]);
    out.vectors.col(i) = vectors.col(order[i]);
  }
  return out;
}

}  // namespace

Eigendecomposition jacobi_eig(const Matrix& symmetric) {
  const int n = static_cast<int>(symmetric.rows());
  Matrix a = symmetric;
  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);
  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < j; ++i) off += a(i, j) * a(i, j);
    if (std::sqrt(2.0 * off) <= 1e-15 * scale) {
      return sorted(a.diagonal(), v);
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  throw NumericalFailure("jacobi_eig: no convergence after " +
                         std::to_string(kJacobiMaxSweeps) + " sweeps");
}

Eigendecomposition sym_eig(const Matrix& symmetric) {
  if (symmetric.rows() <= kJacobiMaxDim) return jacobi_eig(symmetric);
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("sym_eig: tridiagonal QL did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigendecomposition sym_eig(const SymMat& m) { return sym_eig(m.mat()); }

double lambda_min(const SymMat& m) { return sym_eig(m).values(0); }

bool is_psd(const SymMat& m, double tol) {
  if (tol < 0) throw ContractViolation("is_psd: tol must be nonnegative");
  return lambda_min(m) >= -tol * (1.0 + m.frobenius());
}

SymMat lth_scalar_product(const SymMat& m, const SymMat& n, int l) {
  const int k = n.n();
  if (l < 1 || m.n() != k * l) {
    throw ContractViolation("lth_scalar_product: M has size " +
                            std::to_string(m.n()) + ", expected k*l = " +
                            std::to_string(k) + "*" + std::to_string(l));
  }
  Matrix out(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      out(i, j) =
          m.mat().block(i * k, j * k, k, k).cwiseProduct(n.mat()).sum();
  return SymMat(out);
}

SymMat kron(const SymMat& a, const SymMat& b) {
  const int na = a.n();
  const int nb = b.n();
  Matrix out(na * nb, na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b.mat();
  return SymMat(out);
}

Matrix nullspace_basis(const Matrix& m, double tol) {
  if (tol <= 0) throw ContractViolation("nullspace_basis: tol must be > 0");
  const auto cols = m.cols();
  if (m.rows() == 0 || cols == 0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * smax && smax > 0) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

}  // namespace spectainer
