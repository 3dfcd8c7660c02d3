// Truncated quadratic modules compiled to standard-form SDPs.
//
// A program asks for
//   T(x) - mu I_l = sum_terms <S_term(x), G_term(x)>_l + sum_ideals lambda(x) h(x)
// with S_term = (I_{kk l} (x) [x]_t)^T Gram (I_{kk l} (x) [x]_t), Gram psd, and
// lambda free. Gram rows are indexed (i * kk + a) * s + u for i < l, a < kk and
// u < s (basis size).
#pragma once

#include "spectainer/poly.hpp"
#include "spectainer/sdp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spectainer {

struct GramTerm {
  std::string label;
  MatrixPolynomial g;
  int basis_degree = 0;
  /// Monomials spanning the multiplier; the full basis of basis_degree
  /// unless reduced modulo linear ideal generators.
  std::vector<Exponent> basis;
};

/// <S_term, h>_l must vanish identically.
struct SideIdentity {
  int term = 0;
  MatrixPolynomial h;
};

struct IdealTerm {
  Polynomial h;
  int multiplier_degree = 0;
};

class SosProgram {
 public:
  SosProgram(MatrixPolynomial target, bool with_mu);

  int nvars() const { return target_.nvars(); }
  int l() const { return target_.n(); }
  bool with_mu() const { return with_mu_; }
  const MatrixPolynomial& target() const { return target_; }
  const std::vector<GramTerm>& terms() const { return terms_; }
  const std::vector<SideIdentity>& side_identities() const { return sides_; }
  const std::vector<IdealTerm>& ideals() const { return ideals_; }

  int add_gram(std::string label, MatrixPolynomial g, int basis_degree);
  void add_side_identity(int term, MatrixPolynomial h);
  void add_ideal(Polynomial h, int multiplier_degree);

  /// Side length of the Gram matrix of a term.
  int gram_size(int term) const;

  /// Drops from every Gram basis the leading monomials of (linear ideal
  /// generator) x (monomial) products. Those directions are absorbed by the
  /// ideal multipliers, so the attainable values are unchanged while the
  /// moment side regains interior points.
  void reduce_modulo_linear_ideals();

 private:
  MatrixPolynomial target_;
  bool with_mu_;
  std::vector<GramTerm> terms_;
  std::vector<SideIdentity> sides_;
  std::vector<IdealTerm> ideals_;
};

struct CompiledSos {
  CompiledSdp sdp;
  /// Target coefficients were multiplied by this before compilation.
  double scale = 1.0;
  struct GramSlot {
    int block;
    int offset;  // position inside a merged diagonal block
    int size;
  };
  std::vector<GramSlot> slots;
  int mu_var = -1;
  /// ideal_vars[k][e] is the first free variable of entry e (packed i <= j)
  /// of ideal k; one variable per monomial of the multiplier basis.
  std::vector<std::vector<int>> ideal_vars;
  int equations = 0;
};

CompiledSos compile(const SosProgram& prog);

struct SosCertificate {
  double mu = 0.0;
  std::vector<Matrix> grams;
  /// lambdas[k][e]: multiplier polynomial for ideal k at packed entry e.
  std::vector<std::vector<Polynomial>> lambdas;
  double residual = 0.0;
  double side_residual = 0.0;
  double min_gram_eigenvalue = 0.0;
};

struct CertificateCheck {
  double residual = 0.0;
  double side_residual = 0.0;
  double min_gram_eigenvalue = 0.0;
  double coefficient_scale = 0.0;
  bool valid = false;
};

inline constexpr double kCertificateTol = 1e-6;

/// Symbolic re-expansion of the identity; uses nothing from the solver
/// beyond the certificate itself.
CertificateCheck verify_certificate(const SosProgram& prog, const SosCertificate& cert,
                                    double tol = kCertificateTol);

class CertificateInvalid : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Throws CertificateInvalid when the re-substituted residual is too large.
SosCertificate extract_certificate(const SosProgram& prog, const CompiledSos& comp,
                                   const SdpSolution& sol);

struct SosResult {
  SdpStatus status = SdpStatus::Stalled;
  /// Optimal: value of mu (or 0 without mu). DualInfeasible with mu: +inf.
  std::optional<double> mu;
  std::optional<SosCertificate> certificate;
  std::string certificate_error;
  /// First-order moments read off the dual block of the first term, when
  /// that term has a basis of degree >= 1.
  std::optional<Vector> moments;
  SdpSolution raw;
  int equations = 0;
  int gram_dim = 0;
};

SosResult solve_sos(const SosProgram& prog, const SdpOptions& opts = {});

/// B(x) - mu I_l = S_0 + <S, A(x,0)>_l with <S, A'_q>_l = 0; variables x.
SosProgram build_projected_module_membership(const LinearPencil& a, const LinearPencil& b,
                                             int t, bool with_mu = true);

/// B(x) - mu I_l = S_0 + <S, A(x,y)>_l with multipliers in (x, y).
SosProgram build_plain_module_membership(const LinearPencil& a, const LinearPencil& b,
                                         int t, bool with_mu = true);

/// Constraint set for a Putinar-style relaxation. Scalar constraints are 1x1.
struct BilinearDomain {
  int nvars = 0;
  std::vector<std::string> names;
  std::vector<MatrixPolynomial> constraints;
  std::vector<std::string> constraint_labels;
  std::vector<Polynomial> ideal;
  Polynomial objective;
};

/// objective - mu = sigma_0 + sum <S_i, G_i> + sum lambda_j h_j, order t.
/// Constraints whose degree exceeds 2t are dropped.
SosProgram build_bilinear_relaxation(const BilinearDomain& dom, int t);

/// Appends N - |v|^2 >= 0 over all variables.
void add_archimedean_ball(BilinearDomain& dom, double n);

/// Variables (x, y, vec W) with Z = V W V^T; constraints A(x,y) psd, W psd
/// and optionally A(x,y) (x) W psd; ideal tr(V W V^T) - 1 and
/// <V^T B'_q V, W>; objective <V^T B(x,0) V, W>.
BilinearDomain spectrahedral_bilinear_domain(const LinearPencil& a, const LinearPencil& b,
                                             const Matrix& v, bool products = true);

/// Variables (x, y, z): a + A x + A' y >= 0, z >= 0, optional products,
/// ideal B'^T z = 0 and 1^T z - 1; objective z^T (b + B x).
BilinearDomain polyhedral_bilinear_domain(const HPolyhedronProj& a, const HPolyhedronProj& b,
                                          bool products = true);

}  // namespace spectainer
