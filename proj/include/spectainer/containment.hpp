// Containment verdicts for projected spectrahedra and polyhedra.
#pragma once

#include "spectainer/pencil.hpp"
#include "spectainer/sos.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace spectainer {

enum class VerdictStatus { Contained, ContainedInClosure, NotContained, Unknown };
const char* to_string(VerdictStatus s);

struct Witness {
  Vector x;
  std::optional<Vector> y;
  std::optional<SymMat> Z;
  std::optional<Vector> z;
  double violation = 0.0;
};

/// b = c0 + C a, B = C A, 0 = C A' with C, c0 >= 0.
struct LpCertificate {
  Vector c0;
  Matrix C;
  double residual = 0.0;
};

/// B_0 - mu I = C_0 + sum (A_0)_ij C_ij, B_p = sum (A_p)_ij C_ij,
/// 0 = sum (A'_q)_ij C_ij; C has k x k blocks of size l.
struct SolitaryCertificate {
  double mu = 0.0;
  Matrix C0;
  Matrix C;
  double residual = 0.0;
};

struct SosEvidence {
  int order = 0;
  std::shared_ptr<const SosProgram> program;
  SosCertificate certificate;
};

/// The outer projection is the whole space: sum_q y_q B'_q is positive
/// definite (positive entrywise for polyhedra).
struct WholeSpaceCertificate {
  Vector coefficients;
  double min_eigenvalue = 0.0;
};

using Evidence = std::variant<std::monostate, LpCertificate, SolitaryCertificate, SosEvidence,
                              WholeSpaceCertificate, Witness>;

struct Verdict {
  VerdictStatus status = VerdictStatus::Unknown;
  std::string method;
  int order = -1;
  std::optional<double> mu;
  Evidence evidence;
  std::vector<double> mu_sequence;
  /// For criteria that are linear or semidefinite feasibility systems.
  std::optional<bool> system_feasible;
  std::string note;
  double residual = 0.0;
  double wall_time_ms = 0.0;
};

struct ContainmentOptions {
  double feas_tol = kFeasTol;
  SdpOptions sdp;
  /// Adds N - |v|^2 >= 0 to bilinear relaxations when set.
  std::optional<double> arch_bound;
  std::uint64_t seed = 0;
  /// Orders whose SDP would exceed this many equations are skipped.
  int max_equations = 1500;
  int witness_directions = 8;
  bool stop_at_first = true;
};

struct MembershipResult {
  std::optional<bool> member;
  double margin = 0.0;
  Vector y;
};

/// Decides x in pi(S_A) via max t s.t. A(x,y) - t I psd, t <= 1.
MembershipResult membership(const LinearPencil& a, const Vector& x, double tol = kFeasTol,
                            const SdpOptions& opts = {});

Verdict lp_containment(const HPolyhedronProj& inner, const HPolyhedronProj& outer, bool allow_c0,
                       const ContainmentOptions& opts = {});

Verdict solitary_criterion(const LinearPencil& a, const LinearPencil& b,
                           const ContainmentOptions& opts = {});

enum class HierarchyMode { Projected, Plain };

Verdict hierarchy(const LinearPencil& a, const LinearPencil& b, int t_max,
                  HierarchyMode mode = HierarchyMode::Projected,
                  const ContainmentOptions& opts = {});

/// Congruence T with T' B_i T diagonal for every coefficient, if one exists.
std::optional<Matrix> simultaneous_diagonalizer(const LinearPencil& b, double tol = 1e-9);

Verdict pis_in_h_exact(const LinearPencil& a, const LinearPencil& b,
                       const ContainmentOptions& opts = {});

Verdict bilinear_ph_ph(const HPolyhedronProj& inner, const HPolyhedronProj& outer, int t_max,
                       const ContainmentOptions& opts = {});

Verdict bilinear_ps_ps(const LinearPencil& a, const LinearPencil& b, int t_max,
                       const ContainmentOptions& opts = {});

struct PositiveMapResult {
  /// (C_0 + mu I) (+) C, assembled from a solitary solution.
  std::optional<Matrix> chat;
  bool psd = false;
  std::optional<bool> completely_positive;
  double map_residual = 0.0;
  Verdict solitary;
};

/// Throws ContractViolation when A_1..A_d, A'_1..A'_m are dependent.
PositiveMapResult positive_map_matrix(const LinearPencil& a, const LinearPencil& b,
                                      const ContainmentOptions& opts = {});

struct OracleResult {
  std::optional<Witness> witness;
  int tested = 0;
};

/// Extreme points of pi(S_A) in random directions plus random convex
/// combinations, each tested against the outer set.
OracleResult sampling_oracle(const LinearPencil& a, const LinearPencil& b, int n_samples,
                             std::uint64_t seed, const ContainmentOptions& opts = {});

enum class MarginMethod { Solitary, Hierarchy };

struct RadiusRow {
  double r = 0.0;
  double mu = 0.0;
  double ms = 0.0;
};

struct RadiusResult {
  double radius = 0.0;
  std::vector<RadiusRow> trace;
};

/// Smallest r with pi(S_A) inside the r-ball, located by bisection on the
/// sign of the order-0 margin. jobs > 1 evaluates that many interior
/// points per round in parallel.
RadiusResult circumradius(const LinearPencil& a, int ball_dim, double r_lo, double r_hi,
                          double tol_r, MarginMethod method = MarginMethod::Hierarchy,
                          int jobs = 1, const ContainmentOptions& opts = {});

/// Order-0 margin of pi(S_A) against the r-ball.
double ball_margin(const LinearPencil& a, int ball_dim, double r, MarginMethod method,
                   const ContainmentOptions& opts = {});

Verdict check_auto(const LinearPencil& a, const LinearPencil& b,
                   const ContainmentOptions& opts = {});

/// Re-checks a verdict's evidence from scratch: certificate residuals and
/// psd-ness, or witness membership and violation. Returns false if the
/// evidence does not support the status.
bool validate_verdict(const LinearPencil& a, const LinearPencil& b, const Verdict& v,
                      double tol = kCertificateTol);

}  // namespace spectainer
