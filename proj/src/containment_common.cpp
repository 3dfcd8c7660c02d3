#include "containment_internal.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace spectainer {

const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Contained: return "Contained";
    case VerdictStatus::ContainedInClosure: return "ContainedInClosure";
    case VerdictStatus::NotContained: return "NotContained";
    case VerdictStatus::Unknown: return "Unknown";
  }
  return "?";
}

namespace detail {

namespace {

LogLevel configured_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("SPECTAINER_LOG");
    if (!env) return LogLevel::Error;
    const std::string s(env);
    if (s == "debug") return LogLevel::Debug;
    if (s == "info") return LogLevel::Info;
    return LogLevel::Error;
  }();
  return level;
}

std::mutex log_mutex;

}  // namespace

bool log_enabled(LogLevel level) { return level <= configured_level(); }

void log(LogLevel level, const std::string& msg) {
  if (!log_enabled(level)) return;
  static const char* names[] = {"error", "info", "debug"};
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

LinearMin minimize_linear(const LinearPencil& a, const Vector& c, double c0,
                          const SdpOptions& opts, double box) {
  const int n = a.d() + a.m();
  LmiProblem lmi(n);
  lmi.c.head(a.d()) = -c;
  add_pencil_block(lmi, a);
  lmi.add_box(box);
  const LmiResult r = solve_lmi(lmi, opts);
  LinearMin out;
  out.status = r.status;
  if (r.status == LmiStatus::Optimal) {
    out.x = r.w.head(a.d());
    out.y = r.w.segment(a.d(), a.m());
    out.value = c0 + c.dot(out.x);
  }
  return out;
}

double coefficient_scale(const LinearPencil& b) { return b.coefficient_scale(); }

std::optional<Verdict> empty_inner_verdict(const LinearPencil& a, const std::string& method,
                                           const SdpOptions& opts) {
  const MarginResult r = feasibility_margin(a, opts);
  Verdict v;
  v.method = method;
  if (r.status != LmiStatus::Optimal) {
    v.status = VerdictStatus::Unknown;
    v.note = "could not decide whether the inner set is empty";
    return v;
  }
  if (r.margin < -kFeasTol) {
    v.status = VerdictStatus::Contained;
    v.note = "inner set is empty";
    return v;
  }
  return std::nullopt;
}

double pairing(const LinearPencil& b, const Vector& x, const Matrix& z) {
  return (evaluate(b, x).mat().cwiseProduct(z)).sum();
}

double solitary_residual(const LinearPencil& a, const LinearPencil& b, double mu,
                         const Matrix& c0, const Matrix& c) {
  const int k = a.k();
  const int l = b.k();
  auto combine = [&](const SymMat& m) {
    Matrix out = Matrix::Zero(l, l);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (m(i, j) != 0.0) out += m(i, j) * c.block(i * l, j * l, l, l);
    return out;
  };
  double r = (b.a0().mat() - mu * Matrix::Identity(l, l) - c0 - combine(a.a0()))
                 .cwiseAbs()
                 .maxCoeff();
  for (int p = 0; p < a.d(); ++p)
    r = std::max(r, (b.ax()[p].mat() - combine(a.ax()[p])).cwiseAbs().maxCoeff());
  for (int q = 0; q < a.m(); ++q) r = std::max(r, combine(a.ay()[q]).cwiseAbs().maxCoeff());
  return r;
}

double lp_residual(const HPolyhedronProj& inner, const HPolyhedronProj& outer, const Vector& c0,
                   const Matrix& c) {
  double r = (outer.a - c0 - c * inner.a).cwiseAbs().maxCoeff();
  if (outer.d() > 0) r = std::max(r, (outer.A - c * inner.A).cwiseAbs().maxCoeff());
  if (inner.m() > 0) r = std::max(r, (c * inner.Aprime).cwiseAbs().maxCoeff());
  return r;
}

}  // namespace detail

MembershipResult membership(const LinearPencil& a, const Vector& x, double tol,
                            const SdpOptions& opts) {
  if (x.size() != a.d()) throw ContractViolation("membership: point has wrong dimension");
  MembershipResult out;
  if (a.m() == 0) {
    out.margin = lambda_min(evaluate(a, x));
    out.member = out.margin >= -tol;
    return out;
  }
  const int n = a.m() + 1;
  LmiProblem lmi(n);
  lmi.c(n - 1) = 1.0;
  const LinearPencil ya(evaluate(a, x), {}, a.ay());
  add_pencil_block(lmi, ya);
  lmi.blocks.back().f[n - 1] = -Matrix::Identity(a.k(), a.k());
  Vector g = Vector::Zero(n);
  g(n - 1) = -1.0;
  lmi.add_linear(1.0, g);
  const LmiResult r = solve_lmi(lmi, opts);
  if (r.status != LmiStatus::Optimal) return out;
  out.margin = r.value;
  out.y = r.w.head(a.m());
  out.member = out.margin >= -tol;
  return out;
}

namespace {

bool valid_witness(const LinearPencil& a, const LinearPencil& b, const Witness& w) {
  const MembershipResult inner = membership(a, w.x);
  if (!inner.member || !*inner.member) return false;
  if (w.Z) {
    const Matrix& z = w.Z->mat();
    if (lambda_min(*w.Z) < -1e-9 || std::abs(z.trace() - 1.0) > 1e-7) return false;
    for (const auto& bq : b.ay())
      if (std::abs(bq.mat().cwiseProduct(z).sum()) > 1e-7) return false;
    return detail::pairing(b, w.x, z) <= -detail::kViolationTol;
  }
  if (w.z) {
    const HPolyhedronProj hb = normal_form_to_polyhedron(b);
    const Vector& z = *w.z;
    if (z.minCoeff() < -1e-9 || std::abs(z.sum() - 1.0) > 1e-7) return false;
    if (hb.m() > 0 && (hb.Aprime.transpose() * z).cwiseAbs().maxCoeff() > 1e-7) return false;
    return z.dot(hb.a + hb.A * w.x) <= -detail::kViolationTol;
  }
  if (b.m() == 0) return lambda_min(evaluate(b, w.x)) <= -detail::kViolationTol;
  const MembershipResult outer = membership(b, w.x);
  return outer.member && !*outer.member;
}

bool valid_certificate(const LinearPencil& a, const LinearPencil& b, const Verdict& v,
                       double tol) {
  return std::visit(
      [&](const auto& ev) -> bool {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          const auto e = is_empty(a);
          return e && *e;
        } else if constexpr (std::is_same_v<T, LpCertificate>) {
          const HPolyhedronProj ha = normal_form_to_polyhedron(a);
          const HPolyhedronProj hb = normal_form_to_polyhedron(b);
          if (ev.C.minCoeff() < -tol || (ev.c0.size() > 0 && ev.c0.minCoeff() < -tol)) return false;
          const double scale = std::max(hb.a.cwiseAbs().maxCoeff(),
                                        hb.d() > 0 ? hb.A.cwiseAbs().maxCoeff() : 0.0);
          return detail::lp_residual(ha, hb, ev.c0, ev.C) <= tol * (1.0 + scale);
        } else if constexpr (std::is_same_v<T, SolitaryCertificate>) {
          if (ev.mu < -kFeasTol) return false;
          const double scale = b.coefficient_scale();
          const double gscale = 1.0 + ev.C.norm() + ev.C0.norm();
          if (lambda_min(SymMat(ev.C)) < -kPsdTol * gscale) return false;
          if (lambda_min(SymMat(ev.C0)) < -kPsdTol * gscale) return false;
          return detail::solitary_residual(a, b, ev.mu, ev.C0, ev.C) <= tol * (1.0 + scale);
        } else if constexpr (std::is_same_v<T, SosEvidence>) {
          if (!ev.program || ev.certificate.mu < -kFeasTol) return false;
          return verify_certificate(*ev.program, ev.certificate, tol).valid;
        } else if constexpr (std::is_same_v<T, WholeSpaceCertificate>) {
          if (b.m() == 0 || ev.coefficients.size() != b.m()) return false;
          Matrix s = Matrix::Zero(b.k(), b.k());
          for (int q = 0; q < b.m(); ++q) s += ev.coefficients(q) * b.ay()[q].mat();
          return lambda_min(SymMat(s)) > kPsdTol;
        } else {
          return false;
        }
      },
      v.evidence);
}

}  // namespace

bool validate_verdict(const LinearPencil& a, const LinearPencil& b, const Verdict& v,
                      double tol) {
  switch (v.status) {
    case VerdictStatus::Contained:
    case VerdictStatus::ContainedInClosure:
      return valid_certificate(a, b, v, tol);
    case VerdictStatus::NotContained: {
      const auto* w = std::get_if<Witness>(&v.evidence);
      return w && valid_witness(a, b, *w);
    }
    case VerdictStatus::Unknown:
      return true;
  }
  return false;
}

}  // namespace spectainer
