// Acceptance suite: one [PASS]/[FAIL] line per criterion, nonzero exit if any
// criterion fails.
#include "spectainer/containment.hpp"
#include "spectainer/sdpa.hpp"
#include "test_util.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace spectainer;
namespace st = spectainer::testing;

namespace {

struct Record {
  LinearPencil a;
  LinearPencil b;
  Verdict v;
};

// Every verdict produced along the way, re-validated at the end.
std::vector<Record> g_records;
std::vector<SdpProblem> g_problems;

Verdict keep(const LinearPencil& a, const LinearPencil& b, Verdict v) {
  g_records.push_back({a, b, v});
  return v;
}

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double margin(const LinearPencil& a, int dim, double r) {
  const LinearPencil b = ball_pencil(dim, r);
  ContainmentOptions o;
  const Verdict v = keep(a, b, hierarchy(a, b, 0, HierarchyMode::Projected, o));
  g_problems.push_back(compile(build_projected_module_membership(a, b, 0)).sdp.problem);
  if (!v.mu) throw NumericalFailure("no margin at r = " + std::to_string(r));
  return *v.mu;
}

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

Outcome c1() {
  Outcome o;
  const LinearPencil a = instance("two-disks");
  const double m1 = margin(a, 2, 1.99);
  const double m2 = margin(a, 2, 2.0);
  const double m3 = margin(a, 2, 2.01);
  o.require(std::abs(m1 + 0.0050) <= 1e-3, "mu(1.99) = " + fmt("%.4e", m1));
  o.require(std::abs(m2) <= 1e-4, "mu(2) = " + fmt("%.4e", m2));
  o.require(std::abs(m3 - 0.0050) <= 1e-3, "mu(2.01) = " + fmt("%.4e", m3));
  o.detail += (o.detail.empty() ? "" : "; ") + fmt("mu = %.4e", m1) + fmt(" / %.2e", m2) +
              fmt(" / %.4e", m3);
  return o;
}

Outcome c2() {
  Outcome o;
  const LinearPencil a = lift(instance("two-disks"));
  const double m1 = margin(a, 3, 2.23);
  const double m2 = margin(a, 3, std::sqrt(5.0));
  const double m3 = margin(a, 3, 2.24);
  o.require(m1 < 0 && m3 > 0, "sign pattern");
  o.require(std::abs(m2) <= 1e-4, "mu(sqrt 5) = " + fmt("%.4e", m2));
  o.detail += fmt("mu = %.4e", m1) + fmt(" / %.2e", m2) + fmt(" / %.4e", m3);
  return o;
}

Outcome c3() {
  Outcome o;
  const LinearPencil a = instance("tv-screen");
  const double m1 = margin(a, 2, 1.18);
  const double m2 = margin(a, 2, std::pow(2.0, 0.25));
  const double m3 = margin(a, 2, 1.19);
  const double m4 = margin(a, 2, 1.2);
  o.require(m1 >= -0.009 && m1 <= -0.006, "mu(1.18) = " + fmt("%.4e", m1));
  o.require(std::abs(m2) <= 1e-4, "mu(2^1/4) = " + fmt("%.4e", m2));
  o.require(m3 >= 3e-4 && m3 <= 1e-3, "mu(1.19) = " + fmt("%.4e", m3));
  o.require(m4 >= 0.008 && m4 <= 0.010, "mu(1.2) = " + fmt("%.4e", m4));
  o.detail += fmt("mu = %.4e", m1) + fmt(" / %.2e", m2) + fmt(" / %.4e", m3) + fmt(" / %.4e", m4);
  return o;
}

Outcome c4() {
  Outcome o;
  const LinearPencil a = lift(instance("tv-screen"));
  const double m1 = margin(a, 4, 1.55);
  const double m2 = margin(a, 4, std::sqrt(std::sqrt(2.0) + 1.0));
  const double m3 = margin(a, 4, 1.56);
  o.require(m1 < 0 && m3 > 0, "sign pattern");
  o.require(std::abs(m2) <= 1e-4, "mu(middle) = " + fmt("%.4e", m2));
  o.detail += fmt("mu = %.4e", m1) + fmt(" / %.2e", m2) + fmt(" / %.4e", m3);
  return o;
}

Outcome c5() {
  Outcome o;
  const LinearPencil disks = instance("two-disks");
  const LinearPencil tv = instance("tv-screen");
  Matrix z = Matrix::Zero(6, 6);
  z(1, 1) = 1.0 / 3.0;
  z.block(2, 2, 2, 2) << 1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0;
  for (double eps : {0.1, 0.5, 1.0}) {
    const double val =
        evaluate(tv, v2(1.0 + eps, 0.0), Vector::Zero(2)).mat().cwiseProduct(z).sum();
    o.require(std::abs(val + 2.0 / 3.0 * eps) <= 1e-12, "objective at eps " + fmt("%g", eps));
  }
  const Verdict v = keep(disks, tv, bilinear_ps_ps(disks, tv, 2));
  o.require(v.status == VerdictStatus::NotContained, std::string("status ") + to_string(v.status));
  o.require(validate_verdict(disks, tv, v), "witness failed validation");
  if (const auto* w = std::get_if<Witness>(&v.evidence))
    o.detail += fmt("witness x = (%.4f", w->x(0)) + fmt(", %.4f)", w->x(1));
  return o;
}

Outcome c6() {
  Outcome o;
  const LinearPencil tv = instance("tv-screen");
  const LinearPencil disks = instance("two-disks");
  const Verdict v = keep(tv, disks, bilinear_ps_ps(tv, disks, 2));
  o.require(v.status == VerdictStatus::Contained, std::string("status ") + to_string(v.status));
  o.require(v.order <= 2, "order " + std::to_string(v.order));
  o.require(validate_verdict(tv, disks, v), "certificate failed validation");
  o.detail += "order " + std::to_string(v.order);
  return o;
}

Outcome c7() {
  Outcome o;
  const HPolyhedronProj in = *polyhedron_instance("singleton-simplex-inner");
  const HPolyhedronProj out = *polyhedron_instance("singleton-simplex-outer");
  const LinearPencil a = polyhedron_to_normal_form(in);
  const LinearPencil b = polyhedron_to_normal_form(out);
  const Verdict yes = keep(a, b, lp_containment(in, out, true));
  o.require(yes.status == VerdictStatus::Contained, "allow_c0 not feasible");
  const Vector c0 = Vector::Ones(3);
  Matrix c(3, 3);
  c << 0, 1, 0, 1, 0, 0, 1, 0, 2;
  const double res = std::max((c0 + c * in.a - out.a).cwiseAbs().maxCoeff(),
                              (c * in.A - out.A).cwiseAbs().maxCoeff());
  o.require(res <= 1e-12, "explicit certificate residual " + fmt("%.2e", res));
  const Verdict no = keep(a, b, lp_containment(in, out, false));
  o.require(no.system_feasible == false, "without c0 the system was not infeasible");
  o.require(no.status != VerdictStatus::Contained, "without c0 returned Contained");
  return o;
}

Outcome c8() {
  Outcome o;
  const LinearPencil a = instance("interval");
  const LinearPencil b = instance("cylinder-interval");
  o.require(outer_projection_cq(b).status == CqStatus::CQFails, "CQ did not fail");
  const Verdict v = keep(a, b, bilinear_ps_ps(a, b, 2));
  o.require(v.status == VerdictStatus::ContainedInClosure,
            std::string("status ") + to_string(v.status));
  return o;
}

const std::vector<st::PencilPair>& pairs() {
  static const std::vector<st::PencilPair> p = st::random_pairs(50, 20240611);
  return p;
}

Outcome c9() {
  Outcome o;
  int compared = 0;
  int feasible = 0;
  double worst = 0.0;
  for (size_t n = 0; n < pairs().size(); ++n) {
    const auto& pr = pairs()[n];
    const Verdict sol = keep(pr.a, pr.b, solitary_criterion(pr.a, pr.b));
    const SosProgram prog = build_projected_module_membership(pr.a, pr.b, 0);
    const SosResult s = solve_sos(prog);
    std::optional<bool> proj;
    if (s.status == SdpStatus::Optimal && s.mu) proj = *s.mu >= -kFeasTol;
    if (s.status == SdpStatus::PrimalInfeasible) proj = false;
    if (s.status == SdpStatus::DualInfeasible) proj = true;
    if (s.certificate) {
      const CertificateCheck chk = verify_certificate(prog, *s.certificate);
      o.require(chk.valid, "pair " + std::to_string(n) + " certificate invalid");
    }
    if (!sol.system_feasible || !proj) continue;
    ++compared;
    feasible += *proj;
    o.require(*sol.system_feasible == *proj, "pair " + std::to_string(n) + " status differs");
    const auto* cert = std::get_if<SolitaryCertificate>(&sol.evidence);
    if (!cert || !s.certificate) continue;
    const int k = pr.a.k();
    const int l = pr.b.k();
    const Matrix& g = s.certificate->grams[1];
    Matrix perm(k * l, k * l);
    for (int i = 0; i < l; ++i)
      for (int a = 0; a < k; ++a)
        for (int j = 0; j < l; ++j)
          for (int b = 0; b < k; ++b) perm(a * l + i, b * l + j) = g(i * k + a, j * k + b);
    const double err = std::max((perm - cert->C).cwiseAbs().maxCoeff(),
                                (s.certificate->grams[0] - cert->C0).cwiseAbs().maxCoeff());
    worst = std::max(worst, err);
    o.require(err <= 1e-9, "pair " + std::to_string(n) + " gram mismatch " + fmt("%.2e", err));
  }
  o.require(compared >= 40, "only " + std::to_string(compared) + " pairs decided");
  o.detail += std::to_string(compared) + " compared, " + std::to_string(feasible) +
              " feasible, max gram diff " + fmt("%.1e", worst);
  return o;
}

Outcome c10() {
  Outcome o;
  int compared = 0;
  for (size_t n = 0; n < pairs().size(); ++n) {
    const auto& pr = pairs()[n];
    const PositiveMapResult r = positive_map_matrix(pr.a, pr.b);
    if (!r.solitary.system_feasible) continue;
    ++compared;
    const bool cp = r.chat.has_value() && r.psd;
    o.require(cp == *r.solitary.system_feasible, "pair " + std::to_string(n) + " differs");
  }
  o.require(compared >= 40, "only " + std::to_string(compared) + " pairs decided");
  o.detail += std::to_string(compared) + " compared";
  return o;
}

Outcome c11() {
  Outcome o;
  const auto names = instance_names();
  int npairs = 0;
  int witnesses = 0;
  for (const auto& na : names) {
    for (const auto& nb : names) {
      const LinearPencil a = instance(na);
      const LinearPencil b = instance(nb);
      if (a.d() != b.d()) continue;
      ++npairs;
      const std::string tag = na + " in " + nb;
      ContainmentOptions opts;
      const OracleResult orc = sampling_oracle(a, b, 512, 7, opts);
      witnesses += orc.witness.has_value();
      std::vector<Verdict> vs;
      vs.push_back(keep(a, b, check_auto(a, b, opts)));
      if (b.m() == 0) {
        vs.push_back(keep(a, b, solitary_criterion(a, b, opts)));
        vs.push_back(keep(a, b, hierarchy(a, b, 1, HierarchyMode::Projected, opts)));
      } else {
        vs.push_back(keep(a, b, bilinear_ps_ps(a, b, 1, opts)));
      }
      bool any_contained = false;
      bool any_not = false;
      for (const auto& v : vs) {
        any_contained |= v.status == VerdictStatus::Contained;
        any_not |= v.status == VerdictStatus::NotContained;
        o.require(validate_verdict(a, b, v), tag + " " + v.method + " evidence invalid");
      }
      o.require(!(any_contained && orc.witness), tag + ": Contained but oracle witness");
      o.require(!(any_contained && any_not), tag + ": Contained and NotContained");
    }
  }
  o.detail += std::to_string(npairs) + " pairs, " + std::to_string(witnesses) + " oracle witnesses";
  return o;
}

Outcome c12() {
  Outcome o;
  // lth scalar product preserves psd
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> dim(1, 4);
  int bad_psd = 0;
  for (int it = 0; it < 1000; ++it) {
    const int k = dim(rng);
    const int l = dim(rng);
    const SymMat m(st::random_psd(rng, k * l, 1 + it % (k * l)));
    const SymMat n(st::random_psd(rng, k, 1 + it % k));
    const SymMat r = lth_scalar_product(m, n, l);
    if (lambda_min(r) < -1e-9 * (1.0 + r.frobenius())) ++bad_psd;
  }
  o.require(bad_psd == 0, std::to_string(bad_psd) + " psd violations");

  // hierarchy runs with every order recorded
  ContainmentOptions all;
  all.stop_at_first = false;
  std::vector<std::pair<LinearPencil, LinearPencil>> runs = {
      {instance("two-disks"), ball_pencil(2, 1.99)},
      {instance("two-disks"), ball_pencil(2, 2.01)},
      {instance("tv-screen"), ball_pencil(2, 1.18)},
      {instance("tv-screen"), ball_pencil(2, 1.2)},
      {lift(instance("two-disks")), ball_pencil(3, 2.23)}};
  for (size_t n = 0; n < 10; ++n) runs.push_back({pairs()[n].a, pairs()[n].b});
  int non_monotone = 0;
  for (const auto& [a, b] : runs) {
    const Verdict v = keep(a, b, hierarchy(a, b, 2, HierarchyMode::Projected, all));
    for (size_t i = 1; i < v.mu_sequence.size(); ++i)
      if (v.mu_sequence[i] < v.mu_sequence[i - 1] - 1e-6) ++non_monotone;
  }
  o.require(non_monotone == 0, std::to_string(non_monotone) + " mu decreases");

  // every accepted certificate so far
  int checked = 0;
  int invalid = 0;
  double worst = 0.0;
  for (const auto& rec : g_records) {
    if (rec.v.status != VerdictStatus::Contained) continue;
    if (const auto* ev = std::get_if<SosEvidence>(&rec.v.evidence)) {
      const CertificateCheck c = verify_certificate(*ev->program, ev->certificate);
      worst = std::max(worst, c.residual / (1.0 + c.coefficient_scale));
      if (!c.valid) ++invalid;
    }
    if (!validate_verdict(rec.a, rec.b, rec.v)) ++invalid;
    ++checked;
  }
  o.require(invalid == 0, std::to_string(invalid) + " invalid certificates");

  // SDPA byte-level round trip
  std::vector<SdpProblem> probs = g_problems;
  for (size_t n = 0; probs.size() < 20 && n < pairs().size(); ++n)
    probs.push_back(
        compile(build_projected_module_membership(pairs()[n].a, pairs()[n].b, 1)).sdp.problem);
  int mismatches = 0;
  for (size_t n = 0; n < 20 && n < probs.size(); ++n) {
    const std::string s = to_sdpa_string(probs[n]);
    const SdpProblem q = from_sdpa_string(s);
    if (!(q == probs[n]) || to_sdpa_string(q) != s) ++mismatches;
  }
  o.require(probs.size() >= 20, "fewer than 20 problems");
  o.require(mismatches == 0, std::to_string(mismatches) + " SDPA mismatches");
  o.detail += std::to_string(checked) + " certificates, worst rel. residual " + fmt("%.1e", worst);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "two-disks in 2-ball margins", 30, c1},
      {2, "cylinder in 3-ball margins", 30, c2},
      {3, "TV screen in 2-ball margins", 30, c3},
      {4, "lifted TV screen in 4-ball margins", 30, c4},
      {5, "two-disks not in TV screen, witness", 60, c5},
      {6, "TV screen in two-disks at t <= 2", 120, c6},
      {7, "LP exactness on singleton", 1, c7},
      {8, "closure regression", 10, c8},
      {9, "solitary equals order-0 module on 50 pairs", 300, c9},
      {10, "positive map matches solitary on 50 pairs", 300, c10},
      {11, "oracle consistency on builtin cross-product", 600, c11},
      {12, "property suites", 300, c12},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.ok = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_s) {
      out.ok = false;
      out.detail += fmt("; over time limit of %.0f s", c.limit_s);
    }
    failed += !out.ok;
    std::printf("[%s] %2d %s (%.2f s) %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
