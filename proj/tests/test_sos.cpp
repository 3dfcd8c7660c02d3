#include "spectainer/containment.hpp"
#include "spectainer/sos.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace spectainer;
using spectainer::testing::random_psd;

namespace {

Polynomial var(int n, int i) { return Polynomial::variable(n, i); }
Polynomial cst(int n, double c) { return Polynomial::constant(n, c); }

// The violating pair for two-disks against the TV screen, laid out in the
// TV-screen pencil's 2+2+2 block order.
Matrix tv_witness_z() {
  Matrix z = Matrix::Zero(6, 6);
  z(1, 1) = 1.0 / 3.0;
  z.block(2, 2, 2, 2) << 1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0;
  return z;
}

}  // namespace

TEST(Monomials, BasisSizeIsBinomial) {
  for (int n = 1; n <= 4; ++n)
    for (int t = 0; t <= 3; ++t) EXPECT_EQ(MonomialBasis(n, t).size(), binomial(n + t, t));
  const MonomialBasis b(2, 2);
  EXPECT_EQ(degree(b[0]), 0);
  for (int i = 1; i < b.size(); ++i) EXPECT_LE(degree(b[i - 1]), degree(b[i]));
  EXPECT_EQ(b.index_of(Exponent{3, 0}), -1);
}

TEST(Polynomials, Arithmetic) {
  const Polynomial x = var(2, 0);
  const Polynomial y = var(2, 1);
  const Polynomial p = (x + y) * (x - y);
  EXPECT_EQ(p.coefficient({2, 0}), 1.0);
  EXPECT_EQ(p.coefficient({0, 2}), -1.0);
  EXPECT_EQ(p.coefficient({1, 1}), 0.0);
  EXPECT_EQ(p.degree(), 2);
  EXPECT_NEAR(p.evaluate((Vector(2) << 3, 2).finished()), 5.0, 1e-15);
}

TEST(SosCompile, ScalarSquare) {
  // (x - 1)^2 = x^2 - 2x + 1 is a square at t = 1.
  MatrixPolynomial target(1, 1);
  target.add(0, 0, (var(1, 0) - cst(1, 1.0)) * (var(1, 0) - cst(1, 1.0)));
  SosProgram prog(target, false);
  MatrixPolynomial one(1, 1);
  one.add(0, 0, cst(1, 1.0));
  prog.add_gram("S0", one, 1);
  const SosResult r = solve_sos(prog);
  ASSERT_EQ(r.status, SdpStatus::Optimal);
  ASSERT_TRUE(r.certificate);
  const CertificateCheck c = verify_certificate(prog, *r.certificate);
  EXPECT_TRUE(c.valid);
  EXPECT_LE(c.residual, 1e-7);
  EXPECT_GE(c.min_gram_eigenvalue, -1e-8);
}

TEST(SosCompile, NonSquareIsInfeasible) {
  // x is not a sum of squares.
  MatrixPolynomial target(1, 1);
  target.add(0, 0, var(1, 0));
  SosProgram prog(target, false);
  MatrixPolynomial one(1, 1);
  one.add(0, 0, cst(1, 1.0));
  prog.add_gram("S0", one, 1);
  const SosResult r = solve_sos(prog);
  EXPECT_EQ(r.status, SdpStatus::PrimalInfeasible);
}

TEST(SosCompile, ZeroTargetIsTrivial) {
  SosProgram prog(MatrixPolynomial(2, 1), false);
  MatrixPolynomial one(1, 1);
  one.add(0, 0, cst(1, 1.0));
  prog.add_gram("S0", one, 0);
  const SosResult r = solve_sos(prog);
  ASSERT_EQ(r.status, SdpStatus::Optimal);
  ASSERT_TRUE(r.certificate);
  EXPECT_LE(verify_certificate(prog, *r.certificate).residual, 1e-8);
}

TEST(SosCompile, TamperedCertificateIsRejected) {
  const SosProgram prog =
      build_projected_module_membership(instance("two-disks"), ball_pencil(2, 2.01), 0);
  const SosResult r = solve_sos(prog);
  ASSERT_TRUE(r.certificate);
  SosCertificate bad = *r.certificate;
  bad.grams[0](0, 0) += 0.1;
  EXPECT_FALSE(verify_certificate(prog, bad).valid);
  bad = *r.certificate;
  bad.mu += 0.1;
  EXPECT_FALSE(verify_certificate(prog, bad).valid);
}

TEST(ProjectedModule, TwoDisksOrderZero) {
  const SosProgram prog =
      build_projected_module_membership(instance("two-disks"), ball_pencil(2, 2.01), 0);
  const SosResult r = solve_sos(prog);
  ASSERT_EQ(r.status, SdpStatus::Optimal);
  ASSERT_TRUE(r.mu);
  EXPECT_GT(*r.mu, 0.0);
  ASSERT_TRUE(r.certificate);
  EXPECT_LE(verify_certificate(prog, *r.certificate).residual, 1e-7);
}

TEST(ProjectedModule, ContractViolations) {
  EXPECT_THROW(build_projected_module_membership(ball_pencil(2, 1), instance("two-disks"), 0),
               ContractViolation);
  EXPECT_THROW(build_projected_module_membership(ball_pencil(3, 1), ball_pencil(2, 1), 0),
               ContractViolation);
  EXPECT_THROW(build_projected_module_membership(ball_pencil(2, 1), ball_pencil(2, 1), -1),
               ContractViolation);
}

TEST(ProjectedModule, PlainAgreesWithoutProjection) {
  // With m = 0 both modules are the same object.
  for (double r : {0.8, 1.0, 1.3}) {
    const LinearPencil a = ball_pencil(2, 1.0);
    const LinearPencil b = ball_pencil(2, r);
    const SosResult p = solve_sos(build_projected_module_membership(a, b, 1));
    const SosResult q = solve_sos(build_plain_module_membership(a, b, 1));
    ASSERT_TRUE(p.mu && q.mu);
    EXPECT_NEAR(*p.mu, *q.mu, 1e-6);
  }
}

TEST(ProjectedModule, PlainIsAtMostProjected) {
  // A projected certificate is also a plain one (S independent of y), so
  // the plain margin can only be larger.
  const LinearPencil a = instance("two-disks");
  const LinearPencil b = ball_pencil(2, 2.01);
  const SosResult p = solve_sos(build_projected_module_membership(a, b, 0));
  const SosResult q = solve_sos(build_plain_module_membership(a, b, 0));
  ASSERT_TRUE(p.mu && q.mu);
  EXPECT_GE(*q.mu, *p.mu - 1e-6);
}

TEST(ProjectedModule, MarginMonotoneInOrder) {
  const LinearPencil a = instance("tv-screen");
  for (double r : {1.1, 1.18, 1.25}) {
    double prev = -std::numeric_limits<double>::infinity();
    for (int t = 0; t <= 1; ++t) {
      const SosResult s = solve_sos(build_projected_module_membership(a, ball_pencil(2, r), t));
      ASSERT_TRUE(s.mu);
      EXPECT_GE(*s.mu, prev - 1e-6) << r << " " << t;
      prev = *s.mu;
    }
  }
}

TEST(ProjectedModule, GramIsPermutedSolitaryMatrix) {
  const auto pairs = spectainer::testing::random_pairs(8, 99);
  int compared = 0;
  for (const auto& pr : pairs) {
    const SosProgram prog = build_projected_module_membership(pr.a, pr.b, 0);
    const SosResult s = solve_sos(prog);
    const Verdict v = solitary_criterion(pr.a, pr.b);
    const auto* cert = std::get_if<SolitaryCertificate>(&v.evidence);
    if (s.status != SdpStatus::Optimal || !s.certificate || !cert) continue;
    const int k = pr.a.k();
    const int l = pr.b.k();
    const Matrix& g = s.certificate->grams[1];
    ASSERT_EQ(g.rows(), k * l);
    Matrix permuted(k * l, k * l);
    for (int i = 0; i < l; ++i)
      for (int a = 0; a < k; ++a)
        for (int j = 0; j < l; ++j)
          for (int b = 0; b < k; ++b) permuted(a * l + i, b * l + j) = g(i * k + a, j * k + b);
    EXPECT_LE((permuted - cert->C).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((s.certificate->grams[0] - cert->C0).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(*s.mu, cert->mu, 1e-9);
    ++compared;
  }
  EXPECT_GT(compared, 4);
}

TEST(Archimedean, FrobeniusBoundedByTrace) {
  std::mt19937_64 rng(77);
  for (int it = 0; it < 200; ++it) {
    Matrix z = random_psd(rng, 1 + it % 5);
    z /= z.trace();
    EXPECT_LE(z.norm(), 1.0 + 1e-12);
  }
}

TEST(Archimedean, AppendsBallConstraint) {
  BilinearDomain dom = spectrahedral_bilinear_domain(instance("two-disks"), ball_pencil(2, 2.0),
                                                     Matrix::Identity(3, 3));
  const size_t before = dom.constraints.size();
  add_archimedean_ball(dom, 4.0);
  ASSERT_EQ(dom.constraints.size(), before + 1);
  const MatrixPolynomial& g = dom.constraints.back();
  EXPECT_EQ(g.n(), 1);
  const Vector zero = Vector::Zero(dom.nvars);
  EXPECT_NEAR(g.evaluate(zero)(0, 0), 4.0, 1e-15);
  EXPECT_NEAR(g.evaluate(Vector::Ones(dom.nvars))(0, 0), 4.0 - dom.nvars, 1e-12);
}

TEST(Bilinear, TvWitnessObjectiveValue) {
  const LinearPencil tv = instance("tv-screen");
  const Matrix z = tv_witness_z();
  EXPECT_NEAR(z.trace(), 1.0, 1e-15);
  EXPECT_GE(lambda_min(SymMat(z)), -1e-15);
  for (const auto& bq : tv.ay()) EXPECT_NEAR(bq.mat().cwiseProduct(z).sum(), 0.0, 1e-15);
  for (double eps : {0.1, 0.5, 1.0}) {
    const Vector x = (Vector(2) << 1.0 + eps, 0.0).finished();
    const double val = evaluate(tv, x, Vector::Zero(2)).mat().cwiseProduct(z).sum();
    EXPECT_NEAR(val, -2.0 / 3.0 * eps, 1e-12);
    EXPECT_EQ(membership(instance("two-disks"), x, 1e-6).member, true);
  }
}

TEST(Bilinear, TvInsideTwoDisksAtOrderOne) {
  const BilinearDomain dom = spectrahedral_bilinear_domain(
      instance("tv-screen"), instance("two-disks"), Matrix::Identity(4, 4));
  const SosProgram prog = build_bilinear_relaxation(dom, 1);
  const SosResult r = solve_sos(prog);
  ASSERT_EQ(r.status, SdpStatus::Optimal);
  ASSERT_TRUE(r.mu);
  EXPECT_GE(*r.mu, -1e-7);
}

TEST(Bilinear, FixedVertexMatchesLinearProgram) {
  // Inner: rotated box. Outer: random polygon. Fixing z to a vertex e_j
  // leaves min (b_j + B_j x) over the box, which a vertex scan solves.
  std::mt19937_64 rng(123);
  const Vector c = (Vector(2) << 0.2, -0.1).finished();
  const Vector h = (Vector(2) << 0.7, 0.4).finished();
  const double th = 0.6;
  const HPolyhedronProj inner = spectainer::testing::rotated_box(c, h, th);
  const auto verts = spectainer::testing::rotated_box_vertices(c, h, th);
  const HPolyhedronProj outer = spectainer::testing::random_polygon(rng, 4);
  for (int j = 0; j < outer.rows(); ++j) {
    BilinearDomain dom = polyhedral_bilinear_domain(inner, outer, false);
    const int nv = dom.nvars;
    const int z0 = nv - outer.rows();
    for (int i = 0; i < outer.rows(); ++i)
      dom.ideal.push_back(var(nv, z0 + i) - cst(nv, i == j ? 1.0 : 0.0));
    const SosResult r = solve_sos(build_bilinear_relaxation(dom, 1));
    ASSERT_EQ(r.status, SdpStatus::Optimal) << j;
    double lp = std::numeric_limits<double>::infinity();
    for (const auto& v : verts) lp = std::min(lp, outer.a(j) + outer.A.row(j).dot(v));
    EXPECT_NEAR(*r.mu, lp, 1e-6) << j;
  }
}

TEST(Bilinear, ObjectiveDegreeMismatchThrows) {
  BilinearDomain dom = spectrahedral_bilinear_domain(instance("two-disks"), ball_pencil(2, 2.0),
                                                     Matrix::Identity(3, 3), false);
  dom.objective = dom.objective * dom.objective * dom.objective;
  EXPECT_THROW(build_bilinear_relaxation(dom, 1), ContractViolation);
}
