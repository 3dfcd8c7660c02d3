#include "spectainer/containment.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace spectainer;
namespace st = spectainer::testing;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

HPolyhedronProj square(double h) { return st::rotated_box(v2(0, 0), v2(h, h), 0.0); }

LinearPencil square_pencil(double h) { return polyhedron_to_normal_form(square(h)); }

bool contained(const Verdict& v) {
  return v.status == VerdictStatus::Contained || v.status == VerdictStatus::ContainedInClosure;
}

double margin_at(const LinearPencil& a, int dim, double r) {
  return ball_margin(a, dim, r, MarginMethod::Hierarchy);
}

}  // namespace

TEST(Lp, SingletonInSimplexWithConstant) {
  const HPolyhedronProj in = *polyhedron_instance("singleton-simplex-inner");
  const HPolyhedronProj out = *polyhedron_instance("singleton-simplex-outer");
  const Verdict v = lp_containment(in, out, true);
  EXPECT_EQ(v.status, VerdictStatus::Contained);
  EXPECT_TRUE(validate_verdict(polyhedron_to_normal_form(in), polyhedron_to_normal_form(out), v));
  const Verdict w = lp_containment(in, out, false);
  EXPECT_NE(w.status, VerdictStatus::Contained);
  EXPECT_EQ(w.system_feasible, false);
}

TEST(Lp, HandCertificateSatisfiesEquations) {
  const HPolyhedronProj in = *polyhedron_instance("singleton-simplex-inner");
  const HPolyhedronProj out = *polyhedron_instance("singleton-simplex-outer");
  const Vector c0 = Vector::Ones(3);
  Matrix c(3, 3);
  c << 0, 1, 0, 1, 0, 0, 1, 0, 2;
  EXPECT_LE((c0 + c * in.a - out.a).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((c * in.A - out.A).cwiseAbs().maxCoeff(), 1e-12);
  Verdict v;
  v.status = VerdictStatus::Contained;
  v.evidence = LpCertificate{c0, c, 0.0};
  EXPECT_TRUE(validate_verdict(polyhedron_to_normal_form(in), polyhedron_to_normal_form(out), v));
  c(2, 2) = 2.5;
  v.evidence = LpCertificate{c0, c, 0.0};
  EXPECT_FALSE(validate_verdict(polyhedron_to_normal_form(in), polyhedron_to_normal_form(out), v));
}

TEST(Lp, BoxesAgainstBoxes) {
  const Verdict yes = lp_containment(square(1.0), square(1.5), true);
  EXPECT_EQ(yes.status, VerdictStatus::Contained);
  const Verdict no = lp_containment(square(1.0), square(0.9), true);
  ASSERT_EQ(no.status, VerdictStatus::NotContained);
  const auto* w = std::get_if<Witness>(&no.evidence);
  ASSERT_TRUE(w);
  EXPECT_LT((square(0.9).a + square(0.9).A * w->x).minCoeff(), 0.0);
  EXPECT_GE((square(1.0).a + square(1.0).A * w->x).minCoeff(), -1e-9);
}

TEST(Solitary, IntervalInItselfHandCertificate) {
  const LinearPencil in = instance("interval");
  // B = diag(1 - x, 1 + x): C_11 = E11, C_22 = E22, C_0 = 0.
  Verdict v;
  v.status = VerdictStatus::Contained;
  Matrix c = Matrix::Zero(4, 4);
  c(0, 0) = 1.0;
  c(3, 3) = 1.0;
  v.evidence = SolitaryCertificate{0.0, Matrix::Zero(2, 2), c, 0.0};
  EXPECT_TRUE(validate_verdict(in, in, v));
  const Verdict s = solitary_criterion(in, in);
  EXPECT_EQ(s.status, VerdictStatus::Contained);
  EXPECT_TRUE(validate_verdict(in, in, s));
}

TEST(Solitary, Balls) {
  const LinearPencil a = ball_pencil(2, 1.0);
  const Verdict same = solitary_criterion(a, a);
  EXPECT_EQ(same.status, VerdictStatus::Contained);
  const Verdict big = solitary_criterion(a, ball_pencil(2, 1.5));
  EXPECT_EQ(big.status, VerdictStatus::Contained);
  ASSERT_TRUE(big.mu);
  EXPECT_GT(*big.mu, 0.0);
  const Verdict small = solitary_criterion(a, ball_pencil(2, 0.8));
  EXPECT_NE(small.status, VerdictStatus::Contained);
  EXPECT_EQ(small.system_feasible, false);
  EXPECT_THROW(solitary_criterion(a, instance("two-disks")), ContractViolation);
}

TEST(Hierarchy, TwoDisksTableRow) {
  const LinearPencil a = instance("two-disks");
  EXPECT_NEAR(margin_at(a, 2, 1.99), -0.0050, 1e-3);
  EXPECT_NEAR(margin_at(a, 2, 2.0), 0.0, 1e-4);
  EXPECT_NEAR(margin_at(a, 2, 2.01), 0.0050, 1e-3);
  const Verdict v = hierarchy(a, ball_pencil(2, 2.01), 0);
  EXPECT_EQ(v.status, VerdictStatus::Contained);
  EXPECT_TRUE(validate_verdict(a, ball_pencil(2, 2.01), v));
}

TEST(Hierarchy, MuSequenceMonotone) {
  ContainmentOptions o;
  o.stop_at_first = false;
  const Verdict v = hierarchy(instance("tv-screen"), ball_pencil(2, 1.1), 2, HierarchyMode::Projected, o);
  ASSERT_GE(v.mu_sequence.size(), 2u);
  for (size_t i = 1; i < v.mu_sequence.size(); ++i)
    EXPECT_GE(v.mu_sequence[i], v.mu_sequence[i - 1] - 1e-6);
}

TEST(Hierarchy, MonotoneInRadius) {
  const LinearPencil a = instance("tv-screen");
  double prev = -1e9;
  for (double r : {1.0, 1.1, 1.18, 1.19, 1.2, 1.4}) {
    const double m = margin_at(a, 2, r);
    EXPECT_GT(m, prev);
    prev = m;
  }
}

TEST(Hierarchy, Transitivity) {
  const LinearPencil a = instance("two-disks");
  const LinearPencil b = ball_pencil(2, 2.1);
  const LinearPencil c = ball_pencil(2, 2.3);
  ASSERT_TRUE(contained(hierarchy(a, b, 1)));
  ASSERT_TRUE(contained(solitary_criterion(b, c)));
  EXPECT_TRUE(contained(hierarchy(a, c, 1)));
}

TEST(PisInH, Squares) {
  const LinearPencil a = instance("two-disks");
  const Verdict yes = pis_in_h_exact(a, square_pencil(2.0));
  EXPECT_EQ(yes.status, VerdictStatus::Contained);
  EXPECT_TRUE(validate_verdict(a, square_pencil(2.0), yes));
  const Verdict no = pis_in_h_exact(a, square_pencil(1.9));
  ASSERT_EQ(no.status, VerdictStatus::NotContained);
  EXPECT_TRUE(validate_verdict(a, square_pencil(1.9), no));
  EXPECT_THROW(pis_in_h_exact(a, ball_pencil(2, 3.0)), ContractViolation);
}

TEST(PisInH, RotatedSquareIsDiagonalizedByCongruence) {
  // A rotated copy of a diagonal pencil is simultaneously diagonalizable.
  const LinearPencil sq = square_pencil(2.0);
  Matrix r = Matrix::Identity(4, 4);
  const double t = 0.4;
  r.block(0, 0, 2, 2) << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  const LinearPencil rot = congruence(sq, r);
  EXPECT_FALSE(rot.is_diagonal());
  const auto tm = simultaneous_diagonalizer(rot);
  ASSERT_TRUE(tm);
  const LinearPencil diag = congruence(rot, *tm);
  EXPECT_TRUE(diag.a0().mat().isDiagonal(1e-8));
  for (const auto& m : diag.ax()) EXPECT_TRUE(m.mat().isDiagonal(1e-8));
  EXPECT_EQ(pis_in_h_exact(instance("two-disks"), rot).status, VerdictStatus::Contained);
  EXPECT_FALSE(simultaneous_diagonalizer(ball_pencil(2, 1.0)));
}

TEST(BilinearPh, Boxes) {
  const Verdict yes = bilinear_ph_ph(square(1.0), square(1.0), 2);
  EXPECT_EQ(yes.status, VerdictStatus::Contained);
  const Verdict no = bilinear_ph_ph(square(1.0), square(0.9), 2);
  ASSERT_EQ(no.status, VerdictStatus::NotContained);
  const auto* w = std::get_if<Witness>(&no.evidence);
  ASSERT_TRUE(w);
  EXPECT_LT(st::min_row_value(square(0.9), {w->x}), 0.0);
}

TEST(BilinearPh, ProjectedOuterWholeLine) {
  const Verdict v = bilinear_ph_ph(*polyhedron_instance("interval"),
                                   *polyhedron_instance("proj-cone-ex1"), 1);
  EXPECT_TRUE(contained(v));
}

TEST(BilinearPs, TvInsideTwoDisks) {
  const Verdict v = bilinear_ps_ps(instance("tv-screen"), instance("two-disks"), 2);
  EXPECT_EQ(v.status, VerdictStatus::Contained);
  EXPECT_LE(v.order, 2);
  EXPECT_TRUE(validate_verdict(instance("tv-screen"), instance("two-disks"), v));
}

TEST(BilinearPs, TwoDisksNotInsideTv) {
  const Verdict v = bilinear_ps_ps(instance("two-disks"), instance("tv-screen"), 1);
  ASSERT_EQ(v.status, VerdictStatus::NotContained);
  const auto* w = std::get_if<Witness>(&v.evidence);
  ASSERT_TRUE(w);
  EXPECT_EQ(membership(instance("tv-screen"), w->x).member, false);
  EXPECT_EQ(membership(instance("two-disks"), w->x, 1e-6).member, true);
  EXPECT_TRUE(validate_verdict(instance("two-disks"), instance("tv-screen"), v));
}

TEST(BilinearPs, ClosureRegression) {
  const LinearPencil b = instance("cylinder-interval");
  EXPECT_EQ(outer_projection_cq(b).status, CqStatus::CQFails);
  const Verdict v = bilinear_ps_ps(instance("interval"), b, 2);
  EXPECT_EQ(v.status, VerdictStatus::ContainedInClosure);
  EXPECT_NE(v.status, VerdictStatus::Contained);
}

TEST(PositiveMap, ConcentricBalls) {
  const PositiveMapResult r = positive_map_matrix(ball_pencil(2, 1.0), ball_pencil(2, 1.0));
  ASSERT_TRUE(r.chat);
  EXPECT_TRUE(r.psd);
  EXPECT_LE(r.map_residual, 1e-6);
}

TEST(PositiveMap, DependentCoefficientsThrow) {
  const LinearPencil a(SymMat::identity(2), {SymMat::identity(2), SymMat::identity(2)});
  EXPECT_THROW(positive_map_matrix(a, ball_pencil(2, 1.0)), ContractViolation);
}

TEST(PositiveMap, AgreesWithSolitaryOnRandomPairs) {
  for (const auto& pr : st::random_pairs(10, 5)) {
    const PositiveMapResult r = positive_map_matrix(pr.a, pr.b);
    if (r.solitary.system_feasible.value_or(false)) {
      ASSERT_TRUE(r.chat);
      EXPECT_TRUE(r.psd);
    } else if (r.solitary.system_feasible.has_value()) {
      EXPECT_FALSE(r.psd);
    }
  }
}

TEST(Oracle, FindsAndRespects) {
  const LinearPencil a = instance("two-disks");
  const OracleResult hit = sampling_oracle(a, ball_pencil(2, 1.9), 64, 1);
  ASSERT_TRUE(hit.witness);
  EXPECT_GT(hit.witness->x.norm(), 1.9);
  const OracleResult miss = sampling_oracle(a, ball_pencil(2, 2.01), 64, 1);
  EXPECT_FALSE(miss.witness);
  EXPECT_GT(miss.tested, 0);
}

TEST(Circumradius, TwoDisks) {
  const RadiusResult r = circumradius(instance("two-disks"), 2, 1.5, 2.5, 1e-4);
  EXPECT_NEAR(r.radius, 2.0, 1e-3);
  const RadiusResult p = circumradius(instance("two-disks"), 2, 1.5, 2.5, 1e-4,
                                      MarginMethod::Hierarchy, 4);
  EXPECT_NEAR(p.radius, 2.0, 1e-3);
}

TEST(Circumradius, TvScreen) {
  const RadiusResult r = circumradius(instance("tv-screen"), 2, 1.0, 1.5, 1e-4);
  EXPECT_NEAR(r.radius, std::pow(2.0, 0.25), 1e-3);
}

TEST(Circumradius, LiftedTvScreen) {
  const RadiusResult r = circumradius(lift(instance("tv-screen")), 4, 1.3, 1.8, 1e-4,
                                      MarginMethod::Hierarchy, 3);
  EXPECT_NEAR(r.radius, std::sqrt(std::sqrt(2.0) + 1.0), 1e-3);
}

TEST(Circumradius, BadBracketThrows) {
  EXPECT_THROW(circumradius(instance("two-disks"), 2, 2.1, 2.5, 1e-4), ContractViolation);
}

TEST(Random, BoxesInPolygonsAllMethodsAgree) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::uniform_real_distribution<double> hw(0.1, 0.8);
  std::uniform_real_distribution<double> ang(0.0, M_PI);
  int decided = 0;
  int inside = 0;
  for (int it = 0; it < 50; ++it) {
    const Vector c = v2(u(rng), u(rng));
    const Vector h = v2(hw(rng), hw(rng));
    const double th = ang(rng);
    const HPolyhedronProj box = st::rotated_box(c, h, th);
    const HPolyhedronProj poly = st::random_polygon(rng, 5);
    const double truth = st::min_row_value(poly, st::rotated_box_vertices(c, h, th));
    if (std::abs(truth) < 1e-3) continue;
    const bool expect = truth > 0;
    const Verdict lp = lp_containment(box, poly, true);
    const Verdict sol = solitary_criterion(polyhedron_to_normal_form(box),
                                           polyhedron_to_normal_form(poly));
    EXPECT_EQ(lp.status == VerdictStatus::Contained, expect) << it;
    EXPECT_EQ(sol.status == VerdictStatus::Contained, expect) << it;
    if (!expect) EXPECT_EQ(lp.status, VerdictStatus::NotContained) << it;
    ++decided;
    inside += expect;
  }
  EXPECT_GE(decided, 40);
  EXPECT_GT(inside, 0);
  EXPECT_LT(inside, decided);
}

TEST(Random, NeverContradictsOracle) {
  for (const auto& pr : st::random_pairs(20, 31)) {
    const OracleResult o = sampling_oracle(pr.a, pr.b, 64, 3);
    for (const Verdict& v : {solitary_criterion(pr.a, pr.b), hierarchy(pr.a, pr.b, 1)}) {
      if (o.witness) EXPECT_FALSE(contained(v)) << v.method;
      EXPECT_TRUE(validate_verdict(pr.a, pr.b, v)) << v.method;
    }
  }
}

TEST(Validate, RejectsForgedWitness) {
  const LinearPencil a = instance("two-disks");
  const LinearPencil b = ball_pencil(2, 2.5);
  Verdict v;
  v.status = VerdictStatus::NotContained;
  Witness w;
  w.x = v2(0.5, 0.0);
  v.evidence = w;
  EXPECT_FALSE(validate_verdict(a, b, v));
}
