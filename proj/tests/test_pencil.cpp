#include "spectainer/containment.hpp"
#include "spectainer/pencil.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace spectainer;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }
Vector v1(double a) { return (Vector(1) << a).finished(); }

}  // namespace

TEST(Evaluate, BallAtOriginIsIdentity) {
  EXPECT_EQ(evaluate(ball_pencil(2, 1.0), v2(0, 0)).mat(), Matrix::Identity(3, 3));
}

TEST(Evaluate, CylinderAtOriginIsIdentity) {
  EXPECT_EQ(evaluate(instance("two-disks"), v2(0, 0), v1(0)).mat(), Matrix::Identity(4, 4));
}

TEST(Evaluate, TvScreenAsymmetricLift) {
  const LinearPencil tv = instance("tv-screen");
  EXPECT_TRUE(is_psd(evaluate(tv, v2(1, 0), v2(1, 0))));
  EXPECT_FALSE(is_psd(evaluate(tv, v2(-1, 0), v2(-1, 0))));
}

TEST(Evaluate, LengthMismatchThrows) {
  EXPECT_THROW(evaluate(ball_pencil(2, 1.0), v1(0)), ContractViolation);
  EXPECT_THROW(evaluate(instance("two-disks"), v2(0, 0), v2(0, 0)), ContractViolation);
}

TEST(Instances, TwoDisksMatchesBlockFormula) {
  const LinearPencil p = instance("two-disks");
  EXPECT_EQ(p.k(), 4);
  EXPECT_EQ(p.d(), 2);
  EXPECT_EQ(p.m(), 1);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int it = 0; it < 20; ++it) {
    const double x1 = n(rng), x2 = n(rng), y = n(rng);
    Matrix e = Matrix::Zero(4, 4);
    e(0, 0) = 1 - x2;
    e(0, 1) = e(1, 0) = x1 - y;
    e(1, 1) = 1 + x2;
    e(2, 2) = 1 - y;
    e(3, 3) = 1 + y;
    EXPECT_LE((evaluate(p, v2(x1, x2), v1(y)).mat() - e).norm(), 1e-14);
  }
}

TEST(Instances, TvScreenMatchesBlockFormula) {
  const LinearPencil p = instance("tv-screen");
  EXPECT_EQ(p.k(), 6);
  EXPECT_EQ(p.d(), 2);
  EXPECT_EQ(p.m(), 2);
  const double x1 = 0.3, x2 = -0.7, y1 = 0.2, y2 = 0.9;
  Matrix e = Matrix::Zero(6, 6);
  e.block(0, 0, 2, 2) << 1 + y1, y2, y2, 1 - y1;
  e.block(2, 2, 2, 2) << 1, x1, x1, y1;
  e.block(4, 4, 2, 2) << 1, x2, x2, y2;
  EXPECT_LE((evaluate(p, v2(x1, x2), v2(y1, y2)).mat() - e).norm(), 1e-14);
}

TEST(Instances, AllNamesLoad) {
  for (const auto& n : instance_names()) EXPECT_NO_THROW(instance(n)) << n;
  EXPECT_THROW(instance("no-such-thing"), LookupError);
}

TEST(Instances, IntervalIsExampleDiagonalPencil) {
  const LinearPencil p = instance("interval");
  EXPECT_TRUE(p.is_diagonal());
  for (double x : {-1.0, -0.3, 0.0, 1.0}) EXPECT_TRUE(is_psd(evaluate(p, v1(x)), 1e-12));
  for (double x : {-1.01, 1.01}) EXPECT_FALSE(is_psd(evaluate(p, v1(x))));
}

TEST(NormalForm, Examples) {
  const HPolyhedronProj interval((Vector(2) << 1, 1).finished(),
                                 (Matrix(2, 1) << -1, 1).finished());
  const LinearPencil p = polyhedron_to_normal_form(interval);
  EXPECT_EQ(p.k(), 2);
  EXPECT_EQ(evaluate(p, v1(0.25)).mat().diagonal(), (Vector(2) << 0.75, 1.25).finished());

  const HPolyhedronProj half((Vector(1) << 1).finished(), (Matrix(1, 2) << -1, -1).finished());
  EXPECT_EQ(polyhedron_to_normal_form(half).k(), 1);

  const LinearPencil simplex = instance("singleton-simplex-outer");
  EXPECT_EQ(simplex.k(), 3);
  EXPECT_TRUE(simplex.is_diagonal());
  EXPECT_TRUE(is_psd(evaluate(simplex, v2(1, 0))));
}

TEST(NormalForm, RoundTripAndMembership) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  for (int it = 0; it < 20; ++it) {
    Matrix a(4, 2), ap(4, 1);
    Vector b(4);
    for (int i = 0; i < 4; ++i) {
      b(i) = n(rng);
      a(i, 0) = n(rng);
      a(i, 1) = n(rng);
      ap(i, 0) = n(rng);
    }
    const HPolyhedronProj h(b, a, ap);
    const LinearPencil p = polyhedron_to_normal_form(h);
    const HPolyhedronProj back = normal_form_to_polyhedron(p);
    EXPECT_EQ(back.a, h.a);
    EXPECT_EQ(back.A, h.A);
    EXPECT_EQ(back.Aprime, h.Aprime);
    for (int s = 0; s < 50; ++s) {
      const Vector x = v2(n(rng), n(rng));
      const Vector y = v1(n(rng));
      const double row = (b + a * x + ap * y).minCoeff();
      if (std::abs(row) < 1e-6) continue;
      EXPECT_EQ(row >= 0.0, is_psd(evaluate(p, x, y), 1e-9));
    }
  }
}

TEST(BallPencil, Examples) {
  const LinearPencil b1 = ball_pencil(1, 1.0);
  for (double x : {-1.0, 0.5, 1.0}) EXPECT_TRUE(is_psd(evaluate(b1, v1(x)), 1e-12));
  EXPECT_FALSE(is_psd(evaluate(b1, v1(1.001))));
  // det of the arrowhead matrix is 1 - |x|^2 / r^2
  EXPECT_NEAR(lambda_min(evaluate(ball_pencil(2, 2.0), v2(2, 0))), 0.0, 1e-10);
  EXPECT_THROW(ball_pencil(2, 0.0), ContractViolation);
  EXPECT_THROW(ball_pencil(2, -1.0), ContractViolation);
  EXPECT_THROW(ball_pencil(0, 1.0), ContractViolation);
}

TEST(BallPencil, DomainIsEuclideanBall) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int d : {1, 2, 3}) {
    const double r = 1.7;
    const LinearPencil p = ball_pencil(d, r);
    for (int it = 0; it < 300; ++it) {
      Vector x(d);
      for (int i = 0; i < d; ++i) x(i) = u(rng);
      if (std::abs(x.norm() - r) < 1e-3) continue;
      EXPECT_EQ(x.norm() <= r, lambda_min(evaluate(p, x)) >= 0.0);
      if (x.norm() <= r) EXPECT_GE(lambda_min(evaluate(p, x)), 0.0);
    }
  }
}

TEST(Emptiness, Examples) {
  for (int d : {1, 2, 3}) EXPECT_EQ(is_empty(ball_pencil(d, 0.5)), false);
  EXPECT_EQ(is_empty(LinearPencil(SymMat::diagonal(v1(-1)), {})), true);
  EXPECT_EQ(is_empty(instance("tv-screen")), false);
  EXPECT_EQ(is_empty(instance("singleton-simplex-inner")), false);
}

TEST(StrictFeasibility, Examples) {
  EXPECT_EQ(is_strictly_feasible(ball_pencil(2, 1.0)), true);
  const LinearPencil forced(SymMat::zero(2), {SymMat::diagonal(v2(1, -1))});
  EXPECT_EQ(is_strictly_feasible(forced), false);
  EXPECT_EQ(is_empty(forced), false);
  EXPECT_EQ(is_strictly_feasible(instance("two-disks")), true);
  EXPECT_EQ(is_strictly_feasible(instance("singleton-simplex-inner")), false);
}

TEST(OuterCq, Examples) {
  const CqResult c1 = outer_projection_cq(instance("cylinder-interval"));
  EXPECT_EQ(c1.status, CqStatus::CQFails);
  ASSERT_TRUE(c1.direction);
  EXPECT_TRUE(is_psd(*c1.direction));
  EXPECT_NEAR(c1.direction->mat().trace(), 1.0, 1e-6);

  const LinearPencil whole(SymMat::identity(2), {SymMat::identity(2)}, {SymMat::identity(2)});
  EXPECT_EQ(outer_projection_cq(whole).status, CqStatus::WholeSpace);

  EXPECT_THROW(outer_projection_cq(ball_pencil(2, 1.0)), ContractViolation);
}

TEST(OuterCq, TwoDisksAgreesWithSweep) {
  const LinearPencil p = instance("two-disks");
  // y A' for y in {+1, -1}: psd for neither sign means only y = 0 gives a
  // psd combination.
  const bool plus = is_psd(p.ay()[0], 1e-12);
  const bool minus = is_psd(p.ay()[0] * -1.0, 1e-12);
  const CqStatus expect = (plus || minus) ? CqStatus::CQFails : CqStatus::CQHolds;
  EXPECT_EQ(outer_projection_cq(p).status, expect);
  EXPECT_EQ(expect, CqStatus::CQHolds);
}

TEST(Membership, Examples) {
  const LinearPencil disks = instance("two-disks");
  for (double s : {-1.0, 1.0}) {
    EXPECT_EQ(membership(disks, v2(2 * s, 0)).member, true);
    EXPECT_EQ(membership(disks, v2(2.05 * s, 0)).member, false);
    EXPECT_EQ(membership(disks, v2(2.01 * s, 0)).member, false);
  }
  const LinearPencil tv = instance("tv-screen");
  EXPECT_EQ(membership(tv, v2(0, 0)).member, true);
  const double c = std::pow(2.0, 0.25) / std::sqrt(2.0);
  EXPECT_EQ(membership(tv, v2(c, c), 1e-6).member, true);
  EXPECT_EQ(membership(tv, v2(c + 0.01, c + 0.01)).member, false);
  EXPECT_THROW(membership(tv, v1(0)), ContractViolation);
}

TEST(Congruence, Lift) {
  const LinearPencil l = lift(instance("two-disks"));
  EXPECT_EQ(l.d(), 3);
  EXPECT_EQ(l.m(), 0);
  std::mt19937_64 rng(4);
  const Matrix v = spectainer::testing::random_symmetric(rng, 4).leftCols(2);
  const LinearPencil c = congruence(instance("two-disks"), v);
  EXPECT_EQ(c.k(), 2);
  const Vector x = v2(0.3, 0.1);
  EXPECT_LE((evaluate(c, x, v1(0.2)).mat() -
             v.transpose() * evaluate(instance("two-disks"), x, v1(0.2)).mat() * v)
                .norm(),
            1e-12);
}
