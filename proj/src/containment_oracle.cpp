#include "containment_internal.hpp"

#include <random>

namespace spectainer {

namespace {

std::optional<Witness> test_point(const LinearPencil& a, const LinearPencil& b, const Vector& x,
                                  const Vector& y) {
  Witness w;
  if (b.m() == 0) {
    w.violation = lambda_min(evaluate(b, x));
  } else {
    const MembershipResult mem = membership(b, x);
    if (!mem.member || *mem.member) return std::nullopt;
    w.violation = mem.margin;
  }
  if (w.violation > -detail::kViolationTol) return std::nullopt;
  const MembershipResult in = membership(a, x);
  if (!in.member || !*in.member) return std::nullopt;
  w.x = x;
  if (a.m() > 0) w.y = y;
  return w;
}

}  // namespace

OracleResult sampling_oracle(const LinearPencil& a, const LinearPencil& b, int n_samples,
                             std::uint64_t seed, const ContainmentOptions& opts) {
  if (a.d() != b.d()) throw ContractViolation("sampling_oracle: dimensions differ");
  OracleResult out;
  const int d = a.d();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vector> dirs(n_samples, Vector(d));
  for (auto& c : dirs)
    for (int p = 0; p < d; ++p) c(p) = normal(rng);

  // Extreme points are computed in parallel batches and tested in order, so
  // the first witness does not depend on the thread count.
  ContainmentOptions inner = opts;
  inner.sdp.parallel = false;
  std::vector<detail::LinearMin> extremes;
  const int batch = 32;
  for (int start = 0; start < n_samples; start += batch) {
    const int end = std::min(n_samples, start + batch);
    std::vector<detail::LinearMin> mins(end - start);
#pragma omp parallel for schedule(dynamic)
    for (int i = start; i < end; ++i) mins[i - start] = detail::minimize_linear(a, dirs[i], 0.0, inner.sdp);
    for (auto& m : mins) {
      if (m.status != LmiStatus::Optimal) continue;
      ++out.tested;
      if (auto w = test_point(a, b, m.x, m.y)) {
        out.witness = w;
        return out;
      }
      extremes.push_back(std::move(m));
    }
  }
  if (extremes.size() < 2) return out;

  // Random convex combinations of the extreme points found.
  std::uniform_int_distribution<size_t> pick(0, extremes.size() - 1);
  std::exponential_distribution<double> expo(1.0);
  for (int s = 0; s < n_samples; ++s) {
    const int parts = 2 + s % 3;
    Vector x = Vector::Zero(d);
    Vector y = Vector::Zero(a.m());
    double total = 0.0;
    for (int j = 0; j < parts; ++j) {
      const auto& e = extremes[pick(rng)];
      const double wgt = expo(rng);
      x += wgt * e.x;
      y += wgt * e.y;
      total += wgt;
    }
    x /= total;
    y /= total;
    ++out.tested;
    if (auto w = test_point(a, b, x, y)) {
      out.witness = w;
      return out;
    }
  }
  return out;
}

}  // namespace spectainer
