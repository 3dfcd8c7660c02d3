#include "spectainer/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace spectainer {

LinearPencil::LinearPencil(SymMat a0, std::vector<SymMat> ax,
                           std::vector<SymMat> ay)
    : a0_(std::move(a0)), ax_(std::move(ax)), ay_(std::move(ay)) {
  for (size_t p = 0; p < ax_.size(); ++p)
    if (ax_[p].n() != k())
      throw ContractViolation("LinearPencil: A_" + std::to_string(p + 1) +
                              " has size " + std::to_string(ax_[p].n()) +
                              ", expected " + std::to_string(k()));
  for (size_t q = 0; q < ay_.size(); ++q)
    if (ay_[q].n() != k())
      throw ContractViolation("LinearPencil: A'_" + std::to_string(q + 1) +
                              " has size " + std::to_string(ay_[q].n()) +
                              ", expected " + std::to_string(k()));
}

double LinearPencil::coefficient_scale() const {
  double s = a0_.mat().cwiseAbs().maxCoeff();
  for (const auto& m : ax_) s = std::max(s, m.mat().cwiseAbs().maxCoeff());
  for (const auto& m : ay_) s = std::max(s, m.mat().cwiseAbs().maxCoeff());
  return s;
}

bool LinearPencil::is_diagonal() const {
  if (!a0_.is_diagonal()) return false;
  for (const auto& m : ax_)
    if (!m.is_diagonal()) return false;
  for (const auto& m : ay_)
    if (!m.is_diagonal()) return false;
  return true;
}

HPolyhedronProj::HPolyhedronProj(Vector a_, Matrix A_, Matrix Aprime_)
    : a(std::move(a_)), A(std::move(A_)), Aprime(std::move(Aprime_)) {
  if (A.rows() != a.size() || Aprime.rows() != a.size())
    throw ContractViolation("HPolyhedronProj: row counts of a, A, A' differ");
  if (a.size() < 1) throw ContractViolation("HPolyhedronProj: no rows");
}

HPolyhedronProj::HPolyhedronProj(Vector a_, Matrix A_)
    : HPolyhedronProj(a_, A_, Matrix::Zero(a_.size(), 0)) {}

SymMat evaluate(const LinearPencil& p, const Vector& x, const Vector& y) {
  if (x.size() != p.d() || y.size() != p.m())
    throw ContractViolation("evaluate: expected |x| = " + std::to_string(p.d()) +
                            " and |y| = " + std::to_string(p.m()) + ", got " +
                            std::to_string(x.size()) + " and " +
                            std::to_string(y.size()));
  SymMat out = p.a0();
  for (int i = 0; i < p.d(); ++i) out += p.ax()[i] * x(i);
  for (int i = 0; i < p.m(); ++i) out += p.ay()[i] * y(i);
  return out;
}

SymMat evaluate(const LinearPencil& p, const Vector& x) {
  return evaluate(p, x, Vector::Zero(p.m()));
}

LinearPencil polyhedron_to_normal_form(const HPolyhedronProj& h) {
  std::vector<SymMat> ax;
  std::vector<SymMat> ay;
  for (int p = 0; p < h.d(); ++p) ax.push_back(SymMat::diagonal(h.A.col(p)));
  for (int q = 0; q < h.m(); ++q) ay.push_back(SymMat::diagonal(h.Aprime.col(q)));
  return LinearPencil(SymMat::diagonal(h.a), std::move(ax), std::move(ay));
}

HPolyhedronProj normal_form_to_polyhedron(const LinearPencil& p) {
  if (!p.is_diagonal())
    throw ContractViolation("normal_form_to_polyhedron: pencil is not diagonal");
  Matrix A(p.k(), p.d());
  Matrix Ap(p.k(), p.m());
  for (int i = 0; i < p.d(); ++i) A.col(i) = p.ax()[i].mat().diagonal();
  for (int i = 0; i < p.m(); ++i) Ap.col(i) = p.ay()[i].mat().diagonal();
  return HPolyhedronProj(p.a0().mat().diagonal(), A, Ap);
}

LinearPencil ball_pencil(int d, double r) {
  if (d < 1) throw ContractViolation("ball_pencil: d must be >= 1");
  if (!(r > 0)) throw ContractViolation("ball_pencil: radius must be positive");
  std::vector<SymMat> ax;
  for (int p = 0; p < d; ++p) ax.push_back(SymMat::unit(d + 1, p, d) * (1.0 / r));
  return LinearPencil(SymMat::identity(d + 1), std::move(ax));
}

LinearPencil lift(const LinearPencil& p) {
  std::vector<SymMat> ax = p.ax();
  ax.insert(ax.end(), p.ay().begin(), p.ay().end());
  return LinearPencil(p.a0(), std::move(ax));
}

LinearPencil congruence(const LinearPencil& p, const Matrix& v) {
  std::vector<SymMat> ax;
  std::vector<SymMat> ay;
  for (const auto& m : p.ax()) ax.push_back(m.congruence(v));
  for (const auto& m : p.ay()) ay.push_back(m.congruence(v));
  return LinearPencil(p.a0().congruence(v), std::move(ax), std::move(ay));
}

namespace {

SymMat diag(std::initializer_list<double> v) {
  Vector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return SymMat::diagonal(d);
}

SymMat unit(int n, int i, int j) { return SymMat::unit(n, i, j); }

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  const auto nr = static_cast<Eigen::Index>(r.size());
  const auto nc = static_cast<Eigen::Index>(r.begin()->size());
  Matrix m(nr, nc);
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

const std::map<std::string, std::function<HPolyhedronProj()>>& polyhedra() {
  static const std::map<std::string, std::function<HPolyhedronProj()>> table = {
      {"interval", [] { return HPolyhedronProj(vec({1, 1}), rows({{-1}, {1}})); }},
      {"proj-cone-ex1",
       [] {
         return HPolyhedronProj(vec({1, 1}), rows({{-1}, {1}}), rows({{1}, {1}}));
       }},
      {"proj-strip-ex2",
       [] {
         return HPolyhedronProj(vec({1, 1}), rows({{1}, {-1}}), rows({{-1}, {1}}));
       }},
      {"singleton-simplex-inner",
       [] {
         return HPolyhedronProj(vec({1, -1, 0}), rows({{-1, -1}, {1, 0}, {0, 1}}));
       }},
      {"singleton-simplex-outer",
       [] {
         return HPolyhedronProj(vec({0, 2, 2}), rows({{1, 0}, {-1, -1}, {-1, 1}}));
       }},
  };
  return table;
}

const std::map<std::string, std::function<LinearPencil()>>& pencils() {
  static const std::map<std::string, std::function<LinearPencil()>> table = {
      {"two-disks",
       [] {
         return LinearPencil(SymMat::identity(4),
                             {unit(4, 0, 1), diag({-1, 1, 0, 0})},
                             {unit(4, 0, 1) * -1.0 + diag({0, 0, -1, 1})});
       }},
      {"tv-screen",
       [] {
         return LinearPencil(diag({1, 1, 1, 0, 1, 0}), {unit(6, 2, 3), unit(6, 4, 5)},
                             {diag({1, -1, 0, 1, 0, 0}),
                              unit(6, 0, 1) + unit(6, 5, 5)});
       }},
      {"cylinder-interval",
       [] {
         return LinearPencil(diag({0, 1, 0}), {unit(3, 0, 1) + diag({0, 0, -1})},
                             {diag({-1, 0, 0}), diag({0, -1, 1})});
       }},
  };
  return table;
}

}  // namespace

LinearPencil instance(const std::string& name) {
  if (const auto it = pencils().find(name); it != pencils().end())
    return it->second();
  if (const auto h = polyhedron_instance(name)) return polyhedron_to_normal_form(*h);
  throw LookupError("unknown instance '" + name + "'");
}

std::optional<HPolyhedronProj> polyhedron_instance(const std::string& name) {
  if (const auto it = polyhedra().find(name); it != polyhedra().end())
    return it->second();
  return std::nullopt;
}

std::vector<std::string> instance_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : pencils()) names.push_back(k);
  for (const auto& [k, v] : polyhedra()) names.push_back(k);
  std::sort(names.begin(), names.end());
  return names;
}

void add_pencil_block(LmiProblem& lmi, const LinearPencil& p, int offset,
                      const std::optional<Vector>& fixed_x) {
  const BlockKind kind = p.is_diagonal() ? BlockKind::Diagonal : BlockKind::Psd;
  Matrix f0 = p.a0().mat();
  int next = offset;
  std::vector<std::pair<int, const SymMat*>> terms;
  if (fixed_x) {
    for (int i = 0; i < p.d(); ++i) f0 += (*fixed_x)(i) * p.ax()[i].mat();
  } else {
    for (int i = 0; i < p.d(); ++i) terms.push_back({next++, &p.ax()[i]});
  }
  for (int i = 0; i < p.m(); ++i) terms.push_back({next++, &p.ay()[i]});
  if (next > lmi.nvars)
    throw ContractViolation("add_pencil_block: LMI has too few variables");
  LmiBlock& b = lmi.add_block(kind, f0);
  for (const auto& [var, m] : terms) b.f[var] = m->mat();
}

MarginResult feasibility_margin(const LinearPencil& p, const SdpOptions& opts) {
  const int n = p.d() + p.m() + 1;
  LmiProblem lmi(n);
  lmi.c(n - 1) = 1.0;
  add_pencil_block(lmi, p);
  lmi.blocks.back().f[n - 1] = -Matrix::Identity(p.k(), p.k());
  Vector g = Vector::Zero(n);
  g(n - 1) = -1.0;
  lmi.add_linear(1.0, g);
  const LmiResult r = solve_lmi(lmi, opts);
  MarginResult out;
  out.status = r.status;
  out.margin = r.value;
  out.x = r.w.head(p.d());
  out.y = r.w.segment(p.d(), p.m());
  return out;
}

std::optional<bool> is_empty(const LinearPencil& p, double tol) {
  const MarginResult r = feasibility_margin(p);
  if (r.status != LmiStatus::Optimal) return std::nullopt;
  return r.margin < -tol;
}

std::optional<bool> is_strictly_feasible(const LinearPencil& p, double tol) {
  const MarginResult r = feasibility_margin(p);
  if (r.status != LmiStatus::Optimal) return std::nullopt;
  return r.margin > tol;
}

const char* to_string(CqStatus s) {
  switch (s) {
    case CqStatus::WholeSpace: return "WholeSpace";
    case CqStatus::CQHolds: return "CQHolds";
    case CqStatus::CQFails: return "CQFails";
    case CqStatus::Unknown: return "Unknown";
  }
  return "?";
}

CqResult outer_projection_cq(const LinearPencil& p, double tol) {
  if (p.m() < 1) throw ContractViolation("outer_projection_cq: pencil has m = 0");
  const int m = p.m();
  const int k = p.k();
  CqResult out;
  const BlockKind kind = p.is_diagonal() ? BlockKind::Diagonal : BlockKind::Psd;

  {
    LmiProblem lmi(m + 1);
    lmi.c(m) = 1.0;
    LmiBlock& b = lmi.add_block(kind, Matrix::Zero(k, k));
    for (int q = 0; q < m; ++q) b.f[q] = p.ay()[q].mat();
    b.f[m] = -Matrix::Identity(k, k);
    Vector g = Vector::Zero(m + 1);
    g(m) = -1.0;
    lmi.add_linear(1.0, g);
    const LmiResult r = solve_lmi(lmi);
    if (r.status != LmiStatus::Optimal) return out;
    if (r.value > tol) {
      out.status = CqStatus::WholeSpace;
      out.coefficients = r.w.head(m);
      Matrix s = Matrix::Zero(k, k);
      for (int q = 0; q < m; ++q) s += r.w(q) * p.ay()[q].mat();
      out.direction = SymMat(s);
      return out;
    }
  }

  LmiProblem lmi(m);
  Vector tr(m);
  for (int q = 0; q < m; ++q) tr(q) = p.ay()[q].mat().trace();
  lmi.c = tr;
  LmiBlock& b = lmi.add_block(kind, Matrix::Zero(k, k));
  for (int q = 0; q < m; ++q) b.f[q] = p.ay()[q].mat();
  lmi.add_linear(1.0, -tr);
  const LmiResult r = solve_lmi(lmi);
  if (r.status != LmiStatus::Optimal) return out;
  out.coefficients = r.w;
  if (r.value <= tol) {
    out.status = CqStatus::CQHolds;
    return out;
  }
  out.status = CqStatus::CQFails;
  Matrix s = Matrix::Zero(k, k);
  for (int q = 0; q < m; ++q) s += r.w(q) * p.ay()[q].mat();
  out.direction = SymMat(s / s.trace());
  return out;
}

bool projection_looks_bounded(const LinearPencil& p) {
  const int n = p.d() + p.m();
  for (int i = 0; i < p.d(); ++i) {
    for (double sign : {1.0, -1.0}) {
      LmiProblem lmi(n);
      lmi.c(i) = sign;
      LinearPencil rec(SymMat::zero(p.k()), p.ax(), p.ay());
      add_pencil_block(lmi, rec);
      lmi.add_box(1.0);
      const LmiResult r = solve_lmi(lmi);
      if (r.status == LmiStatus::Optimal && r.value > 1e-6) return false;
    }
  }
  return true;
}

}  // namespace spectainer
