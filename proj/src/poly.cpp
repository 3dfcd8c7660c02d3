#include "spectainer/poly.hpp"

#include <cmath>
#include <numeric>

namespace spectainer {

int degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

Exponent multiply(const Exponent& a, const Exponent& b) {
  Exponent out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Exponent unit_exponent(int nvars, int i) {
  Exponent e(nvars, 0);
  e[i] = 1;
  return e;
}

bool GradedLex::operator()(const Exponent& a, const Exponent& b) const {
  const int da = degree(a);
  const int db = degree(b);
  if (da != db) return da < db;
  return a > b;
}

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Exponent(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  Polynomial p(nvars);
  p.add_term(unit_exponent(nvars, i), 1.0);
  return p;
}

void Polynomial::add_term(const Exponent& e, double c) {
  if (static_cast<int>(e.size()) != nvars_)
    throw ContractViolation("Polynomial: exponent has wrong variable count");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::coefficient(const Exponent& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, spectainer::degree(e));
  return d;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::evaluate(const Vector& v) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (int i = 0; i < nvars_; ++i)
      if (e[i]) t *= std::pow(v(i), e[i]);
    s += t;
  }
  return s;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  return *this + o * -1.0;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (nvars_ == 0 && terms_.empty()) nvars_ = o.nvars_;
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(std::max(nvars_, o.nvars_));
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) r.add_term(multiply(ea, eb), ca * cb);
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(nvars_);
  if (s == 0.0) return r;
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * s);
  return r;
}

MatrixPolynomial::MatrixPolynomial(int n, int nvars)
    : n_(n), nvars_(nvars), upper_(static_cast<size_t>(n) * (n + 1) / 2, Polynomial(nvars)) {}

int MatrixPolynomial::idx(int i, int j) const {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

const Polynomial& MatrixPolynomial::operator()(int i, int j) const {
  return upper_[idx(i, j)];
}

void MatrixPolynomial::add(int i, int j, const Polynomial& p) {
  upper_[idx(i, j)] += p;
}

int MatrixPolynomial::degree() const {
  int d = 0;
  for (const auto& p : upper_) d = std::max(d, p.degree());
  return d;
}

Matrix MatrixPolynomial::evaluate(const Vector& v) const {
  Matrix m(n_, n_);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i <= j; ++i) m(i, j) = m(j, i) = upper_[idx(i, j)].evaluate(v);
  return m;
}

MatrixPolynomial MatrixPolynomial::from_pencil(const LinearPencil& p, int nvars,
                                               const std::vector<int>& var_index) {
  if (static_cast<int>(var_index.size()) != p.d() + p.m())
    throw ContractViolation("from_pencil: need one index per pencil variable");
  MatrixPolynomial out(p.k(), nvars);
  const Exponent zero(nvars, 0);
  for (int j = 0; j < p.k(); ++j) {
    for (int i = 0; i <= j; ++i) {
      Polynomial e(nvars);
      e.add_term(zero, p.a0()(i, j));
      for (int v = 0; v < p.d() + p.m(); ++v) {
        if (var_index[v] < 0) continue;
        const SymMat& c = v < p.d() ? p.ax()[v] : p.ay()[v - p.d()];
        e.add_term(unit_exponent(nvars, var_index[v]), c(i, j));
      }
      out.upper_[out.idx(i, j)] = e;
    }
  }
  return out;
}

namespace {

// Exponents of total degree exactly deg over variables [first, n), x_first
// exponent descending.
void compositions(int n, int first, int deg, Exponent& cur,
                  std::vector<Exponent>& out) {
  if (first == n - 1) {
    cur[first] = deg;
    out.push_back(cur);
    cur[first] = 0;
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[first] = e;
    compositions(n, first + 1, deg - e, cur, out);
  }
  cur[first] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(int nvars, int t) : nvars_(nvars), t_(t) {
  if (nvars < 0 || t < 0) throw ContractViolation("MonomialBasis: negative size");
  monos_.push_back(Exponent(nvars, 0));
  if (nvars > 0) {
    for (int deg = 1; deg <= t; ++deg) {
      Exponent cur(nvars, 0);
      compositions(nvars, 0, deg, cur, monos_);
    }
  }
  for (size_t i = 0; i < monos_.size(); ++i) index_[monos_[i]] = static_cast<int>(i);
}

int MonomialBasis::index_of(const Exponent& e) const {
  const auto it = index_.find(e);
  return it == index_.end() ? -1 : it->second;
}

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace spectainer
