// Sparse real polynomials, symmetric matrix polynomials and monomial bases.
// Monomials are ordered graded-lexicographically with x_1 most significant,
// so the constant monomial comes first.
#pragma once

#include "spectainer/pencil.hpp"

#include <map>
#include <vector>

namespace spectainer {

using Exponent = std::vector<int>;

int degree(const Exponent& e);
Exponent multiply(const Exponent& a, const Exponent& b);
Exponent unit_exponent(int nvars, int i);

struct GradedLex {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}
  static Polynomial constant(int nvars, double c);
  static Polynomial variable(int nvars, int i);

  int nvars() const { return nvars_; }
  const std::map<Exponent, double, GradedLex>& terms() const { return terms_; }
  void add_term(const Exponent& e, double c);
  double coefficient(const Exponent& e) const;
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  double max_abs_coefficient() const;
  double evaluate(const Vector& v) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial& operator+=(const Polynomial& o);

 private:
  int nvars_ = 0;
  std::map<Exponent, double, GradedLex> terms_;
};

/// Symmetric n x n matrix whose entries are polynomials.
class MatrixPolynomial {
 public:
  MatrixPolynomial(int n, int nvars);
  /// Pencil coefficients placed on the variables var_index[0..d+m-1]
  /// (x first, then y); a negative index drops that term.
  static MatrixPolynomial from_pencil(const LinearPencil& p, int nvars,
                                      const std::vector<int>& var_index);

  int n() const { return n_; }
  int nvars() const { return nvars_; }
  const Polynomial& operator()(int i, int j) const;
  void add(int i, int j, const Polynomial& p);  // adds to (i,j) and (j,i)
  int degree() const;
  Matrix evaluate(const Vector& v) const;

 private:
  int n_;
  int nvars_;
  std::vector<Polynomial> upper_;  // packed (i <= j)
  int idx(int i, int j) const;
};

class MonomialBasis {
 public:
  MonomialBasis(int nvars, int t);

  int nvars() const { return nvars_; }
  int order() const { return t_; }
  int size() const { return static_cast<int>(monos_.size()); }
  const Exponent& operator[](int i) const { return monos_[i]; }
  const std::vector<Exponent>& monomials() const { return monos_; }
  /// -1 when e is not in the basis.
  int index_of(const Exponent& e) const;

 private:
  int nvars_;
  int t_;
  std::vector<Exponent> monos_;
  std::map<Exponent, int> index_;
};

long binomial(int n, int k);

}  // namespace spectainer
