#include "spectainer/sos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace spectainer {

namespace {

int packed(int i, int j) {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

MatrixPolynomial constant_matrix(const SymMat& m, int nvars) {
  MatrixPolynomial out(m.n(), nvars);
  for (int j = 0; j < m.n(); ++j)
    for (int i = 0; i <= j; ++i)
      if (m(i, j) != 0.0) out.add(i, j, Polynomial::constant(nvars, m(i, j)));
  return out;
}

MatrixPolynomial scalar_matrix(const Polynomial& p) {
  MatrixPolynomial out(1, p.nvars());
  out.add(0, 0, p);
  return out;
}

double max_abs_coefficient(const MatrixPolynomial& m) {
  double s = 0.0;
  for (int j = 0; j < m.n(); ++j)
    for (int i = 0; i <= j; ++i) s = std::max(s, m(i, j).max_abs_coefficient());
  return s;
}

struct Key {
  int group;
  int entry;
  Exponent mono;
};

struct KeyLess {
  bool operator()(const Key& a, const Key& b) const {
    if (a.group != b.group) return a.group < b.group;
    if (a.entry != b.entry) return a.entry < b.entry;
    return GradedLex{}(a.mono, b.mono);
  }
};

struct Row {
  LinExpr expr;
  double rhs = 0.0;
};

}  // namespace

SosProgram::SosProgram(MatrixPolynomial target, bool with_mu)
    : target_(std::move(target)), with_mu_(with_mu) {}

int SosProgram::add_gram(std::string label, MatrixPolynomial g, int basis_degree) {
  if (g.nvars() != nvars())
    throw ContractViolation("SosProgram: term has wrong variable count");
  if (basis_degree < 0) throw ContractViolation("SosProgram: negative basis degree");
  const MonomialBasis basis(nvars(), basis_degree);
  terms_.push_back({std::move(label), std::move(g), basis_degree, basis.monomials()});
  return static_cast<int>(terms_.size()) - 1;
}

void SosProgram::add_side_identity(int term, MatrixPolynomial h) {
  if (term < 0 || term >= static_cast<int>(terms_.size()))
    throw ContractViolation("SosProgram: side identity refers to unknown term");
  if (h.n() != terms_[term].g.n() || h.nvars() != nvars())
    throw ContractViolation("SosProgram: side identity dimension mismatch");
  sides_.push_back({term, std::move(h)});
}

void SosProgram::add_ideal(Polynomial h, int multiplier_degree) {
  if (h.nvars() != nvars())
    throw ContractViolation("SosProgram: ideal generator has wrong variable count");
  if (multiplier_degree < 0) throw ContractViolation("SosProgram: negative multiplier degree");
  ideals_.push_back({std::move(h), multiplier_degree});
}

int SosProgram::gram_size(int term) const {
  const auto& t = terms_.at(term);
  return t.g.n() * l() * static_cast<int>(t.basis.size());
}

void SosProgram::reduce_modulo_linear_ideals() {
  std::vector<const Polynomial*> linear;
  for (const auto& id : ideals_)
    if (id.h.degree() == 1) linear.push_back(&id.h);
  if (linear.empty()) return;
  const int nv = nvars();
  for (auto& term : terms_) {
    if (term.basis_degree < 1) continue;
    const MonomialBasis lower(nv, term.basis_degree - 1);
    // Reduced echelon form over monomials; each pivot row has no other pivot.
    std::vector<std::pair<Exponent, std::map<Exponent, double>>> pivots;
    for (const Polynomial* h : linear) {
      for (const auto& m : lower.monomials()) {
        std::map<Exponent, double> row;
        for (const auto& [e, c] : h->terms()) row[multiply(e, m)] += c;
        const double scale = std::max(1.0, h->max_abs_coefficient());
        for (const auto& [pe, prow] : pivots) {
          const auto it = row.find(pe);
          if (it == row.end()) continue;
          const double f = it->second / prow.at(pe);
          for (const auto& [e, c] : prow) row[e] -= f * c;
          row.erase(pe);
        }
        double rmax = 0.0;
        int dmax = -1;
        for (const auto& [e, c] : row)
          if (std::abs(c) > 1e-9 * scale) {
            rmax = std::max(rmax, std::abs(c));
            dmax = std::max(dmax, degree(e));
          }
        if (dmax < 0) continue;
        const Exponent* best = nullptr;
        double bc = 0.0;
        for (const auto& [e, c] : row)
          if (degree(e) == dmax && std::abs(c) > 1e-6 * rmax && std::abs(c) > bc) {
            best = &e;
            bc = std::abs(c);
          }
        const Exponent pe = *best;
        const double pc = row.at(pe);
        for (auto& [qe, qrow] : pivots) {
          const auto it = qrow.find(pe);
          if (it == qrow.end()) continue;
          const double f = it->second / pc;
          for (const auto& [e, c] : row) qrow[e] -= f * c;
          qrow.erase(pe);
        }
        pivots.emplace_back(pe, std::move(row));
      }
    }
    std::vector<Exponent> kept;
    for (const auto& m : term.basis) {
      bool drop = false;
      for (const auto& [pe, prow] : pivots) drop = drop || pe == m;
      if (!drop) kept.push_back(m);
    }
    term.basis = std::move(kept);
  }
}

CompiledSos compile(const SosProgram& prog) {
  CompiledSos out;
  const int l = prog.l();
  const int nv = prog.nvars();
  const double tmax = max_abs_coefficient(prog.target());
  out.scale = tmax > 0.0 ? 1.0 / tmax : 1.0;

  SdpBuilder builder;
  int ndiag = 0;
  for (size_t k = 0; k < prog.terms().size(); ++k)
    if (prog.gram_size(static_cast<int>(k)) == 1) ++ndiag;
  for (size_t k = 0; k < prog.terms().size(); ++k) {
    const int n = prog.gram_size(static_cast<int>(k));
    if (n == 1) continue;
    out.slots.push_back({builder.add_block(n, BlockKind::Psd), 0, n});
  }
  const int diag_block = ndiag > 0 ? builder.add_block(ndiag, BlockKind::Diagonal) : -1;
  {
    std::vector<CompiledSos::GramSlot> ordered;
    int psd_i = 0;
    int diag_i = 0;
    for (size_t k = 0; k < prog.terms().size(); ++k) {
      if (prog.gram_size(static_cast<int>(k)) == 1)
        ordered.push_back({diag_block, diag_i++, 1});
      else
        ordered.push_back(out.slots[psd_i++]);
    }
    out.slots = std::move(ordered);
  }
  if (prog.with_mu()) out.mu_var = builder.add_free();

  std::map<Key, Row, KeyLess> rows;
  const Exponent zero(nv, 0);

  auto gram_coord = [&](int term, int r, int c) {
    const auto& s = out.slots[term];
    if (s.size == 1) return builder.coord(s.block, s.offset, s.offset);
    return builder.coord(s.block, r, c);
  };

  // Adds <S_term, g>_l into group rows.
  auto add_product = [&](int group, int term, const MatrixPolynomial& g) {
    const auto& basis = prog.terms()[term].basis;
    const int s = static_cast<int>(basis.size());
    const int kk = g.n();
    for (int j = 0; j < l; ++j) {
      for (int i = 0; i <= j; ++i) {
        const int e = packed(i, j);
        for (int a = 0; a < kk; ++a) {
          for (int b = 0; b < kk; ++b) {
            const Polynomial& gab = g(a, b);
            if (gab.is_zero()) continue;
            for (int u = 0; u < s; ++u) {
              for (int w = 0; w < s; ++w) {
                const Exponent uw = multiply(basis[u], basis[w]);
                const long cd = gram_coord(term, (i * kk + a) * s + u, (j * kk + b) * s + w);
                for (const auto& [beta, c] : gab.terms())
                  rows[{group, e, multiply(uw, beta)}].expr.add_x(cd, c);
              }
            }
          }
        }
      }
    }
  };

  for (size_t k = 0; k < prog.terms().size(); ++k)
    add_product(0, static_cast<int>(k), prog.terms()[k].g);

  for (size_t k = 0; k < prog.ideals().size(); ++k) {
    const auto& id = prog.ideals()[k];
    const MonomialBasis basis(nv, id.multiplier_degree);
    std::vector<int> first;
    for (int j = 0; j < l; ++j) {
      for (int i = 0; i <= j; ++i) {
        const int e = packed(i, j);
        first.resize(std::max<size_t>(first.size(), e + 1));
        first[e] = builder.add_free();
        for (int u = 1; u < basis.size(); ++u) builder.add_free();
        for (int u = 0; u < basis.size(); ++u)
          for (const auto& [beta, c] : id.h.terms())
            rows[{0, e, multiply(basis[u], beta)}].expr.add_f(first[e] + u, c);
      }
    }
    out.ideal_vars.push_back(first);
  }

  for (int j = 0; j < l; ++j) {
    for (int i = 0; i <= j; ++i) {
      const int e = packed(i, j);
      for (const auto& [beta, c] : prog.target()(i, j).terms())
        rows[{0, e, beta}].rhs += c * out.scale;
      if (prog.with_mu() && i == j) rows[{0, e, zero}].expr.add_f(out.mu_var, 1.0);
    }
  }

  for (size_t k = 0; k < prog.side_identities().size(); ++k) {
    const auto& sd = prog.side_identities()[k];
    add_product(static_cast<int>(k) + 1, sd.term, sd.h);
  }

  for (auto& [key, row] : rows) {
    if (row.expr.x.empty() && row.expr.f.empty() && row.rhs == 0.0) continue;
    builder.add_equation(std::move(row.expr), row.rhs);
    ++out.equations;
  }

  LinExpr obj;
  if (prog.with_mu()) obj.add_f(out.mu_var, 1.0);
  builder.set_objective(obj);
  out.sdp = builder.compile();
  return out;
}

CertificateCheck verify_certificate(const SosProgram& prog, const SosCertificate& cert,
                                    double tol) {
  CertificateCheck chk;
  const int l = prog.l();
  const int nv = prog.nvars();
  if (cert.grams.size() != prog.terms().size())
    throw ContractViolation("verify_certificate: gram count mismatch");

  // S_term(x) as explicit matrix polynomials.
  std::vector<MatrixPolynomial> svals;
  double gram_norm = 0.0;
  chk.min_gram_eigenvalue = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < prog.terms().size(); ++k) {
    const auto& t = prog.terms()[k];
    const auto& basis = t.basis;
    const int s = static_cast<int>(basis.size());
    const int n = t.g.n() * l;
    const Matrix& gm = cert.grams[k];
    if (gm.rows() != n * s) throw ContractViolation("verify_certificate: gram size mismatch");
    gram_norm = std::max(gram_norm, gm.norm());
    chk.min_gram_eigenvalue =
        std::min(chk.min_gram_eigenvalue, gm.rows() == 1 ? gm(0, 0) : lambda_min(SymMat(gm)));
    MatrixPolynomial sp(n, nv);
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r <= c; ++r) {
        Polynomial p(nv);
        for (int u = 0; u < s; ++u)
          for (int w = 0; w < s; ++w) p.add_term(multiply(basis[u], basis[w]), gm(r * s + u, c * s + w));
        sp.add(r, c, p);
      }
    }
    svals.push_back(std::move(sp));
  }

  auto lth = [&](const MatrixPolynomial& sp, const MatrixPolynomial& g, int i, int j) {
    const int kk = g.n();
    Polynomial acc(nv);
    for (int a = 0; a < kk; ++a)
      for (int b = 0; b < kk; ++b)
        if (!g(a, b).is_zero()) acc += sp(i * kk + a, j * kk + b) * g(a, b);
    return acc;
  };

  chk.coefficient_scale = max_abs_coefficient(prog.target());
  for (int j = 0; j < l; ++j) {
    for (int i = 0; i <= j; ++i) {
      Polynomial r = prog.target()(i, j);
      if (i == j && prog.with_mu()) r.add_term(Exponent(nv, 0), -cert.mu);
      for (size_t k = 0; k < prog.terms().size(); ++k)
        r = r - lth(svals[k], prog.terms()[k].g, i, j);
      for (size_t k = 0; k < prog.ideals().size(); ++k)
        r = r - cert.lambdas.at(k).at(packed(i, j)) * prog.ideals()[k].h;
      chk.residual = std::max(chk.residual, r.max_abs_coefficient());
      for (const auto& sd : prog.side_identities())
        chk.side_residual =
            std::max(chk.side_residual, lth(svals[sd.term], sd.h, i, j).max_abs_coefficient());
    }
  }
  const double bound = tol * (1.0 + chk.coefficient_scale);
  chk.valid = chk.residual <= bound && chk.side_residual <= bound &&
              chk.min_gram_eigenvalue >= -kPsdTol * (1.0 + gram_norm);
  return chk;
}

SosCertificate extract_certificate(const SosProgram& prog, const CompiledSos& comp,
                                   const SdpSolution& sol) {
  if (sol.status != SdpStatus::Optimal)
    throw ContractViolation("extract_certificate: solution is not optimal");
  SosCertificate cert;
  const double inv = 1.0 / comp.scale;
  for (const auto& s : comp.slots) {
    const Matrix& blk = sol.X.at(s.block);
    if (s.size == 1 && comp.sdp.problem.blocks[s.block].kind == BlockKind::Diagonal)
      cert.grams.push_back(Matrix::Constant(1, 1, blk(s.offset, 0) * inv));
    else
      cert.grams.push_back(0.5 * (blk + blk.transpose()) * inv);
  }
  const Vector free = comp.sdp.recover_free(sol.X);
  if (comp.mu_var >= 0) cert.mu = free(comp.mu_var) * inv;
  const int nv = prog.nvars();
  for (size_t k = 0; k < prog.ideals().size(); ++k) {
    const MonomialBasis basis(nv, prog.ideals()[k].multiplier_degree);
    std::vector<Polynomial> per;
    for (int v : comp.ideal_vars[k]) {
      Polynomial p(nv);
      for (int u = 0; u < basis.size(); ++u) p.add_term(basis[u], free(v + u) * inv);
      per.push_back(std::move(p));
    }
    cert.lambdas.push_back(std::move(per));
  }
  const CertificateCheck chk = verify_certificate(prog, cert);
  cert.residual = chk.residual;
  cert.side_residual = chk.side_residual;
  cert.min_gram_eigenvalue = chk.min_gram_eigenvalue;
  if (!chk.valid)
    throw CertificateInvalid("certificate re-substitution failed: residual " +
                             std::to_string(chk.residual) + ", side " +
                             std::to_string(chk.side_residual) + ", min eig " +
                             std::to_string(chk.min_gram_eigenvalue));
  return cert;
}

SosResult solve_sos(const SosProgram& prog, const SdpOptions& opts) {
  SosResult res;
  const CompiledSos comp = compile(prog);
  res.equations = comp.sdp.problem.num_constraints();
  res.gram_dim = comp.sdp.problem.total_dim();
  if (comp.sdp.inconsistent) {
    res.status = SdpStatus::PrimalInfeasible;
    return res;
  }
  if (comp.sdp.objective_unbounded) {
    res.status = SdpStatus::DualInfeasible;
    if (prog.with_mu()) res.mu = std::numeric_limits<double>::infinity();
    return res;
  }
  res.raw = solve(comp.sdp.problem, opts);
  res.status = res.raw.status;
  if (res.status == SdpStatus::DualInfeasible && prog.with_mu())
    res.mu = std::numeric_limits<double>::infinity();
  if (res.status != SdpStatus::Optimal) return res;

  const Vector free = comp.sdp.recover_free(res.raw.X);
  res.mu = comp.mu_var >= 0 ? free(comp.mu_var) / comp.scale : 0.0;
  try {
    res.certificate = extract_certificate(prog, comp, res.raw);
  } catch (const CertificateInvalid& e) {
    res.certificate_error = e.what();
  }

  if (!prog.terms().empty() && prog.terms()[0].basis_degree >= 1 && prog.l() == 1 &&
      prog.terms()[0].g.n() == 1) {
    const auto& slot = comp.slots[0];
    const auto& basis = prog.terms()[0].basis;
    const Matrix& s = res.raw.S.at(slot.block);
    const int nv = prog.nvars();
    if (slot.size > 1 && basis[0] == Exponent(nv, 0) && s(0, 0) > 1e-12) {
      Vector mom = Vector::Constant(nv, std::numeric_limits<double>::quiet_NaN());
      std::vector<int> missing;
      for (int i = 0; i < nv; ++i) {
        const auto it = std::find(basis.begin(), basis.end(), unit_exponent(nv, i));
        if (it != basis.end()) mom(i) = s(0, it - basis.begin()) / s(0, 0);
        else missing.push_back(i);
      }
      // L(h) = 0 for linear generators fixes the eliminated coordinates.
      std::vector<const Polynomial*> lin;
      for (const auto& id : prog.ideals())
        if (id.h.degree() == 1) lin.push_back(&id.h);
      if (!missing.empty() && !lin.empty()) {
        Matrix a = Matrix::Zero(static_cast<int>(lin.size()), static_cast<int>(missing.size()));
        Vector r = Vector::Zero(static_cast<int>(lin.size()));
        for (size_t k = 0; k < lin.size(); ++k) {
          for (const auto& [e, c] : lin[k]->terms()) {
            if (degree(e) == 0) { r(k) -= c; continue; }
            const int v = static_cast<int>(std::find(e.begin(), e.end(), 1) - e.begin());
            const auto mi = std::find(missing.begin(), missing.end(), v);
            if (mi != missing.end()) a(k, mi - missing.begin()) += c;
            else r(k) -= c * mom(v);
          }
        }
        const Vector sol = a.completeOrthogonalDecomposition().solve(r);
        for (size_t j = 0; j < missing.size(); ++j) mom(missing[j]) = sol(j);
      }
      res.moments = mom;
    }
  }
  return res;
}

SosProgram build_projected_module_membership(const LinearPencil& a, const LinearPencil& b,
                                             int t, bool with_mu) {
  if (b.m() != 0) throw ContractViolation("projected module: outer pencil has projection variables");
  if (a.d() != b.d()) throw ContractViolation("projected module: inner and outer dimensions differ");
  if (t < 0) throw ContractViolation("projected module: negative order");
  const int d = b.d();
  std::vector<int> xs(d);
  for (int p = 0; p < d; ++p) xs[p] = p;
  SosProgram prog(MatrixPolynomial::from_pencil(b, d, xs), with_mu);
  prog.add_gram("S0", scalar_matrix(Polynomial::constant(d, 1.0)), t);
  std::vector<int> axs = xs;
  axs.resize(d + a.m(), -1);
  const int s = prog.add_gram("S", MatrixPolynomial::from_pencil(a, d, axs), t);
  for (const auto& aq : a.ay()) prog.add_side_identity(s, constant_matrix(aq, d));
  return prog;
}

SosProgram build_plain_module_membership(const LinearPencil& a, const LinearPencil& b, int t,
                                         bool with_mu) {
  if (b.m() != 0) throw ContractViolation("plain module: outer pencil has projection variables");
  if (a.d() != b.d()) throw ContractViolation("plain module: inner and outer dimensions differ");
  if (t < 0) throw ContractViolation("plain module: negative order");
  const int d = b.d();
  const int nv = d + a.m();
  std::vector<int> bxs(d);
  std::vector<int> axs(nv);
  for (int p = 0; p < d; ++p) bxs[p] = p;
  for (int p = 0; p < nv; ++p) axs[p] = p;
  SosProgram prog(MatrixPolynomial::from_pencil(b, nv, bxs), with_mu);
  prog.add_gram("S0", scalar_matrix(Polynomial::constant(nv, 1.0)), t);
  prog.add_gram("S", MatrixPolynomial::from_pencil(a, nv, axs), t);
  return prog;
}

SosProgram build_bilinear_relaxation(const BilinearDomain& dom, int t) {
  if (t < 0) throw ContractViolation("bilinear relaxation: negative order");
  if (dom.objective.nvars() != dom.nvars)
    throw ContractViolation("bilinear relaxation: objective has wrong variable count");
  int maxdeg = 0;
  for (const auto& g : dom.constraints) maxdeg = std::max(maxdeg, g.degree());
  if (dom.objective.degree() > 2 * t + maxdeg)
    throw ContractViolation("bilinear relaxation: objective degree exceeds the order");
  SosProgram prog(scalar_matrix(dom.objective), true);
  prog.add_gram("sigma0", scalar_matrix(Polynomial::constant(dom.nvars, 1.0)), t);
  for (size_t k = 0; k < dom.constraints.size(); ++k) {
    const int dg = dom.constraints[k].degree();
    if (dg > 2 * t) continue;
    const std::string label =
        k < dom.constraint_labels.size() ? dom.constraint_labels[k] : "g" + std::to_string(k);
    prog.add_gram(label, dom.constraints[k], (2 * t - dg) / 2);
  }
  for (const auto& h : dom.ideal) {
    const int md = 2 * t - h.degree();
    if (md >= 0) prog.add_ideal(h, md);
  }
  prog.reduce_modulo_linear_ideals();
  return prog;
}

void add_archimedean_ball(BilinearDomain& dom, double n) {
  if (!(n > 0.0)) throw ContractViolation("archimedean ball: N must be positive");
  Polynomial g = Polynomial::constant(dom.nvars, n);
  for (int i = 0; i < dom.nvars; ++i) {
    Exponent e(dom.nvars, 0);
    e[i] = 2;
    g.add_term(e, -1.0);
  }
  dom.constraints.push_back(scalar_matrix(g));
  dom.constraint_labels.push_back("ball");
}

BilinearDomain spectrahedral_bilinear_domain(const LinearPencil& a, const LinearPencil& b,
                                             const Matrix& v, bool products) {
  if (a.d() != b.d()) throw ContractViolation("bilinear domain: inner and outer dimensions differ");
  if (v.rows() != b.k() || v.cols() < 1)
    throw ContractViolation("bilinear domain: slice basis has wrong shape");
  const int d = a.d();
  const int ma = a.m();
  const int lp = static_cast<int>(v.cols());
  const int nw = lp * (lp + 1) / 2;
  BilinearDomain dom;
  dom.nvars = d + ma + nw;
  const int nv = dom.nvars;
  for (int p = 0; p < d; ++p) dom.names.push_back("x" + std::to_string(p + 1));
  for (int q = 0; q < ma; ++q) dom.names.push_back("y" + std::to_string(q + 1));
  for (int j = 0; j < lp; ++j)
    for (int i = 0; i <= j; ++i)
      dom.names.push_back("w" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  auto wvar = [&](int i, int j) { return d + ma + packed(i, j); };

  std::vector<int> axs(d + ma);
  for (int p = 0; p < d + ma; ++p) axs[p] = p;
  const MatrixPolynomial apoly = MatrixPolynomial::from_pencil(a, nv, axs);
  MatrixPolynomial w(lp, nv);
  for (int j = 0; j < lp; ++j)
    for (int i = 0; i <= j; ++i) w.add(i, j, Polynomial::variable(nv, wvar(i, j)));
  dom.constraints.push_back(apoly);
  dom.constraint_labels.push_back("A");
  dom.constraints.push_back(w);
  dom.constraint_labels.push_back("W");
  if (products) {
    const int k = a.k();
    MatrixPolynomial prod(k * lp, nv);
    for (int bb = 0; bb < k; ++bb)
      for (int aa = 0; aa <= bb; ++aa)
        for (int i = 0; i < lp; ++i)
          for (int j = 0; j < lp; ++j) {
            const int r = aa * lp + i;
            const int c = bb * lp + j;
            if (aa == bb && r > c) continue;
            prod.add(r, c, apoly(aa, bb) * w(i, j));
          }
    dom.constraints.push_back(prod);
    dom.constraint_labels.push_back("A*W");
  }

  auto pairing = [&](const Matrix& m) {
    Polynomial p(nv);
    for (int j = 0; j < lp; ++j)
      for (int i = 0; i <= j; ++i) {
        const double c = i == j ? m(i, i) : m(i, j) + m(j, i);
        if (std::abs(c) > 1e-14) p.add_term(unit_exponent(nv, wvar(i, j)), c);
      }
    return p;
  };
  const Matrix vt = v.transpose();
  Polynomial tr = pairing(vt * v);
  tr.add_term(Exponent(nv, 0), -1.0);
  dom.ideal.push_back(tr);
  for (const auto& bq : b.ay()) {
    Polynomial h = pairing(vt * bq.mat() * v);
    if (!h.is_zero()) dom.ideal.push_back(h);
  }

  dom.objective = pairing(vt * b.a0().mat() * v);
  for (int p = 0; p < d; ++p)
    dom.objective += pairing(vt * b.ax()[p].mat() * v) * Polynomial::variable(nv, p);
  return dom;
}

BilinearDomain polyhedral_bilinear_domain(const HPolyhedronProj& a, const HPolyhedronProj& b,
                                          bool products) {
  if (a.d() != b.d()) throw ContractViolation("bilinear domain: inner and outer dimensions differ");
  const int d = a.d();
  const int ma = a.m();
  const int nb = b.rows();
  BilinearDomain dom;
  dom.nvars = d + ma + nb;
  const int nv = dom.nvars;
  for (int p = 0; p < d; ++p) dom.names.push_back("x" + std::to_string(p + 1));
  for (int q = 0; q < ma; ++q) dom.names.push_back("y" + std::to_string(q + 1));
  for (int j = 0; j < nb; ++j) dom.names.push_back("z" + std::to_string(j + 1));

  std::vector<Polynomial> rows;
  for (int i = 0; i < a.rows(); ++i) {
    Polynomial r = Polynomial::constant(nv, a.a(i));
    for (int p = 0; p < d; ++p)
      if (a.A(i, p) != 0.0) r.add_term(unit_exponent(nv, p), a.A(i, p));
    for (int q = 0; q < ma; ++q)
      if (a.Aprime(i, q) != 0.0) r.add_term(unit_exponent(nv, d + q), a.Aprime(i, q));
    rows.push_back(r);
    dom.constraints.push_back(scalar_matrix(r));
    dom.constraint_labels.push_back("row" + std::to_string(i + 1));
  }
  for (int j = 0; j < nb; ++j) {
    dom.constraints.push_back(scalar_matrix(Polynomial::variable(nv, d + ma + j)));
    dom.constraint_labels.push_back("z" + std::to_string(j + 1));
  }
  if (products) {
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < nb; ++j) {
        dom.constraints.push_back(scalar_matrix(rows[i] * Polynomial::variable(nv, d + ma + j)));
        dom.constraint_labels.push_back("row" + std::to_string(i + 1) + "*z" + std::to_string(j + 1));
      }
  }
  for (int q = 0; q < b.m(); ++q) {
    Polynomial h(nv);
    for (int j = 0; j < nb; ++j)
      if (b.Aprime(j, q) != 0.0) h.add_term(unit_exponent(nv, d + ma + j), b.Aprime(j, q));
    if (!h.is_zero()) dom.ideal.push_back(h);
  }
  Polynomial sum = Polynomial::constant(nv, -1.0);
  for (int j = 0; j < nb; ++j) sum.add_term(unit_exponent(nv, d + ma + j), 1.0);
  dom.ideal.push_back(sum);

  dom.objective = Polynomial(nv);
  for (int j = 0; j < nb; ++j) {
    const Polynomial z = Polynomial::variable(nv, d + ma + j);
    Polynomial bj = Polynomial::constant(nv, b.a(j));
    for (int p = 0; p < d; ++p)
      if (b.A(j, p) != 0.0) bj.add_term(unit_exponent(nv, p), b.A(j, p));
    dom.objective += bj * z;
  }
  return dom;
}

}  // namespace spectainer
