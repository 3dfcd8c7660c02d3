#include "spectainer/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace spectainer {

void SparseSym::add(int block, int i, int j, double v) {
  if (i > j) std::swap(i, j);
  entries.push_back({block, i, j, v});
}

void SparseSym::canonicalize() {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const SparseEntry& a, const SparseEntry& b) {
                     return std::tie(a.block, a.i, a.j) <
                            std::tie(b.block, b.i, b.j);
                   });
  std::vector<SparseEntry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().block == e.block &&
        merged.back().i == e.i && merged.back().j == e.j) {
      merged.back().v += e.v;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const SparseEntry& e) { return e.v == 0.0; });
  entries = std::move(merged);
}

double SparseSym::frobenius() const {
  double s = 0.0;
  for (const auto& e : entries) s += (e.i == e.j ? 1.0 : 2.0) * e.v * e.v;
  return std::sqrt(s);
}

bool SparseSym::operator==(const SparseSym& o) const {
  if (entries.size() != o.entries.size()) return false;
  for (size_t k = 0; k < entries.size(); ++k) {
    const auto& a = entries[k];
    const auto& b = o.entries[k];
    if (a.block != b.block || a.i != b.i || a.j != b.j || a.v != b.v)
      return false;
  }
  return true;
}

int SdpProblem::total_dim() const {
  int n = 0;
  for (const auto& b : blocks) n += b.size;
  return n;
}

namespace {

void check_sparse(const SparseSym& s, const std::vector<BlockSpec>& blocks,
                  const std::string& what) {
  for (const auto& e : s.entries) {
    if (e.block < 0 || e.block >= static_cast<int>(blocks.size()))
      throw ContractViolation(what + ": block index " +
                              std::to_string(e.block) + " out of range");
    const auto& spec = blocks[e.block];
    if (e.i < 0 || e.j >= spec.size || e.i > e.j)
      throw ContractViolation(what + ": entry (" + std::to_string(e.i) + "," +
                              std::to_string(e.j) + ") invalid for block " +
                              std::to_string(e.block));
    if (spec.kind == BlockKind::Diagonal && e.i != e.j)
      throw ContractViolation(what + ": off-diagonal entry in diagonal block " +
                              std::to_string(e.block));
  }
}

}  // namespace

void SdpProblem::validate() const {
  if (blocks.empty()) throw ContractViolation("SdpProblem: no blocks");
  for (const auto& b : blocks)
    if (b.size < 1) throw ContractViolation("SdpProblem: empty block");
  if (b.size() != static_cast<Eigen::Index>(a.size()))
    throw ContractViolation("SdpProblem: b has " + std::to_string(b.size()) +
                            " entries for " + std::to_string(a.size()) +
                            " constraints");
  for (size_t i = 0; i < a.size(); ++i)
    check_sparse(a[i], blocks, "constraint " + std::to_string(i + 1));
  check_sparse(c, blocks, "objective");
}

bool SdpProblem::operator==(const SdpProblem& o) const {
  if (blocks.size() != o.blocks.size() || a.size() != o.a.size()) return false;
  for (size_t k = 0; k < blocks.size(); ++k)
    if (blocks[k].size != o.blocks[k].size || blocks[k].kind != o.blocks[k].kind)
      return false;
  for (size_t k = 0; k < a.size(); ++k)
    if (!(a[k] == o.a[k]) || b(k) != o.b(k)) return false;
  return c == o.c;
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SdpStatus::DualInfeasible: return "DualInfeasible";
    case SdpStatus::Stalled: return "Stalled";
  }
  return "?";
}

BlockMatrix zero_blocks(const std::vector<BlockSpec>& blocks) {
  BlockMatrix m;
  m.reserve(blocks.size());
  for (const auto& b : blocks)
    m.push_back(b.kind == BlockKind::Psd ? Matrix::Zero(b.size, b.size)
                                         : Matrix::Zero(b.size, 1));
  return m;
}

double inner(const SparseSym& a, const BlockMatrix& x,
             const std::vector<BlockSpec>& blocks) {
  double s = 0.0;
  for (const auto& e : a.entries) {
    if (blocks[e.block].kind == BlockKind::Diagonal) {
      s += e.v * x[e.block](e.i, 0);
    } else if (e.i == e.j) {
      s += e.v * x[e.block](e.i, e.i);
    } else {
      s += e.v * (x[e.block](e.i, e.j) + x[e.block](e.j, e.i));
    }
  }
  return s;
}

double inner(const BlockMatrix& x, const BlockMatrix& y) {
  double s = 0.0;
  for (size_t b = 0; b < x.size(); ++b) s += x[b].cwiseProduct(y[b]).sum();
  return s;
}

void axpy(double s, const SparseSym& a, BlockMatrix& m,
          const std::vector<BlockSpec>& blocks) {
  for (const auto& e : a.entries) {
    if (blocks[e.block].kind == BlockKind::Diagonal) {
      m[e.block](e.i, 0) += s * e.v;
    } else {
      m[e.block](e.i, e.j) += s * e.v;
      if (e.i != e.j) m[e.block](e.j, e.i) += s * e.v;
    }
  }
}

double block_lambda_min(const Matrix& block, BlockKind kind) {
  if (kind == BlockKind::Diagonal) return block.col(0).minCoeff();
  return sym_eig(Matrix(0.5 * (block + block.transpose()))).values(0);
}

SdpResiduals verify(const SdpProblem& p, const SdpSolution& sol) {
  SdpResiduals r;
  const int m = p.num_constraints();
  if (sol.X.size() != p.blocks.size() || sol.S.size() != p.blocks.size() ||
      sol.y.size() != m)
    throw ContractViolation("verify: solution shape does not match problem");
  Vector ax(m);
  for (int i = 0; i < m; ++i) ax(i) = inner(p.a[i], sol.X, p.blocks);
  r.primal = (p.b - ax).norm() / (1.0 + p.b.norm());

  BlockMatrix rd = zero_blocks(p.blocks);
  for (int i = 0; i < m; ++i) axpy(sol.y(i), p.a[i], rd, p.blocks);
  axpy(-1.0, p.c, rd, p.blocks);
  double rdn = 0.0;
  for (size_t b = 0; b < rd.size(); ++b) rdn += (rd[b] - sol.S[b]).squaredNorm();
  r.dual = std::sqrt(rdn) / (1.0 + p.c.frobenius());

  const double pobj = inner(p.c, sol.X, p.blocks);
  const double dobj = p.b.dot(sol.y);
  r.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
  return r;
}

namespace {

double sparse_dot(const SparseSym& a, const SparseSym& b) {
  double s = 0.0;
  size_t i = 0;
  size_t j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    const auto& x = a.entries[i];
    const auto& y = b.entries[j];
    const auto kx = std::tie(x.block, x.i, x.j);
    const auto ky = std::tie(y.block, y.i, y.j);
    if (kx < ky) {
      ++i;
    } else if (ky < kx) {
      ++j;
    } else {
      s += (x.i == x.j ? 1.0 : 2.0) * x.v * y.v;
      ++i;
      ++j;
    }
  }
  return s;
}

}  // namespace

DedupeResult dedupe(const SdpProblem& p, double tol) {
  const int m = p.num_constraints();
  DedupeResult out;
  out.problem.blocks = p.blocks;
  out.problem.c = p.c;
  if (m == 0) {
    out.problem.b = Vector(0);
    return out;
  }
  Matrix k(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) k(i, j) = k(j, i) = sparse_dot(p.a[i], p.a[j]);

  // Pivoted Cholesky on a working copy; columns of l are in pivot order.
  Vector diag = k.diagonal();
  // Relative to each row's own norm, with a floor above rounding noise.
  const double rel = std::max(tol * tol, 1e-14);
  std::vector<int> pivots;
  std::vector<char> used(m, 0);
  Matrix l = Matrix::Zero(m, m);
  for (int step = 0; step < m; ++step) {
    int best = -1;
    double bestv = 0.0;
    for (int i = 0; i < m; ++i)
      if (!used[i] && diag(i) > rel * k(i, i) && diag(i) > bestv) {
        bestv = diag(i);
        best = i;
      }
    if (best < 0) break;
    used[best] = 1;
    const int c = static_cast<int>(pivots.size());
    const double piv = std::sqrt(diag(best));
    for (int i = 0; i < m; ++i) {
      if (used[i] && i != best) continue;
      double v = k(i, best);
      for (int q = 0; q < c; ++q) v -= l(i, q) * l(best, q);
      l(i, c) = v / piv;
    }
    for (int i = 0; i < m; ++i)
      if (!used[i]) diag(i) -= l(i, c) * l(i, c);
    pivots.push_back(best);
  }

  std::vector<int> kept = pivots;
  std::sort(kept.begin(), kept.end());
  if (static_cast<int>(kept.size()) < m) {
    const int r = static_cast<int>(kept.size());
    Matrix kss(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) kss(i, j) = k(kept[i], kept[j]);
    Eigen::LDLT<Matrix> ldlt(kss);
    Vector bs(r);
    for (int i = 0; i < r; ++i) bs(i) = p.b(kept[i]);
    const double bscale = 1.0 + p.b.cwiseAbs().maxCoeff();
    for (int i = 0; i < m; ++i) {
      if (std::binary_search(kept.begin(), kept.end(), i)) continue;
      Vector ksr(r);
      for (int q = 0; q < r; ++q) ksr(q) = k(kept[q], i);
      const Vector coef = r > 0 ? Vector(ldlt.solve(ksr)) : Vector(0);
      const double predicted = r > 0 ? coef.dot(bs) : 0.0;
      const double mag = r > 0 ? coef.cwiseAbs().sum() : 0.0;
      const double delta = p.b(i) - predicted;
      if (std::abs(delta) > 1e-7 * (bscale * (1.0 + mag)) && out.consistent) {
        out.consistent = false;
        out.ray = Vector::Zero(m);
        out.ray(i) = -1.0 / delta;
        for (int q = 0; q < r; ++q) out.ray(kept[q]) = coef(q) / delta;
      }
    }
  }
  out.kept = kept;
  out.problem.b = Vector(kept.size());
  for (size_t q = 0; q < kept.size(); ++q) {
    out.problem.a.push_back(p.a[kept[q]]);
    out.problem.b(q) = p.b(kept[q]);
  }
  return out;
}

void LinExpr::add_x(long coord, double v) {
  if (v != 0.0) x[coord] += v;
}

void LinExpr::add_f(int var, double v) {
  if (v != 0.0) f[var] += v;
}

int SdpBuilder::add_block(int size, BlockKind kind) {
  if (size < 1) throw ContractViolation("SdpBuilder: block size must be >= 1");
  blocks_.push_back({size, kind});
  offsets_.push_back(next_offset_);
  next_offset_ += kind == BlockKind::Psd
                      ? static_cast<long>(size) * (size + 1) / 2
                      : size;
  return static_cast<int>(blocks_.size()) - 1;
}

int SdpBuilder::add_free() { return num_free_++; }

long SdpBuilder::coord(int block, int i, int j) const {
  if (i > j) std::swap(i, j);
  const auto& spec = blocks_.at(block);
  if (j >= spec.size || i < 0)
    throw ContractViolation("SdpBuilder: entry outside block");
  if (spec.kind == BlockKind::Diagonal) {
    if (i != j)
      throw ContractViolation("SdpBuilder: off-diagonal entry in diagonal block");
    return offsets_[block] + i;
  }
  return offsets_[block] + static_cast<long>(j) * (j + 1) / 2 + i;
}

void SdpBuilder::add_equation(LinExpr row, double rhs) {
  rows_.push_back(std::move(row));
  rhs_.push_back(rhs);
}

void SdpBuilder::set_objective(LinExpr obj, double constant) {
  objective_ = std::move(obj);
  obj_constant_ = constant;
}

namespace {

struct Decoded {
  int block;
  int i;
  int j;
};

Decoded decode(long coord, const std::vector<long>& offsets,
               const std::vector<BlockSpec>& blocks) {
  const auto it = std::upper_bound(offsets.begin(), offsets.end(), coord);
  const int b = static_cast<int>(it - offsets.begin()) - 1;
  const long local = coord - offsets[b];
  if (blocks[b].kind == BlockKind::Diagonal)
    return {b, static_cast<int>(local), static_cast<int>(local)};
  int j = static_cast<int>((std::sqrt(8.0 * local + 1.0) - 1.0) / 2.0);
  while (static_cast<long>(j) * (j + 1) / 2 > local) --j;
  while (static_cast<long>(j + 1) * (j + 2) / 2 <= local) ++j;
  return {b, static_cast<int>(local - static_cast<long>(j) * (j + 1) / 2), j};
}

SparseSym to_sparse(const std::map<long, double>& x,
                    const std::vector<long>& offsets,
                    const std::vector<BlockSpec>& blocks) {
  SparseSym s;
  s.entries.reserve(x.size());
  for (const auto& [c, v] : x) {
    const auto d = decode(c, offsets, blocks);
    s.entries.push_back({d.block, d.i, d.j, d.i == d.j ? v : 0.5 * v});
  }
  s.canonicalize();
  return s;
}

// row += s * other, dropping coefficients that cancel below tol.
template <class K>
void merge_into(std::map<K, double>& row, const std::map<K, double>& other,
                double s, double tol) {
  for (const auto& [key, v] : other) {
    auto [it, inserted] = row.try_emplace(key, s * v);
    if (!inserted) {
      it->second += s * v;
      if (std::abs(it->second) <= tol * std::abs(s * v)) row.erase(it);
    }
  }
}

}  // namespace

CompiledSdp SdpBuilder::compile(double drop_tol) const {
  CompiledSdp out;
  out.num_free = num_free_;
  out.offsets = offsets_;
  if (blocks_.empty()) throw ContractViolation("SdpBuilder: no cone blocks");

  std::vector<LinExpr> rows = rows_;
  std::vector<double> rhs = rhs_;
  LinExpr obj = objective_;
  double obj_const = obj_constant_;
  const int nrows = static_cast<int>(rows.size());

  std::vector<std::vector<int>> occurs(num_free_);
  for (int r = 0; r < nrows; ++r)
    for (const auto& [f, v] : rows[r].f) occurs[f].push_back(r);

  std::vector<char> is_pivot(nrows, 0);
  for (int f = 0; f < num_free_; ++f) {
    int best = -1;
    double bestv = 0.0;
    for (int r : occurs[f]) {
      if (is_pivot[r]) continue;
      const auto it = rows[r].f.find(f);
      if (it == rows[r].f.end()) continue;
      if (std::abs(it->second) > bestv) {
        bestv = std::abs(it->second);
        best = r;
      }
    }
    if (best < 0) {
      const auto it = obj.f.find(f);
      if (it != obj.f.end() && std::abs(it->second) > drop_tol)
        out.objective_unbounded = true;
      obj.f.erase(f);
      continue;
    }
    is_pivot[best] = 1;
    const LinExpr& prow = rows[best];
    const double pc = prow.f.at(f);
    auto eliminate = [&](LinExpr& target, double& trhs) {
      const auto it = target.f.find(f);
      if (it == target.f.end()) return;
      const double s = -it->second / pc;
      merge_into(target.x, prow.x, s, drop_tol);
      merge_into(target.f, prow.f, s, drop_tol);
      target.f.erase(f);
      trhs += s * rhs[best];
    };
    std::vector<int> touched = occurs[f];
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int r : touched) {
      if (r == best || is_pivot[r]) continue;
      const bool had = rows[r].f.count(f) > 0;
      if (!had) continue;
      eliminate(rows[r], rhs[r]);
      for (const auto& [g, v] : prow.f)
        if (g != f) occurs[g].push_back(r);
    }
    // Objective: max obj, obj contains f; rhs sign handled as a constant.
    {
      const auto it = obj.f.find(f);
      if (it != obj.f.end()) {
        const double s = -it->second / pc;
        merge_into(obj.x, prow.x, s, drop_tol);
        merge_into(obj.f, prow.f, s, drop_tol);
        obj.f.erase(f);
        obj_const -= s * rhs[best];
      }
    }
    out.pivots.push_back({f, prow, rhs[best]});
  }

  SdpProblem& p = out.problem;
  p.blocks = blocks_;
  std::vector<double> bvals;
  double scale = 0.0;
  for (double v : rhs) scale = std::max(scale, std::abs(v));
  for (int r = 0; r < nrows; ++r) {
    if (is_pivot[r]) continue;
    if (!rows[r].f.empty())
      throw NumericalFailure("SdpBuilder: free variable survived elimination");
    if (rows[r].x.empty()) {
      if (std::abs(rhs[r]) > 1e-9 * (1.0 + scale)) out.inconsistent = true;
      continue;
    }
    p.a.push_back(to_sparse(rows[r].x, offsets_, blocks_));
    bvals.push_back(rhs[r]);
  }
  p.b = Eigen::Map<Vector>(bvals.data(), static_cast<Eigen::Index>(bvals.size()));
  p.c = to_sparse(obj.x, offsets_, blocks_);
  out.objective_constant = obj_const;
  return out;
}

Vector CompiledSdp::recover_free(const BlockMatrix& X) const {
  Vector v = Vector::Zero(num_free);
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    double s = it->rhs;
    for (const auto& [c, coef] : it->row.x) {
      const auto d = decode(c, offsets, problem.blocks);
      const Matrix& blk = X[d.block];
      const double xv = problem.blocks[d.block].kind == BlockKind::Diagonal
                            ? blk(d.i, 0)
                            : 0.5 * (blk(d.i, d.j) + blk(d.j, d.i));
      s -= coef * xv;
    }
    double pc = 0.0;
    for (const auto& [g, coef] : it->row.f) {
      if (g == it->var) {
        pc = coef;
      } else {
        s -= coef * v(g);
      }
    }
    v(it->var) = s / pc;
  }
  return v;
}

double CompiledSdp::objective(const BlockMatrix& X) const {
  return inner(problem.c, X, problem.blocks) + objective_constant;
}

}  // namespace spectainer
