#include "spectainer/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace spectainer {

using nlohmann::json;

namespace {

Matrix matrix_from_json(const json& j, int rows, int cols, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ContractViolation(what + ": expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& r = j[i];
    if (!r.is_array() || static_cast<int>(r.size()) != cols)
      throw ContractViolation(what + ": row " + std::to_string(i) + " must have " +
                              std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) m(i, c) = r[c].get<double>();
  }
  return m;
}

std::vector<SymMat> matrices_from_json(const json& j, int count, int k, const std::string& what) {
  std::vector<SymMat> out;
  if (count == 0 && (j.is_null() || (j.is_array() && j.empty()))) return out;
  if (!j.is_array() || static_cast<int>(j.size()) != count)
    throw ContractViolation(what + ": expected " + std::to_string(count) + " matrices");
  for (int i = 0; i < count; ++i)
    out.emplace_back(matrix_from_json(j[i], k, k, what + "[" + std::to_string(i) + "]"));
  return out;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (int c = 0; c < m.cols(); ++c) r.push_back(m(i, c));
    rows.push_back(r);
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t pos; (pos = s.find(sep, start)) != std::string::npos; start = pos + 1)
    out.push_back(s.substr(start, pos - start));
  out.push_back(s.substr(start));
  return out;
}

json evidence_json(const Evidence& e) {
  return std::visit(
      [](const auto& ev) -> json {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, LpCertificate>) {
          return {{"type", "lp"}, {"c0", vector_json(ev.c0)}, {"C", matrix_json(ev.C)},
                  {"residual", ev.residual}};
        } else if constexpr (std::is_same_v<T, SolitaryCertificate>) {
          return {{"type", "solitary"}, {"mu", ev.mu}, {"C0", matrix_json(ev.C0)},
                  {"C", matrix_json(ev.C)}, {"residual", ev.residual}};
        } else if constexpr (std::is_same_v<T, SosEvidence>) {
          json grams = json::array();
          json labels = json::array();
          for (size_t i = 0; i < ev.certificate.grams.size(); ++i) {
            grams.push_back(matrix_json(ev.certificate.grams[i]));
            labels.push_back(ev.program ? ev.program->terms()[i].label : std::string());
          }
          return {{"type", "sos"},
                  {"order", ev.order},
                  {"mu", ev.certificate.mu},
                  {"gram_labels", labels},
                  {"grams", grams},
                  {"residual", ev.certificate.residual},
                  {"side_residual", ev.certificate.side_residual},
                  {"min_gram_eigenvalue", ev.certificate.min_gram_eigenvalue}};
        } else if constexpr (std::is_same_v<T, WholeSpaceCertificate>) {
          return {{"type", "whole-space"},
                  {"coefficients", vector_json(ev.coefficients)},
                  {"min_eigenvalue", ev.min_eigenvalue}};
        } else {
          json w = {{"x", vector_json(ev.x)}, {"violation", ev.violation}};
          if (ev.y) w["y"] = vector_json(*ev.y);
          if (ev.Z) w["Z"] = matrix_json(ev.Z->mat());
          if (ev.z) w["z"] = vector_json(*ev.z);
          return w;
        }
      },
      e);
}

}  // namespace

LinearPencil pencil_from_json(const json& j) {
  const int k = j.at("k").get<int>();
  const int d = j.value("d", 0);
  const int m = j.value("m", 0);
  if (k < 1 || d < 0 || m < 0) throw ContractViolation("pencil: need k >= 1, d >= 0, m >= 0");
  const SymMat a0(matrix_from_json(j.at("A0"), k, k, "A0"));
  return LinearPencil(a0, matrices_from_json(j.value("Ax", json()), d, k, "Ax"),
                      matrices_from_json(j.value("Ay", json()), m, k, "Ay"));
}

HPolyhedronProj polyhedron_from_json(const json& j) {
  const int rows = j.at("rows").get<int>();
  const int d = j.value("d", 0);
  const int m = j.value("m", 0);
  if (rows < 1 || d < 0 || m < 0) throw ContractViolation("polyhedron: need rows >= 1");
  const json& ja = j.at("a");
  if (!ja.is_array() || static_cast<int>(ja.size()) != rows)
    throw ContractViolation("polyhedron: a must have one entry per row");
  Vector a(rows);
  for (int i = 0; i < rows; ++i) a(i) = ja[i].get<double>();
  const Matrix A = d > 0 ? matrix_from_json(j.at("A"), rows, d, "A") : Matrix(rows, 0);
  const Matrix Ap = m > 0 ? matrix_from_json(j.at("Aprime"), rows, m, "Aprime") : Matrix(rows, 0);
  return HPolyhedronProj(a, A, Ap);
}

LoadedInstance instance_from_json(const json& j, const std::string& source) {
  if (j.contains("rows")) {
    HPolyhedronProj h = polyhedron_from_json(j);
    return LoadedInstance{source, polyhedron_to_normal_form(h), h};
  }
  return LoadedInstance{source, pencil_from_json(j), std::nullopt};
}

LoadedInstance load_instance(const std::string& source) {
  if (source.rfind("lift:", 0) == 0) {
    const LoadedInstance base = load_instance(source.substr(5));
    std::optional<HPolyhedronProj> h;
    if (base.polyhedron) {
      Matrix A(base.polyhedron->rows(), base.polyhedron->d() + base.polyhedron->m());
      A << base.polyhedron->A, base.polyhedron->Aprime;
      h = HPolyhedronProj(base.polyhedron->a, A);
    }
    return LoadedInstance{source, lift(base.pencil), h};
  }
  if (source.rfind("ball:", 0) == 0) {
    const auto parts = split(source, ':');
    if (parts.size() != 3) throw ContractViolation("ball source must be ball:d:r");
    int d = 0;
    double r = 0.0;
    try {
      d = std::stoi(parts[1]);
      r = std::stod(parts[2]);
    } catch (const std::exception&) {
      throw ContractViolation("ball source must be ball:d:r, got '" + source + "'");
    }
    if (d < 1) throw ContractViolation("ball dimension must be positive");
    return LoadedInstance{source, ball_pencil(d, r), std::nullopt};
  }
  if (source.rfind("builtin:", 0) == 0) {
    const std::string name = source.substr(8);
    if (auto h = polyhedron_instance(name))
      return LoadedInstance{source, polyhedron_to_normal_form(*h), h};
    return LoadedInstance{source, instance(name), std::nullopt};
  }
  std::ifstream in(source);
  if (!in) throw LookupError("cannot open instance '" + source + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ContractViolation("instance '" + source + "': " + e.what());
  }
  try {
    return instance_from_json(j, source);
  } catch (const json::exception& e) {
    throw ContractViolation("instance '" + source + "': " + e.what());
  }
}

json to_json(const LinearPencil& p) {
  json ax = json::array();
  json ay = json::array();
  for (const auto& m : p.ax()) ax.push_back(matrix_json(m.mat()));
  for (const auto& m : p.ay()) ay.push_back(matrix_json(m.mat()));
  return {{"k", p.k()}, {"d", p.d()}, {"m", p.m()}, {"A0", matrix_json(p.a0().mat())},
          {"Ax", ax},   {"Ay", ay}};
}

json to_json(const HPolyhedronProj& h) {
  return {{"rows", h.rows()}, {"d", h.d()},         {"m", h.m()},
          {"a", vector_json(h.a)}, {"A", matrix_json(h.A)}, {"Aprime", matrix_json(h.Aprime)}};
}

json to_json(const Verdict& v) {
  json out;
  out["status"] = to_string(v.status);
  out["method"] = v.method;
  out["order"] = v.order >= 0 ? json(v.order) : json(nullptr);
  out["mu"] = v.mu ? number(*v.mu) : json(nullptr);
  json seq = json::array();
  for (double m : v.mu_sequence) seq.push_back(number(m));
  out["mu_sequence"] = seq;
  const bool witness = std::holds_alternative<Witness>(v.evidence);
  out[witness ? "witness" : "certificate"] = evidence_json(v.evidence);
  out["residuals"] = {{"max", v.residual}};
  if (v.system_feasible) out["system_feasible"] = *v.system_feasible;
  if (!v.note.empty()) out["note"] = v.note;
  out["wall_time_ms"] = v.wall_time_ms;
  return out;
}

}  // namespace spectainer
