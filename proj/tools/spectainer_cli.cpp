#include "spectainer/containment.hpp"
#include "spectainer/instance_io.hpp"
#include "spectainer/sdpa.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

using namespace spectainer;
using nlohmann::json;

namespace {

constexpr int kExitContained = 0;
constexpr int kExitNotContained = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

struct RunConfig {
  std::string inner;
  std::string outer;
  std::string method = "auto";
  int order = -1;
  double tol = kFeasTol;
  std::optional<double> arch_bound;
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 1;
  double lo = 0.0;
  double hi = 0.0;
  double tol_r = 1e-3;
  int ball_dim = 0;
  int samples = 512;
  bool no_c0 = false;
};

ContainmentOptions options(const RunConfig& c) {
  ContainmentOptions o;
  o.feas_tol = c.tol;
  o.arch_bound = c.arch_bound;
  o.seed = c.seed;
  return o;
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw std::runtime_error("cannot write '" + c.out + "'");
  f << text << "\n";
}

HPolyhedronProj as_polyhedron(const LoadedInstance& li, const char* role) {
  if (li.polyhedron) return *li.polyhedron;
  if (li.pencil.is_diagonal()) return normal_form_to_polyhedron(li.pencil);
  throw ContractViolation(std::string(role) + " set is not a polyhedron");
}

int exit_code(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Contained:
    case VerdictStatus::ContainedInClosure: return kExitContained;
    case VerdictStatus::NotContained: return kExitNotContained;
    case VerdictStatus::Unknown: return kExitUnknown;
  }
  return kExitInternal;
}

int cmd_check(const RunConfig& c) {
  const LoadedInstance in = load_instance(c.inner);
  const LoadedInstance out = load_instance(c.outer);
  const ContainmentOptions opts = options(c);
  const LinearPencil& a = in.pencil;
  const LinearPencil& b = out.pencil;
  const int t = c.order;
  Verdict v;
  json extra;
  if (c.method == "auto") {
    v = check_auto(a, b, opts);
  } else if (c.method == "lp") {
    v = lp_containment(as_polyhedron(in, "inner"), as_polyhedron(out, "outer"), !c.no_c0, opts);
  } else if (c.method == "solitary") {
    v = solitary_criterion(a, b, opts);
  } else if (c.method == "pis-in-h") {
    v = pis_in_h_exact(a, b, opts);
  } else if (c.method == "hierarchy" || c.method == "hierarchy-plain") {
    v = hierarchy(a, b, t < 0 ? 2 : t,
                  c.method == "hierarchy" ? HierarchyMode::Projected : HierarchyMode::Plain, opts);
  } else if (c.method == "bilinear") {
    const int tb = t < 1 ? 2 : t;
    if (a.is_diagonal() && b.is_diagonal())
      v = bilinear_ph_ph(as_polyhedron(in, "inner"), as_polyhedron(out, "outer"), tb, opts);
    else
      v = bilinear_ps_ps(a, b, tb, opts);
  } else if (c.method == "pos-map") {
    const PositiveMapResult r = positive_map_matrix(a, b, opts);
    v = r.solitary;
    extra["psd"] = r.psd;
    extra["completely_positive"] =
        r.completely_positive ? json(*r.completely_positive) : json(nullptr);
    extra["map_residual"] = r.map_residual;
    if (r.chat) {
      json rows = json::array();
      for (int i = 0; i < r.chat->rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < r.chat->cols(); ++j) row.push_back((*r.chat)(i, j));
        rows.push_back(row);
      }
      extra["chat"] = rows;
    }
  } else if (c.method == "oracle") {
    const auto start = std::chrono::steady_clock::now();
    const OracleResult r = sampling_oracle(a, b, c.samples, c.seed, opts);
    v.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    v.method = "oracle";
    if (r.witness) {
      v.status = VerdictStatus::NotContained;
      v.evidence = *r.witness;
    } else {
      v.note = "no counterexample among " + std::to_string(r.tested) + " samples";
    }
    extra["tested"] = r.tested;
  } else {
    throw CLI::ValidationError("--method", "unknown method '" + c.method + "'");
  }
  if (!validate_verdict(a, b, v)) {
    std::cerr << "internal error: verdict evidence failed re-validation\n";
    return kExitInternal;
  }
  json j = to_json(v);
  if (!extra.is_null()) j["extra"] = extra;
  emit(c, j.dump(2));
  return exit_code(v.status);
}

MarginMethod margin_method(const std::string& m) {
  if (m == "solitary") return MarginMethod::Solitary;
  if (m == "hierarchy" || m == "auto") return MarginMethod::Hierarchy;
  throw CLI::ValidationError("--method", "radius supports solitary or hierarchy");
}

int cmd_radius(const RunConfig& c) {
  const LoadedInstance in = load_instance(c.inner);
  const int dim = c.ball_dim > 0 ? c.ball_dim : in.pencil.d();
  if (!(c.hi > c.lo)) throw CLI::ValidationError("--lo/--hi", "need lo < hi");
  const RadiusResult r = circumradius(in.pencil, dim, c.lo, c.hi, c.tol_r,
                                      margin_method(c.method), c.jobs, options(c));
  std::string text;
  char line[128];
  std::snprintf(line, sizeof line, "%-12s %-16s %s\n", "r", "mu(0)", "time_ms");
  text += line;
  for (const auto& row : r.trace) {
    std::snprintf(line, sizeof line, "%-12.8f % -16.6e %.1f\n", row.r, row.mu, row.ms);
    text += line;
  }
  std::snprintf(line, sizeof line, "radius %.6f", r.radius);
  text += line;
  emit(c, text);
  return 0;
}

int cmd_export(const RunConfig& c) {
  const LoadedInstance in = load_instance(c.inner);
  const LoadedInstance out = load_instance(c.outer);
  if (c.out.empty()) throw CLI::ValidationError("--out", "export needs an output path");
  const LinearPencil& a = in.pencil;
  const LinearPencil& b = out.pencil;
  SdpProblem p;
  if (c.method == "bilinear" || b.m() > 0) {
    const int t = c.order < 1 ? 1 : c.order;
    BilinearDomain dom = spectrahedral_bilinear_domain(a, b, Matrix::Identity(b.k(), b.k()));
    if (c.arch_bound) add_archimedean_ball(dom, *c.arch_bound);
    p = compile(build_bilinear_relaxation(dom, t)).sdp.problem;
  } else {
    const int t = c.order < 0 ? 0 : c.order;
    const SosProgram prog = c.method == "hierarchy-plain"
                                ? build_plain_module_membership(a, b, t)
                                : build_projected_module_membership(a, b, t);
    p = compile(prog).sdp.problem;
  }
  export_sdpa(p, c.out);
  std::cout << "wrote " << c.out << " (" << p.num_constraints() << " constraints, "
            << p.blocks.size() << " blocks)\n";
  return 0;
}

int cmd_list() {
  for (const auto& n : instance_names()) {
    const auto h = polyhedron_instance(n);
    const LinearPencil p = instance(n);
    std::printf("%-26s %-10s k=%d d=%d m=%d\n", n.c_str(), h ? "polyhedron" : "pencil", p.k(),
                p.d(), p.m());
  }
  return 0;
}

int cmd_table(const RunConfig& c) {
  struct Row {
    const char* set;
    const char* source;
    int dim;
    double r;
    double ref;
  };
  const double q2 = std::pow(2.0, 0.25);
  const double s21 = std::sqrt(std::sqrt(2.0) + 1.0);
  const std::vector<Row> rows = {
      {"two disks", "builtin:two-disks", 2, 1.99, -0.0050},
      {"two disks", "builtin:two-disks", 2, 2.0, 5.9978e-8},
      {"two disks", "builtin:two-disks", 2, 2.01, 0.0050},
      {"cylinder", "lift:builtin:two-disks", 3, 2.23, -0.0027},
      {"cylinder", "lift:builtin:two-disks", 3, 2.2361, 1.4339e-5},
      {"cylinder", "lift:builtin:two-disks", 3, 2.24, 0.0018},
      {"TV screen", "builtin:tv-screen", 2, 1.18, -0.0078},
      {"TV screen", "builtin:tv-screen", 2, q2, -1.3621e-8},
      {"TV screen", "builtin:tv-screen", 2, 1.19, 6.6628e-4},
      {"TV screen", "builtin:tv-screen", 2, 1.2, 0.0090},
      {"TV lifted", "lift:builtin:tv-screen", 4, 1.55, -0.0024},
      {"TV lifted", "lift:builtin:tv-screen", 4, s21, 3.1037e-9},
      {"TV lifted", "lift:builtin:tv-screen", 4, 1.56, 0.0040},
  };
  const ContainmentOptions opts = options(c);
  std::string text;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-6s %-10s %-10s  %-14s %-14s\n", "set", "ball", "r",
                "time_ms", "mu(0)", "reference");
  text += line;
  for (const auto& row : rows) {
    const LinearPencil a = load_instance(row.source).pencil;
    const auto start = std::chrono::steady_clock::now();
    const double mu = ball_margin(a, row.dim, row.r, MarginMethod::Hierarchy, opts);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    char ball[16];
    std::snprintf(ball, sizeof ball, "%d-ball", row.dim);
    std::snprintf(line, sizeof line, "%-10s %-6s %-10.6f %-10.1f % -14.4e % -14.4e\n", row.set,
                  ball, row.r, ms, mu, row.ref);
    text += line;
  }
  text.pop_back();
  emit(c, text);
  return 0;
}

void add_common(CLI::App* cmd, RunConfig& c, bool outer) {
  cmd->add_option("--inner", c.inner, "inner set: ball:d:r, builtin:name, lift:<src> or JSON path")
      ->required();
  if (outer) cmd->add_option("--outer", c.outer, "outer set")->required();
  cmd->add_option("--method", c.method, "auto|lp|solitary|pis-in-h|hierarchy|hierarchy-plain|bilinear|pos-map|oracle");
  cmd->add_option("--order", c.order, "relaxation order t");
  cmd->add_option("--tol", c.tol, "feasibility tolerance for margins");
  cmd->add_option("--arch-bound", c.arch_bound, "Archimedean bound N for bilinear relaxations");
  cmd->add_option("--seed", c.seed, "seed for sampling and witness search");
  cmd->add_option("--out", c.out, "output path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Containment certificates for projected spectrahedra and polyhedra"};
  app.require_subcommand(1);
  RunConfig c;

  auto* check = app.add_subcommand("check", "decide inner in outer");
  add_common(check, c, true);
  check->add_option("--samples", c.samples, "sample count for the oracle method");
  check->add_flag("--no-c0", c.no_c0, "lp method without the constant multiplier");

  auto* radius = app.add_subcommand("radius", "circumradius by bisection on mu(0)");
  add_common(radius, c, false);
  radius->add_option("--lo", c.lo, "lower radius bracket")->required();
  radius->add_option("--hi", c.hi, "upper radius bracket")->required();
  radius->add_option("--tol-r", c.tol_r, "radius tolerance");
  radius->add_option("--ball-dim", c.ball_dim, "ball dimension (defaults to d)");
  radius->add_option("--jobs", c.jobs, "parallel margin evaluations per round");

  auto* exp = app.add_subcommand("export", "write the compiled SDP in SDPA sparse format");
  add_common(exp, c, true);

  auto* list = app.add_subcommand("list-instances", "print builtin instance names");
  auto* table = app.add_subcommand("table", "recompute the ball-containment margin tables");
  table->add_option("--out", c.out, "output path");
  table->add_option("--tol", c.tol, "feasibility tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  try {
    if (*check) return cmd_check(c);
    if (*radius) return cmd_radius(c);
    if (*exp) return cmd_export(c);
    if (*list) return cmd_list();
    if (*table) return cmd_table(c);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractViolation& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const LookupError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
