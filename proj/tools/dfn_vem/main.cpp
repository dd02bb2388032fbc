#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dfnvem/cases.hpp"
#include "dfnvem/errors.hpp"
#include "dfnvem/mesh_io.hpp"
#include "dfnvem/network_io.hpp"
#include "dfnvem/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kSchema = "dfnvem.summary/1";

struct Config {
  std::string case_name;
  std::string network;
  std::string family = "triangular";
  std::string base = "";
  std::string model;
  int level = 1;
  int levels = 4;
  double h = 0;
  int c_depth = 2;
  double eps_str = 0.25;
  double jiggle = 0.3;
  std::string solver = "direct";
  double tol = 1e-12;
  std::string out = ".";
  int threads = 1;
  bool vtk = true;
  uint64_t seed = 20170501;
};

struct Problem {
  std::string name;
  dfn::FractureNetwork network;
  dfn::ProblemData data;
  dfn::Model model = dfn::Model::cc;
  std::optional<dfn::BenchmarkCase> bench;
};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Problem load(const Config& c) {
  if (c.case_name.empty() == c.network.empty()) throw dfn::ConfigError("give exactly one of --case and --network");
  Problem p;
  if (!c.case_name.empty()) {
    p.bench = dfn::make_case(c.case_name);
    p.name = c.case_name;
    p.network = p.bench->network;
    p.data = p.bench->data;
    p.model = p.bench->model;
  } else {
    dfn::NetworkInput in = dfn::read_network(c.network);
    p.name = fs::path(c.network).stem().string();
    p.network = std::move(in.network);
    p.data = std::move(in.data);
    if (in.model) p.model = *in.model;
  }
  if (c.model == "cc") p.model = dfn::Model::cc;
  else if (c.model == "dc") p.model = dfn::Model::dc;
  else if (!c.model.empty()) throw dfn::ConfigError("unknown model '" + c.model + "'");
  return p;
}

dfn::MeshOptions mesh_options(const Config& c, const Problem& p) {
  const dfn::MeshFamily family = dfn::parse_family(c.family);
  dfn::MeshOptions o;
  if (p.bench) o = dfn::case_mesh_options(*p.bench, family, c.level);
  o.family = family;
  if (c.h > 0) o.h = c.h;
  else if (!p.bench) throw dfn::ConfigError("network runs need --mesh-size");
  if (!c.base.empty()) o.coarse_base = dfn::parse_family(c.base);
  o.c_depth = c.c_depth;
  o.eps_str = c.eps_str;
  o.jiggle = c.jiggle;
  if (!p.bench) o.seed = c.seed;
  o.threads = dfn::resolve_threads(c.threads);
  return o;
}

dfn::SolverOptions solver_options(const Config& c) {
  dfn::SolverOptions s;
  if (c.solver == "direct") s.kind = dfn::SolverKind::direct;
  else if (c.solver == "minres") s.kind = dfn::SolverKind::minres;
  else throw dfn::ConfigError("unknown solver '" + c.solver + "'");
  s.tol = c.tol;
  return s;
}

json report_json(const dfn::ErrorReport& r) {
  return {{"level", r.level},
          {"h", number(r.h_avg)},
          {"h_max", number(r.h_max)},
          {"h_line", number(r.h_line)},
          {"err_p", number(r.err_p)},
          {"err_u", number(r.err_u)},
          {"err_u_vector", number(r.err_u_vector)},
          {"err_p_hat", number(r.err_p_hat)},
          {"err_u_hat", number(r.err_u_hat)},
          {"min_p", number(r.min_p)},
          {"max_p", number(r.max_p)},
          {"min_p_hat", number(r.min_p_hat)},
          {"max_p_hat", number(r.max_p_hat)},
          {"cells", r.n_cells},
          {"faces", {r.edges_min, number(r.edges_avg), r.edges_max}},
          {"size", r.size},
          {"nnz", r.nnz},
          {"sparsity", number(r.sparsity)}};
}

json timings_json(const dfn::Timings& t) {
  return {{"mesh", t.mesh}, {"assemble", t.assemble}, {"solve", t.solve}, {"post", t.post}};
}

json orders_json(const dfn::Orders& o) {
  auto arr = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
  };
  return {{"p", arr(o.p)}, {"u", arr(o.u)}, {"p_hat", arr(o.p_hat)}, {"u_hat", arr(o.u_hat)}};
}

std::string stem(const Problem& p, const Config& c, std::optional<int> level) {
  std::string s = p.name + "_" + c.family;
  if (level) s += "_" + std::to_string(*level);
  return s;
}

void emit(const json& summary, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw dfn::IoError("cannot write '" + path.string() + "'");
  out << summary.dump(2) << '\n';
  std::cout << summary.dump(2) << '\n';
}

json base_summary(const std::string& command, const Problem& p, const Config& c) {
  return {{"schema", kSchema},
          {"command", command},
          {"problem", p.name},
          {"family", c.family},
          {"model", p.model == dfn::Model::cc ? "cc" : "dc"}};
}

int cmd_mesh(const Config& c) {
  const Problem p = load(c);
  const dfn::MeshOptions o = mesh_options(c, p);
  const dfn::MeshResult m = dfn::build_mesh(p.network, o);
  fs::create_directories(c.out);
  const std::string s = stem(p, c, p.bench ? std::optional<int>(c.level) : std::nullopt);
  dfn::write_meshes((fs::path(c.out) / (s + "_mesh.txt")).string(), m.mesh.fractures);
  if (c.vtk) dfn::write_vtk((fs::path(c.out) / (s + "_mesh.vtk")).string(), m.mesh, p.network, dfn::Solution{});
  json fr = json::array();
  for (const auto& pm : m.mesh.fractures) {
    const dfn::MeshStats st = dfn::mesh_stats(pm);
    fr.push_back({{"cells", st.n_cells},
                  {"nodes", st.n_nodes},
                  {"edges", st.n_edges},
                  {"h_avg", st.h_avg},
                  {"h_max", st.h_max},
                  {"faces", {st.edges_min, st.edges_avg, st.edges_max}},
                  {"nonconvex", st.n_nonconvex}});
  }
  json summary = base_summary("mesh", p, c);
  summary["fractures"] = fr;
  summary["lines"] = p.network.lines.size();
  summary["points"] = p.network.points.size();
  emit(summary, fs::path(c.out) / (s + "_summary.json"));
  return 0;
}

int cmd_coarsen(const Config& c) {
  const Problem p = load(c);
  Config cc = c;
  cc.family = "coarse";
  dfn::MeshOptions o = mesh_options(cc, p);
  const dfn::MeshResult m = dfn::build_mesh(p.network, o);
  fs::create_directories(c.out);
  const std::string s = p.name + "_coarse_" + std::to_string(c.c_depth);
  dfn::write_partition_csv((fs::path(c.out) / (s + "_partition.csv")).string(), m.partitions);
  if (c.vtk) dfn::write_vtk((fs::path(c.out) / (s + "_mesh.vtk")).string(), m.mesh, p.network, dfn::Solution{});
  json fr = json::array();
  long fine = 0, coarse = 0;
  for (size_t f = 0; f < m.mesh.fractures.size(); ++f) {
    const dfn::MeshStats st = dfn::mesh_stats(m.mesh.fractures[f]);
    fine += m.fine_cells[f];
    coarse += st.n_cells;
    fr.push_back({{"fine_cells", m.fine_cells[f]},
                  {"cells", st.n_cells},
                  {"edges", st.n_edges},
                  {"faces", {st.edges_min, st.edges_avg, st.edges_max}},
                  {"nonconvex", st.n_nonconvex}});
  }
  json summary = base_summary("coarsen", p, cc);
  summary["c_depth"] = c.c_depth;
  summary["eps_str"] = c.eps_str;
  summary["fractures"] = fr;
  summary["fine_cells"] = fine;
  summary["cells"] = coarse;
  summary["reduction"] = fine > 0 ? 1.0 - double(coarse) / double(fine) : 0.0;
  emit(summary, fs::path(c.out) / (s + "_summary.json"));
  return 0;
}

int cmd_solve(const Config& c) {
  const Problem p = load(c);
  const dfn::MeshOptions o = mesh_options(c, p);
  const dfn::RunResult r =
      dfn::run(p.network, p.model, p.data, o, solver_options(c), p.bench ? &p.bench->exact : nullptr);
  fs::create_directories(c.out);
  const std::string s = stem(p, c, p.bench ? std::optional<int>(c.level) : std::nullopt);
  if (c.vtk) dfn::write_vtk((fs::path(c.out) / (s + ".vtk")).string(), r.mesh.mesh, p.network, r.solution);
  dfn::ErrorReport rep = r.report;
  rep.level = p.bench ? c.level : 0;
  json summary = base_summary("solve", p, c);
  summary["report"] = report_json(rep);
  summary["solver"] = {{"method", r.solve.method}, {"residual", r.solve.residual}, {"iterations", r.solve.iterations}};
  summary["balance"] = {{"inflow", r.balance.inflow},
                        {"outflow", r.balance.outflow},
                        {"sources", r.balance.sources},
                        {"imbalance", r.balance.imbalance()}};
  summary["warnings"] = r.system.warnings;
  summary["timings"] = timings_json(r.timings);
  for (const auto& w : r.system.warnings) std::cerr << "warning: " << w << '\n';
  emit(summary, fs::path(c.out) / (s + "_summary.json"));
  return 0;
}

int cmd_convergence(const Config& c) {
  const Problem p = load(c);
  if (!p.bench) throw dfn::ConfigError("convergence runs need a built-in --case");
  dfn::BenchmarkCase bench = *p.bench;
  bench.model = p.model;
  bench.c_depth = c.c_depth;
  bench.jiggle = c.jiggle;
  if (!c.base.empty()) bench.coarse_base = dfn::parse_family(c.base);
  const dfn::MeshFamily family = dfn::parse_family(c.family);
  const dfn::Ladder ladder =
      dfn::convergence(bench, family, c.levels, solver_options(c), dfn::resolve_threads(c.threads));
  fs::create_directories(c.out);
  const std::string s = stem(p, c, std::nullopt);
  dfn::write_csv((fs::path(c.out) / (s + ".csv")).string(), ladder.levels);
  json levels = json::array(), timings = json::array();
  for (const auto& r : ladder.levels) levels.push_back(report_json(r));
  for (const auto& t : ladder.timings) timings.push_back(timings_json(t));
  json summary = base_summary("convergence", p, c);
  summary["levels"] = levels;
  summary["orders"] = orders_json(ladder.orders);
  summary["timings"] = timings;
  emit(summary, fs::path(c.out) / (s + "_summary.json"));
  return 0;
}

void problem_flags(CLI::App* app, Config& c) {
  app->add_option("--case", c.case_name, "Built-in case: single, two-fractures, intersection-flow, four-fractures");
  app->add_option("--network", c.network, "Network JSON file")->check(CLI::ExistingFile);
  app->add_option("--family", c.family, "Mesh family: cartesian, triangular, random, coarse");
  app->add_option("--base", c.base, "Fine family the coarse family starts from");
  app->add_option("--level", c.level, "Refinement level of a built-in case")->check(CLI::PositiveNumber);
  app->add_option("--mesh-size", c.h, "Target mesh size (overrides --level)");
  app->add_option("--c-depth", c.c_depth, "Coarsening sweeps")->check(CLI::NonNegativeNumber);
  app->add_option("--eps-str", c.eps_str, "Strength of connection threshold")->check(CLI::Range(0.0, 1.0));
  app->add_option("--jiggle", c.jiggle, "Random family node displacement relative to the cell size")
      ->check(CLI::Range(0.0, 0.49));
  app->add_option("--seed", c.seed, "Seed of the random family for network runs");
  app->add_option("--out", c.out, "Output directory");
  app->add_flag("!--no-vtk", c.vtk, "Skip VTK output");
}

void solver_flags(CLI::App* app, Config& c) {
  app->add_option("--model", c.model, "Coupling model: cc or dc");
  app->add_option("--solver", c.solver, "direct or minres");
  app->add_option("--tol", c.tol, "Iterative solver tolerance")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed virtual element Darcy flow in discrete fracture networks"};
  app.require_subcommand(1);
  Config c;
  app.add_option("--threads", c.threads, "Worker threads (DFN_VEM_THREADS overrides)")->check(CLI::PositiveNumber);

  auto* mesh = app.add_subcommand("mesh", "Mesh every fracture and write the mesh");
  problem_flags(mesh, c);
  auto* coarsen = app.add_subcommand("coarsen", "Agglomerate a fine mesh and write the partition");
  problem_flags(coarsen, c);
  auto* solve = app.add_subcommand("solve", "Mesh, assemble and solve one problem");
  problem_flags(solve, c);
  solver_flags(solve, c);
  auto* conv = app.add_subcommand("convergence", "Run a refinement ladder of a built-in case");
  problem_flags(conv, c);
  solver_flags(conv, c);
  conv->add_option("--levels", c.levels, "Number of levels")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*mesh) return cmd_mesh(c);
    if (*coarsen) return cmd_coarsen(c);
    if (*solve) return cmd_solve(c);
    if (*conv) return cmd_convergence(c);
  } catch (const dfn::Error& e) {
    std::cerr << e.what() << '\n';
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "[cli] IoError: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
