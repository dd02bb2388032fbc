#include "dfnvem/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "dfnvem/errors.hpp"
#include "dfnvem/structured.hpp"

namespace dfn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Axis-aligned rectangle in frame coordinates, or nothing.
bool frame_rectangle(const std::vector<Vec2>& poly, double tol, Vec2& lo, Vec2& hi) {
  if (poly.size() != 4) return false;
  lo = hi = poly[0];
  for (const auto& q : poly) {
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  for (const auto& q : poly) {
    const bool x_ok = std::abs(q.x() - lo.x()) <= tol || std::abs(q.x() - hi.x()) <= tol;
    const bool y_ok = std::abs(q.y() - lo.y()) <= tol || std::abs(q.y() - hi.y()) <= tol;
    if (!x_ok || !y_ok) return false;
  }
  return true;
}

std::vector<Mat2> lambdas_for(const PolyMesh& m, const Fracture& fr, const MeshOptions& opt) {
  std::vector<Mat2> lam(m.n_cells(), fr.lambda());
  if (opt.lambda)
    for (int c = 0; c < m.n_cells(); ++c) lam[c] = opt.lambda(fr.id, m.centroid[c]);
  return lam;
}

template <class F>
void parallel_for(int n, int threads, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nt = std::clamp(threads, 1, std::max(1, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

PolyMesh fracture_mesh(const Fracture& fr, const std::vector<IntersectionLine>& lines, MeshFamily family,
                       const MeshOptions& opt, double tol) {
  if (!(opt.h > 0)) throw ConfigError("mesh size must be positive");
  if (family == MeshFamily::triangular) return triangulate(fr, lines, opt.h, tol, opt.triangulate);
  if (family == MeshFamily::coarse) throw ConfigError("coarse is not a base mesh family");

  Vec2 lo, hi;
  const double gtol = std::max(tol, 1e-12);
  if (!frame_rectangle(fr.polygon, 1e3 * gtol, lo, hi))
    throw ConfigError(std::string(family_name(family)) + " grids need rectangular fractures (fracture " +
                      std::to_string(fr.id) + ")");
  const Vec2 size = hi - lo;
  const int nx = std::max(1, int(std::lround(size.x() / opt.h)));
  const int ny = std::max(1, int(std::lround(size.y() / opt.h)));
  PolyMesh m = cartesian_mesh(lo, hi, nx, ny);
  for (const auto& l : lines) {
    if (std::find(l.parents.begin(), l.parents.end(), fr.id) == l.parents.end()) continue;
    const Vec2 a = fr.frame.to_local(l.a), b = fr.frame.to_local(l.b);
    tag_trace(m, a, b, l.id, 1e3 * gtol);
    double covered = 0;
    for (int e = 0; e < m.n_edges(); ++e)
      if (m.edges[e].kind == EdgeKind::trace && m.edges[e].tag == l.id) covered += m.edge_length(e);
    if (std::abs(covered - (b - a).norm()) > 1e-6 * (b - a).norm())
      throw ConfigError("grid lines do not follow trace " + std::to_string(l.id) + " in fracture " +
                        std::to_string(fr.id));
  }
  tag_boundary(m, fr.polygon, 1e3 * gtol);
  if (family == MeshFamily::random) {
    const double cell = std::min(size.x() / nx, size.y() / ny);
    jiggle_nodes(m, opt.jiggle * cell, opt.seed + uint64_t(fr.id));
  }
  return m;
}

MeshResult build_mesh(const FractureNetwork& net, const MeshOptions& opt) {
  const int nf = int(net.fractures.size());
  if (nf == 0) throw EmptyDomain("network has no fractures");
  const bool coarse = opt.family == MeshFamily::coarse;
  const MeshFamily base = coarse ? opt.coarse_base : opt.family;
  if (coarse && opt.c_depth < 0) throw ConfigError("c_depth must be non-negative");
  MeshResult r;
  r.mesh.fractures.resize(nf);
  r.cell_lambda.resize(nf);
  r.fine_cells.resize(nf);
  if (coarse) r.partitions.resize(nf);
  parallel_for(nf, opt.threads, [&](int f) {
    const Fracture& fr = net.fractures[f];
    PolyMesh m = fracture_mesh(fr, net.lines, base, opt, net.tol);
    r.fine_cells[f] = m.n_cells();
    auto lam = lambdas_for(m, fr, opt);
    if (coarse) {
      CoarseResult cr = agglomerate(m, lam, opt.c_depth, opt.eps_str, opt.tpfa);
      m = std::move(cr.mesh);
      lam = std::move(cr.lambda);
      r.partitions[f] = std::move(cr.partition);
    }
    r.mesh.fractures[f] = std::move(m);
    r.cell_lambda[f] = std::move(lam);
  });
  corefine(r.mesh, net);
  for (int f = 0; f < nf; ++f) r.mesh.fractures[f] = split_interface_dofs(r.mesh.fractures[f], net.fractures[f], net.lines);
  build_incidence(r.mesh, net);
  return r;
}

void validate(const FractureNetwork& net, Model model) {
  if (model != Model::dc) return;
  for (const auto& l : net.lines)
    if (!l.k_hat || !l.k_tilde)
      throw ConfigError("the dc model needs k_hat and k_tilde on every intersection (line " + std::to_string(l.id) +
                        ")");
}

RunResult run(const FractureNetwork& net, Model model, ProblemData data, const MeshOptions& mopt,
              const SolverOptions& sopt, const ExactSolution* exact) {
  validate(net, model);
  RunResult r;
  auto t = Clock::now();
  r.mesh = build_mesh(net, mopt);
  r.timings.mesh = seconds_since(t);

  t = Clock::now();
  data.cell_lambda = r.mesh.cell_lambda;
  const DofMap dofs = build_dof_map(r.mesh.mesh, net, model);
  r.system = assemble(r.mesh.mesh, net, dofs, data);
  r.timings.assemble = seconds_since(t);

  t = Clock::now();
  r.solve = solve(r.system, sopt);
  r.timings.solve = seconds_since(t);

  t = Clock::now();
  r.solution = extract_solution(r.mesh.mesh, net, r.system, r.solve.x, data);
  r.report = summarize(r.mesh.mesh, r.system, r.solution);
  if (exact && exact->fracture()) relative_errors(r.report, r.mesh.mesh, net, r.solution, *exact);
  r.balance = flux_balance(r.mesh.mesh, net, r.solution, data);
  r.timings.post = seconds_since(t);
  r.data = std::move(data);
  return r;
}

MeshOptions case_mesh_options(const BenchmarkCase& c, MeshFamily family, int level) {
  MeshOptions o;
  o.family = family;
  o.h = level_size(c, level);
  o.coarse_base = c.coarse_base;
  o.c_depth = c.c_depth;
  o.jiggle = c.jiggle;
  o.seed = 20170501 + uint64_t(level);
  return o;
}

RunResult run_case(const BenchmarkCase& c, MeshFamily family, int level, const SolverOptions& sopt, int threads) {
  MeshOptions o = case_mesh_options(c, family, level);
  o.threads = threads;
  RunResult r = run(c.network, c.model, c.data, o, sopt, &c.exact);
  r.report.level = level;
  return r;
}

Ladder convergence(const BenchmarkCase& c, MeshFamily family, int levels, const SolverOptions& sopt, int threads) {
  if (levels < 1) throw ConfigError("at least one level is needed");
  Ladder ladder;
  for (int l = 1; l <= levels; ++l) {
    RunResult r = run_case(c, family, l, sopt, threads);
    ladder.levels.push_back(r.report);
    ladder.timings.push_back(r.timings);
  }
  ladder.orders = convergence_orders(ladder.levels);
  return ladder;
}

int resolve_threads(int requested) {
  if (const char* env = std::getenv("DFN_VEM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return int(v);
  }
  return std::max(1, requested);
}

}  // namespace dfn
