#include "dfnvem/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dfnvem/errors.hpp"

namespace dfn {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.precision(12);
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

double ratio(double num, double den) { return den > 0 ? std::sqrt(num / den) : std::sqrt(num); }

}  // namespace

Solution extract_solution(const NetworkMesh& mesh, const FractureNetwork& net, const SaddleSystem& sys,
                          const VecX& x, const ProblemData& data) {
  const DofMap& d = sys.dofs;
  if (x.size() != d.size()) throw ConfigError("solution vector does not match the dof map");
  Solution s;
  const int nf = int(mesh.fractures.size());
  for (int f = 0; f < nf; ++f) {
    const PolyMesh& m = mesh.fractures[f];
    const Fracture& fr = net.fractures[f];
    s.pressure.push_back(x.segment(d.cell_offset[f], m.n_cells()));
    s.flux.push_back(x.segment(d.edge_offset[f], m.n_edges()));
    const auto lam = cell_lambdas(m, fr, data, f);
    const double stab = fracture_stabilization(lam, data, f);
    std::vector<Vec3> vel(m.n_cells());
    for (int c = 0; c < m.n_cells(); ++c) {
      const Cell& cell = m.cells[c];
      const LocalElement2D el = local_matrices_2d(m, c, lam[c], stab);
      VecX out(cell.edges.size());
      for (size_t k = 0; k < cell.edges.size(); ++k) out[k] = cell.signs[k] * x[d.edge_dof(f, cell.edges[k])];
      vel[c] = fr.frame.vector_to_global(project_velocity(el, out));
    }
    s.velocity.push_back(std::move(vel));
  }
  const int nl = int(mesh.traces.size());
  s.line_pressure.resize(nl);
  s.line_velocity.resize(nl);
  s.line_flux.resize(nl);
  for (int l = 0; l < nl; ++l) {
    const int ne = mesh.traces[l].n_elements();
    if (d.model == Model::cc) {
      s.line_pressure[l] = x.segment(d.line_multiplier_offset[l], ne);
      continue;
    }
    s.line_pressure[l] = x.segment(d.line_cell_offset[l], ne);
    s.line_velocity[l].resize(ne);
    for (int t = 0; t < ne; ++t) {
      const double a = x[d.line_flux[l][t][0]], b = x[d.line_flux[l][t][1]];
      s.line_flux[l].push_back({a, b});
      s.line_velocity[l][t] = 0.5 * (a + b);
    }
  }
  return s;
}

double sparsity(const SystemMatrix& A) {
  const double n = double(A.rows());
  return n > 0 ? double(A.nonZeros()) / (n * n) : 0.0;
}

ErrorReport summarize(const NetworkMesh& mesh, const SaddleSystem& sys, const Solution& sol) {
  ErrorReport r;
  double hsum = 0, esum = 0;
  r.edges_min = 1 << 30;
  r.min_p = std::numeric_limits<double>::max();
  r.max_p = std::numeric_limits<double>::lowest();
  for (size_t f = 0; f < mesh.fractures.size(); ++f) {
    const PolyMesh& m = mesh.fractures[f];
    for (int c = 0; c < m.n_cells(); ++c) {
      hsum += m.diameter[c];
      r.h_max = std::max(r.h_max, m.diameter[c]);
      const int ne = int(m.cells[c].edges.size());
      r.edges_min = std::min(r.edges_min, ne);
      r.edges_max = std::max(r.edges_max, ne);
      esum += ne;
      ++r.n_cells;
    }
    if (f < sol.pressure.size() && sol.pressure[f].size() > 0) {
      r.min_p = std::min(r.min_p, sol.pressure[f].minCoeff());
      r.max_p = std::max(r.max_p, sol.pressure[f].maxCoeff());
    }
  }
  if (r.n_cells > 0) {
    r.h_avg = hsum / r.n_cells;
    r.edges_avg = esum / r.n_cells;
  } else {
    r.edges_min = 0;
  }
  for (const auto& tm : mesh.traces)
    for (int t = 0; t < tm.n_elements(); ++t) r.h_line = std::max(r.h_line, tm.element_length(t));
  if (sys.dofs.model == Model::dc)
    for (const auto& lp : sol.line_pressure) {
      if (lp.size() == 0) continue;
      r.min_p_hat = std::isnan(r.min_p_hat) ? lp.minCoeff() : std::min(r.min_p_hat, lp.minCoeff());
      r.max_p_hat = std::isnan(r.max_p_hat) ? lp.maxCoeff() : std::max(r.max_p_hat, lp.maxCoeff());
    }
  r.size = int(sys.A.rows());
  r.nnz = long(sys.A.nonZeros());
  r.sparsity = sparsity(sys.A);
  return r;
}

void relative_errors(ErrorReport& r, const NetworkMesh& mesh, const FractureNetwork& net, const Solution& sol,
                     const ExactSolution& exact) {
  if (!exact.fracture()) throw MissingExactSolution("case has no exact pressure and velocity");
  double ep = 0, np = 0, ev = 0, nv = 0;
  Vec3 ek = Vec3::Zero(), nk = Vec3::Zero();
  for (size_t f = 0; f < mesh.fractures.size(); ++f) {
    const PolyMesh& m = mesh.fractures[f];
    const Fracture& fr = net.fractures[f];
    for (int c = 0; c < m.n_cells(); ++c) {
      const Vec3 x = fr.frame.to_global(m.centroid[c]);
      const double a = m.area[c];
      const double p = exact.p(int(f), x);
      const Vec3 u = exact.u(int(f), x);
      ep += a * std::pow(sol.pressure[f][c] - p, 2);
      np += a * p * p;
      const Vec3 du = sol.velocity[f][c] - u;
      ev += a * du.squaredNorm();
      nv += a * u.squaredNorm();
      ek += a * du.cwiseAbs2();
      nk += a * u.cwiseAbs2();
    }
  }
  r.err_p = ratio(ep, np);
  r.err_u_vector = ratio(ev, nv);
  double acc = 0;
  for (int k = 0; k < 3; ++k)
    if (nk[k] > 1e-24 * nk.sum()) acc += ek[k] / nk[k];
  r.err_u = std::sqrt(acc);

  if (!exact.line()) return;
  double eph = 0, nph = 0, euh = 0, nuh = 0;
  bool any = false;
  for (size_t l = 0; l < mesh.traces.size(); ++l) {
    const TraceMesh& tm = mesh.traces[l];
    if (sol.line_velocity[l].size() == 0) continue;
    any = true;
    for (int t = 0; t < tm.n_elements(); ++t) {
      const double len = tm.element_length(t);
      const Vec3 x = net.lines[l].at(0.5 * (tm.breakpoints[t] + tm.breakpoints[t + 1]));
      const double p = exact.p_hat(int(l), x), u = exact.u_hat(int(l), x);
      eph += len * std::pow(sol.line_pressure[l][t] - p, 2);
      nph += len * p * p;
      euh += len * std::pow(sol.line_velocity[l][t] - u, 2);
      nuh += len * u * u;
    }
  }
  if (any) {
    r.err_p_hat = ratio(eph, nph);
    r.err_u_hat = ratio(euh, nuh);
  }
}

double convergence_order(double e0, double e1, double h0, double h1) {
  return std::log(e0 / e1) / std::log(h0 / h1);
}

Orders convergence_orders(const std::vector<ErrorReport>& ladder) {
  Orders o;
  for (size_t k = 1; k < ladder.size(); ++k) {
    const auto& a = ladder[k - 1];
    const auto& b = ladder[k];
    o.p.push_back(convergence_order(a.err_p, b.err_p, a.h_avg, b.h_avg));
    o.u.push_back(convergence_order(a.err_u, b.err_u, a.h_avg, b.h_avg));
    o.p_hat.push_back(convergence_order(a.err_p_hat, b.err_p_hat, a.h_line, b.h_line));
    o.u_hat.push_back(convergence_order(a.err_u_hat, b.err_u_hat, a.h_line, b.h_line));
  }
  return o;
}

double FluxBalance::imbalance() const {
  const double scale = std::max({inflow, outflow, std::abs(sources)});
  return scale > 0 ? std::abs(outflow - inflow - sources) / scale : 0.0;
}

FluxBalance flux_balance(const NetworkMesh& mesh, const FractureNetwork& net, const Solution& sol,
                         const ProblemData& data) {
  FluxBalance b;
  auto add = [&b](double out) {
    if (out > 0) b.outflow += out;
    else b.inflow -= out;
  };
  for (size_t f = 0; f < mesh.fractures.size(); ++f) {
    const PolyMesh& m = mesh.fractures[f];
    const auto ec = m.edge_cells();
    for (int c = 0; c < m.n_cells(); ++c) {
      const Cell& cell = m.cells[c];
      for (size_t k = 0; k < cell.edges.size(); ++k) {
        const int e = cell.edges[k];
        if (ec[e][1] < 0 && m.edges[e].kind != EdgeKind::trace) add(cell.signs[k] * sol.flux[f][e]);
      }
      if (data.f) b.sources += data.f(int(f), net.fractures[f].frame.to_global(m.centroid[c])) * m.area[c];
    }
  }
  for (const auto& ps : data.point_sources) b.sources += ps.q;
  for (size_t l = 0; l < mesh.traces.size(); ++l) {
    if (l >= sol.line_flux.size() || sol.line_flux[l].empty()) continue;
    const TraceMesh& tm = mesh.traces[l];
    const IntersectionLine& line = net.lines[l];
    const int ne = tm.n_elements();
    for (int end = 0; end < 2; ++end) {
      const Vec3 x = line.at(end == 0 ? tm.breakpoints.front() : tm.breakpoints.back());
      bool junction = false;
      for (const auto& p : net.points)
        if (std::find(p.lines.begin(), p.lines.end(), int(l)) != p.lines.end() && (p.x - x).norm() <= 1e3 * net.tol)
          junction = true;
      if (!junction) add(end == 0 ? -sol.line_flux[l][0][0] : sol.line_flux[l][ne - 1][1]);
    }
    if (data.f_hat)
      for (int t = 0; t < ne; ++t)
        b.sources += data.f_hat(int(l), line.at(0.5 * (tm.breakpoints[t] + tm.breakpoints[t + 1]))) *
                     tm.element_length(t);
  }
  return b;
}

void write_vtk(const std::string& path, const NetworkMesh& mesh, const FractureNetwork& net, const Solution& sol) {
  std::vector<Vec3> points;
  std::vector<std::vector<int>> cells;
  std::vector<int> types, kind, entity;
  std::vector<double> pressure;
  std::vector<Vec3> velocity;
  for (size_t f = 0; f < mesh.fractures.size(); ++f) {
    const PolyMesh& m = mesh.fractures[f];
    const int base = int(points.size());
    for (const auto& q : m.nodes) points.push_back(net.fractures[f].frame.to_global(q));
    for (int c = 0; c < m.n_cells(); ++c) {
      auto loop = m.cell_nodes(c);
      for (int& v : loop) v += base;
      cells.push_back(std::move(loop));
      types.push_back(7);
      kind.push_back(0);
      entity.push_back(int(f));
      pressure.push_back(f < sol.pressure.size() ? sol.pressure[f][c] : 0.0);
      velocity.push_back(f < sol.velocity.size() ? sol.velocity[f][c] : Vec3::Zero());
    }
  }
  for (size_t l = 0; l < mesh.traces.size(); ++l) {
    const TraceMesh& tm = mesh.traces[l];
    const IntersectionLine& line = net.lines[l];
    const int base = int(points.size());
    for (double s : tm.breakpoints) points.push_back(line.at(s));
    for (int t = 0; t < tm.n_elements(); ++t) {
      cells.push_back({base + t, base + t + 1});
      types.push_back(3);
      kind.push_back(1);
      entity.push_back(int(l));
      const bool has_p = l < sol.line_pressure.size() && sol.line_pressure[l].size() > t;
      const bool has_u = l < sol.line_velocity.size() && sol.line_velocity[l].size() > t;
      pressure.push_back(has_p ? sol.line_pressure[l][t] : 0.0);
      velocity.push_back(has_u ? Vec3(sol.line_velocity[l][t] * line.tangent()) : Vec3::Zero());
    }
  }
  auto out = open_output(path);
  out << "# vtk DataFile Version 4.2\ndfnvem solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << points.size() << " double\n";
  for (const auto& p : points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  size_t total = 0;
  for (const auto& c : cells) total += c.size() + 1;
  out << "CELLS " << cells.size() << ' ' << total << '\n';
  for (const auto& c : cells) {
    out << c.size();
    for (int v : c) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << cells.size() << '\n';
  for (int t : types) out << t << '\n';
  out << "CELL_DATA " << cells.size() << '\n';
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (double p : pressure) out << p << '\n';
  out << "VECTORS velocity double\n";
  for (const auto& v : velocity) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  out << "SCALARS kind int 1\nLOOKUP_TABLE default\n";
  for (int k : kind) out << k << '\n';
  out << "SCALARS entity int 1\nLOOKUP_TABLE default\n";
  for (int e : entity) out << e << '\n';
  close_output(out, path);
}

void write_csv(const std::string& path, const std::vector<ErrorReport>& ladder) {
  const Orders o = convergence_orders(ladder);
  bool lines = false;
  for (const auto& r : ladder) lines = lines || std::isfinite(r.err_p_hat);
  auto out = open_output(path);
  out << "level,h,h_max,err_p,order_p,err_u,order_u,faces_min,faces_avg,faces_max,min_p,max_p,size,sparsity";
  if (lines) out << ",h_line,err_p_hat,order_p_hat,err_u_hat,order_u_hat,min_p_hat,max_p_hat";
  out << '\n';
  for (size_t k = 0; k < ladder.size(); ++k) {
    const auto& r = ladder[k];
    auto order = [&](const std::vector<double>& v) { return k == 0 ? std::string() : num(v[k - 1]); };
    out << r.level << ',' << num(r.h_avg) << ',' << num(r.h_max) << ',' << num(r.err_p) << ',' << order(o.p) << ','
        << num(r.err_u) << ',' << order(o.u) << ',' << r.edges_min << ',' << num(r.edges_avg) << ',' << r.edges_max
        << ',' << num(r.min_p) << ',' << num(r.max_p) << ',' << r.size << ',' << num(r.sparsity);
    if (lines)
      out << ',' << num(r.h_line) << ',' << num(r.err_p_hat) << ',' << order(o.p_hat) << ',' << num(r.err_u_hat)
          << ',' << order(o.u_hat) << ',' << num(r.min_p_hat) << ',' << num(r.max_p_hat);
    out << '\n';
  }
  close_output(out, path);
}

void write_partition_csv(const std::string& path, const std::vector<CoarsePartition>& partitions) {
  auto out = open_output(path);
  out << "fracture,cell,coarse\n";
  for (size_t f = 0; f < partitions.size(); ++f)
    for (size_t c = 0; c < partitions[f].coarse_of.size(); ++c)
      out << f << ',' << c << ',' << partitions[f].coarse_of[c] << '\n';
  close_output(out, path);
}

void write_local_matrices_csv(const std::string& path, const LocalElement2D& el) {
  auto out = open_output(path);
  out.precision(17);
  out << "block,row,col,value\n";
  auto dump = [&](const char* name, const MatX& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) out << name << ',' << i << ',' << j << ',' << m(i, j) << '\n';
  };
  dump("G", el.G);
  dump("F", el.F);
  dump("Pi", el.Pi);
  dump("D", el.D);
  dump("M", el.M);
  dump("B", el.B);
  close_output(out, path);
}

}  // namespace dfn
