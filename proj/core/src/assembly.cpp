#include "dfnvem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "dfnvem/errors.hpp"

namespace dfn {

namespace {

struct Attachment {
  int dof;
  int sign;  // outward sign from the element into the point
};

// 1D flux dofs of a line that meet at an intersection point.
std::vector<Attachment> point_attachments(const IntersectionPoint& p, const IntersectionLine& l, const TraceMesh& tm,
                                          const DofMap& dofs, double tol) {
  const double s = l.param(p.x);
  const auto& bp = tm.breakpoints;
  const auto& fl = dofs.line_flux[l.id];
  const int ne = tm.n_elements();
  if (std::abs(s - bp.front()) <= tol) return {{fl[0][0], -1}};
  if (std::abs(s - bp.back()) <= tol) return {{fl[ne - 1][1], 1}};
  for (int k = 1; k < ne; ++k)
    if (std::abs(s - bp[k]) <= tol) return {{fl[k - 1][1], 1}, {fl[k][0], -1}};
  throw MeshError("intersection point is not a breakpoint of line " + std::to_string(l.id));
}

double point_tol(const FractureNetwork& net) { return 1e3 * net.tol; }

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

std::vector<int> outward_sign(const PolyMesh& m) {
  std::vector<int> s(m.n_edges(), 0);
  for (const auto& c : m.cells)
    for (size_t k = 0; k < c.edges.size(); ++k)
      if (s[c.edges[k]] == 0) s[c.edges[k]] = c.signs[k];
  return s;
}

int nearest_cell(const PolyMesh& m, const Vec2& x) {
  int best = 0;
  double bd = std::numeric_limits<double>::max();
  for (int c = 0; c < m.n_cells(); ++c) {
    const double d = (m.centroid[c] - x).squaredNorm();
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

DofMap build_dof_map(const NetworkMesh& mesh, const FractureNetwork& net, Model model) {
  DofMap d;
  d.model = model;
  const int nf = int(mesh.fractures.size());
  const int nl = int(net.lines.size());
  int n = 0;
  for (int f = 0; f < nf; ++f) {
    d.edge_offset.push_back(n);
    n += mesh.fractures[f].n_edges();
  }
  if (model == Model::dc) {
    d.line_flux.resize(nl);
    for (int l = 0; l < nl; ++l) {
      const TraceMesh& tm = mesh.traces[l];
      const int ne = tm.n_elements();
      std::vector<char> split(ne + 1, 0);
      for (const auto& p : net.points) {
        if (std::find(p.lines.begin(), p.lines.end(), l) == p.lines.end()) continue;
        const double s = net.lines[l].param(p.x);
        for (int k = 1; k < ne; ++k)
          if (std::abs(s - tm.breakpoints[k]) <= point_tol(net)) split[k] = 1;
      }
      d.line_flux[l].resize(ne);
      int left = n++;
      for (int t = 0; t < ne; ++t) {
        const int right = n++;
        d.line_flux[l][t] = {left, right};
        left = (t + 1 < ne && split[t + 1]) ? n++ : right;
      }
    }
  }
  d.n_flux = n;
  for (int f = 0; f < nf; ++f) {
    d.cell_offset.push_back(n);
    n += mesh.fractures[f].n_cells();
  }
  if (model == Model::dc)
    for (int l = 0; l < nl; ++l) {
      d.line_cell_offset.push_back(n);
      n += mesh.traces[l].n_elements();
    }
  d.n_pressure = n - d.n_flux;
  if (model == Model::cc)
    for (int l = 0; l < nl; ++l) {
      d.line_multiplier_offset.push_back(n);
      n += mesh.traces[l].n_elements();
    }
  else
    for (size_t p = 0; p < net.points.size(); ++p) d.point_multiplier.push_back(n++);
  d.n_multiplier = n - d.n_flux - d.n_pressure;
  return d;
}

std::vector<Mat2> cell_lambdas(const PolyMesh& mesh, const Fracture& fracture, const ProblemData& data, int f) {
  if (f < int(data.cell_lambda.size()) && !data.cell_lambda[f].empty()) {
    if (int(data.cell_lambda[f].size()) != mesh.n_cells())
      throw ConfigError("per-cell permeability count does not match fracture " + std::to_string(f));
    return data.cell_lambda[f];
  }
  return std::vector<Mat2>(mesh.n_cells(), fracture.lambda());
}

double fracture_stabilization(const std::vector<Mat2>& lambdas, const ProblemData& data, int f) {
  if (f < int(data.stabilization.size()) && data.stabilization[f] > 0) return data.stabilization[f];
  return stabilization_scale(lambdas);
}

SaddleSystem apply_bc(const RawSystem& raw, const DofMap& dofs, std::vector<std::pair<int, double>> fixed) {
  const int n = dofs.size();
  std::sort(fixed.begin(), fixed.end());
  std::vector<std::pair<int, double>> uniq;
  for (const auto& fx : fixed) {
    if (!uniq.empty() && uniq.back().first == fx.first) {
      if (std::abs(uniq.back().second - fx.second) > 1e-14 * (1 + std::abs(fx.second)))
        throw ConflictingBC("dof " + std::to_string(fx.first) + " fixed to two values");
      continue;
    }
    uniq.push_back(fx);
  }
  std::vector<char> is_fixed(n, 0);
  VecX val = VecX::Zero(n);
  for (const auto& [i, v] : uniq) {
    is_fixed[i] = 1;
    val[i] = v;
  }
  SaddleSystem sys;
  sys.dofs = dofs;
  sys.b = raw.b;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(raw.triplets.size() + uniq.size());
  for (const auto& t : raw.triplets) {
    if (is_fixed[t.row()]) continue;
    if (is_fixed[t.col()]) {
      sys.b[t.row()] -= t.value() * val[t.col()];
      continue;
    }
    trip.push_back(t);
  }
  for (const auto& [i, v] : uniq) {
    trip.emplace_back(i, i, 1.0);
    sys.b[i] = v;
  }
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.prune(0.0);
  sys.fixed = std::move(uniq);
  return sys;
}

SaddleSystem assemble(const NetworkMesh& mesh, const FractureNetwork& net, const DofMap& dofs,
                      const ProblemData& data) {
  const bool dc = dofs.model == Model::dc;
  const int nf = int(mesh.fractures.size());
  const int nl = int(net.lines.size());
  if (dc)
    for (const auto& l : net.lines)
      if (!l.k_hat || !l.k_tilde)
        throw MissingIntersectionProps("line " + std::to_string(l.id) + " lacks k_hat or k_tilde");

  RawSystem raw;
  raw.b = VecX::Zero(dofs.size());
  auto add = [&](int r, int c, double v) {
    if (v != 0.0) raw.triplets.emplace_back(r, c, v);
  };
  std::vector<std::pair<int, double>> fixed;
  std::vector<char> dirichlet(nf + nl, 0);

  for (int f = 0; f < nf; ++f) {
    const PolyMesh& m = mesh.fractures[f];
    const Fracture& fr = net.fractures[f];
    const auto lam = cell_lambdas(m, fr, data, f);
    const double stab = fracture_stabilization(lam, data, f);
    for (int c = 0; c < m.n_cells(); ++c) {
      const Cell& cell = m.cells[c];
      const LocalElement2D el = local_matrices_2d(m, c, lam[c], stab);
      const int nd = int(cell.edges.size());
      const int pc = dofs.cell_dof(f, c);
      for (int i = 0; i < nd; ++i) {
        const int gi = dofs.edge_dof(f, cell.edges[i]);
        for (int j = 0; j < nd; ++j)
          add(gi, dofs.edge_dof(f, cell.edges[j]), cell.signs[i] * cell.signs[j] * el.M(i, j));
        add(pc, gi, cell.signs[i] * el.B(i));
        add(gi, pc, cell.signs[i] * el.B(i));
      }
      if (data.f) raw.b[pc] -= data.f(f, fr.frame.to_global(m.centroid[c])) * m.area[c];
    }

    std::vector<int> edge_elem(m.n_edges(), -1);
    for (const auto& l : net.lines) {
      const TraceMesh& tm = mesh.traces[l.id];
      for (int t = 0; t < tm.n_elements(); ++t)
        for (const auto& inc : tm.incidence[t])
          if (inc.fracture == f) edge_elem[inc.edge] = t;
    }
    const auto sgn = outward_sign(m);
    const auto ec = m.edge_cells();
    for (int e = 0; e < m.n_edges(); ++e) {
      if (ec[e][1] >= 0) continue;
      const Edge& ed = m.edges[e];
      const int g = dofs.edge_dof(f, e);
      const int s = sgn[e];
      if (ed.kind == EdgeKind::trace) {
        const int t = edge_elem[e];
        if (t < 0) throw MeshError("trace edge without incidence in fracture " + std::to_string(f));
        if (dc) {
          add(g, g, 1.0 / (net.lambda_tilde(ed.tag, f) * m.edge_length(e)));
          const int pt = dofs.line_cell_offset[ed.tag] + t;
          add(g, pt, s);
          add(pt, g, s);
        } else {
          const int lm = dofs.line_multiplier_offset[ed.tag] + t;
          add(g, lm, s);
          add(lm, g, s);
        }
        continue;
      }
      EdgeBC bc;
      if (data.edge_bc) bc = data.edge_bc(f, ed.tag, fr.frame.to_global(m.edge_midpoint(e)));
      if (bc.type == BCType::dirichlet) {
        raw.b[g] -= s * bc.value;
        dirichlet[f] = 1;
      } else {
        fixed.emplace_back(g, s * bc.value * m.edge_length(e));
      }
    }
  }
  for (const auto& ps : data.point_sources) {
    const PolyMesh& m = mesh.fractures.at(ps.fracture);
    const int c = nearest_cell(m, net.fractures[ps.fracture].frame.to_local(ps.x));
    raw.b[dofs.cell_dof(ps.fracture, c)] -= ps.q;
  }

  if (dc) {
    for (int l = 0; l < nl; ++l) {
      const IntersectionLine& line = net.lines[l];
      const TraceMesh& tm = mesh.traces[l];
      const double lh = net.lambda_hat(l);
      for (int t = 0; t < tm.n_elements(); ++t) {
        const LocalElement1D el = local_matrices_1d(tm.element_length(t), lh);
        const Eigen::Matrix2d M = el.M();
        const int g[2] = {dofs.line_flux[l][t][0], dofs.line_flux[l][t][1]};
        const int sg[2] = {-1, 1};
        const int pt = dofs.line_cell_offset[l] + t;
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) add(g[i], g[j], sg[i] * sg[j] * M(i, j));
          add(pt, g[i], sg[i] * el.B(i));
          add(g[i], pt, sg[i] * el.B(i));
        }
        if (data.f_hat) {
          const double mid = 0.5 * (tm.breakpoints[t] + tm.breakpoints[t + 1]);
          raw.b[pt] -= data.f_hat(l, line.at(mid)) * tm.element_length(t);
        }
      }
      for (int end = 0; end < 2; ++end) {
        const Vec3 x = end == 0 ? line.at(tm.breakpoints.front()) : line.at(tm.breakpoints.back());
        bool junction = false;
        for (const auto& p : net.points)
          if (std::find(p.lines.begin(), p.lines.end(), l) != p.lines.end() && (p.x - x).norm() <= point_tol(net))
            junction = true;
        if (junction) continue;
        const int ne = tm.n_elements();
        const int g = end == 0 ? dofs.line_flux[l][0][0] : dofs.line_flux[l][ne - 1][1];
        const int s = end == 0 ? -1 : 1;
        EndpointBC bc;
        if (line.kind[end] == EndpointKind::boundary && data.endpoint_bc) bc = data.endpoint_bc(l, end, x);
        if (bc.type == EndpointType::dirichlet) {
          raw.b[g] -= s * bc.value;
          dirichlet[nf + l] = 1;
        } else {
          fixed.emplace_back(g, 0.0);
        }
      }
    }
    for (const auto& p : net.points) {
      const int mu = dofs.point_multiplier[p.id];
      int attached = 0;
      for (int l : p.lines)
        for (const auto& a : point_attachments(p, net.lines[l], mesh.traces[l], dofs, point_tol(net))) {
          add(a.dof, mu, a.sign);
          add(mu, a.dof, a.sign);
          ++attached;
        }
      if (attached == 0) fixed.emplace_back(mu, 0.0);
    }
  }

  // Components without any Dirichlet data get one pressure pinned.
  std::vector<int> parent(nf + nl);
  std::iota(parent.begin(), parent.end(), 0);
  auto unite = [&](int a, int b) { parent[find_root(parent, a)] = find_root(parent, b); };
  for (const auto& l : net.lines)
    for (int f : l.parents) unite(nf + l.id, f);
  if (dc)
    for (const auto& p : net.points)
      for (size_t k = 1; k < p.lines.size(); ++k) unite(nf + p.lines[0], nf + p.lines[k]);
  std::map<int, bool> constrained;
  for (int i = 0; i < nf + nl; ++i) constrained[find_root(parent, i)] |= bool(dirichlet[i]);
  std::vector<std::string> warnings;
  for (int f = 0; f < nf; ++f) {
    const int r = find_root(parent, f);
    if (constrained[r] || mesh.fractures[f].n_cells() == 0) continue;
    if (!data.pin_floating)
      throw UnconstrainedPressure("fracture " + std::to_string(f) +
                                  " belongs to a component without Dirichlet data");
    fixed.emplace_back(dofs.cell_dof(f, 0), 0.0);
    warnings.push_back("pressure pinned to zero in fracture " + std::to_string(f) +
                       ": component has no Dirichlet data");
    constrained[r] = true;
  }

  SaddleSystem sys = apply_bc(raw, dofs, std::move(fixed));
  sys.warnings = std::move(warnings);
  return sys;
}

SaddleSystem assemble_cc(const NetworkMesh& mesh, const FractureNetwork& net, const DofMap& dofs,
                         const ProblemData& data) {
  if (dofs.model != Model::cc) throw ConfigError("dof map was built for the dc model");
  return assemble(mesh, net, dofs, data);
}

SaddleSystem assemble_dc(const NetworkMesh& mesh, const FractureNetwork& net, const DofMap& dofs,
                         const ProblemData& data) {
  if (dofs.model != Model::dc) throw ConfigError("dof map was built for the cc model");
  return assemble(mesh, net, dofs, data);
}

}  // namespace dfn
