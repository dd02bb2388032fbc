#include "dfnvem/traces.hpp"

#include <algorithm>
#include <cmath>

#include "dfnvem/errors.hpp"

namespace dfn {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double node_param(const PolyMesh& m, const Fracture& f, const IntersectionLine& l, int n) {
  return l.param(f.frame.to_global(m.nodes[n]));
}

bool is_trace_of(const Edge& e, int line) { return e.kind == EdgeKind::trace && e.tag == line; }

}  // namespace

int TraceMesh::locate(double s) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
  int i = int(it - breakpoints.begin()) - 1;
  return std::clamp(i, 0, n_elements() - 1);
}

std::vector<double> trace_breakpoints(const PolyMesh& mesh, const Fracture& fracture, const IntersectionLine& line) {
  std::vector<double> s;
  for (const auto& e : mesh.edges) {
    if (!is_trace_of(e, line.id)) continue;
    s.push_back(node_param(mesh, fracture, line, e.n0));
    s.push_back(node_param(mesh, fracture, line, e.n1));
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::vector<double> corefine_breakpoints(const std::vector<std::vector<double>>& drafts, double tol) {
  std::vector<double> all;
  for (size_t i = 0; i < drafts.size(); ++i) {
    if (drafts[i].size() < 2) throw InconsistentEndpoints("a parent has no trace edges");
    if (i > 0 && (std::abs(drafts[i].front() - drafts[0].front()) > tol ||
                  std::abs(drafts[i].back() - drafts[0].back()) > tol))
      throw InconsistentEndpoints("parents disagree on trace endpoints");
    all.insert(all.end(), drafts[i].begin(), drafts[i].end());
  }
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double s : all)
    if (out.empty() || s - out.back() > tol) out.push_back(s);
  return out;
}

void corefine(NetworkMesh& mesh, const FractureNetwork& net) {
  mesh.traces.assign(net.lines.size(), TraceMesh{});
  for (const auto& line : net.lines) {
    std::vector<std::vector<double>> drafts;
    for (int f : line.parents) drafts.push_back(trace_breakpoints(mesh.fractures[f], net.fractures[f], line));
    std::vector<double> bp = corefine_breakpoints(drafts, net.tol);
    for (const auto& p : net.points) {
      if (std::find(p.lines.begin(), p.lines.end(), line.id) == p.lines.end()) continue;
      const double s = line.param(p.x);
      if (s <= bp.front() + net.tol || s >= bp.back() - net.tol) continue;
      bool have = false;
      for (double b : bp) have = have || std::abs(b - s) <= net.tol;
      if (!have) bp.insert(std::upper_bound(bp.begin(), bp.end(), s), s);
    }
    for (int f : line.parents) {
      PolyMesh& m = mesh.fractures[f];
      const Fracture& fr = net.fractures[f];
      for (double s : bp) {
        for (int e = 0; e < m.n_edges(); ++e) {
          if (!is_trace_of(m.edges[e], line.id)) continue;
          double s0 = node_param(m, fr, line, m.edges[e].n0), s1 = node_param(m, fr, line, m.edges[e].n1);
          if (s0 > s1) std::swap(s0, s1);
          if (s > s0 + net.tol && s < s1 - net.tol) {
            split_edge(m, e, fr.frame.to_local(line.at(s)));
            break;
          }
        }
      }
      m.update_geometry();
    }
    mesh.traces[line.id].line = line.id;
    mesh.traces[line.id].breakpoints = bp;
  }
  build_incidence(mesh, net);
}

PolyMesh split_interface_dofs(const PolyMesh& in, const Fracture& fracture, const std::vector<IntersectionLine>& lines) {
  PolyMesh m = in;
  const auto ec = m.edge_cells();
  const int ne = m.n_edges();
  // The cell lies opposite its outward normal; for convex cells this agrees with the centroid test.
  auto side_of = [&](int cell, int e, const IntersectionLine& l) {
    const Vec2 t = fracture.frame.vector_to_local(l.tangent());
    const Cell& c = m.cells[cell];
    int s = 1;
    for (size_t k = 0; k < c.edges.size(); ++k)
      if (c.edges[k] == e) s = c.signs[k];
    const Vec2 inward = -s * m.edge_normal(e);
    return cross2(t, inward) > 0 ? 1 : -1;
  };
  for (int e = 0; e < ne; ++e) {
    if (m.edges[e].kind != EdgeKind::trace) continue;
    const IntersectionLine& l = lines.at(m.edges[e].tag);
    const int c0 = ec[e][0], c1 = ec[e][1];
    if (c1 < 0) {
      m.edges[e].side = side_of(c0, e, l);
      continue;
    }
    const int s0 = side_of(c0, e, l);
    const int minus = s0 < 0 ? c0 : c1;
    m.edges[e].side = 1;
    Edge copy = m.edges[e];
    copy.side = -1;
    const int e2 = m.n_edges();
    m.edges.push_back(copy);
    auto& cell = m.cells[minus];
    for (auto& x : cell.edges)
      if (x == e) x = e2;
  }
  return m;
}

void build_incidence(NetworkMesh& mesh, const FractureNetwork& net) {
  for (auto& tm : mesh.traces) tm.incidence.assign(std::max(0, tm.n_elements()), {});
  for (size_t f = 0; f < mesh.fractures.size(); ++f) {
    const PolyMesh& m = mesh.fractures[f];
    const Fracture& fr = net.fractures[f];
    for (int e = 0; e < m.n_edges(); ++e) {
      const Edge& ed = m.edges[e];
      if (ed.kind != EdgeKind::trace) continue;
      const IntersectionLine& l = net.lines.at(ed.tag);
      TraceMesh& tm = mesh.traces[ed.tag];
      const double s = l.param(fr.frame.to_global(m.edge_midpoint(e)));
      const int k = tm.locate(s);
      if (std::abs(m.edge_length(e) - tm.element_length(k)) > 1e3 * net.tol + 1e-12 * l.length())
        throw MeshError("trace edge does not match the co-refined partition on line " + std::to_string(l.id));
      tm.incidence[k].push_back({int(f), e, ed.side});
    }
  }
}

}  // namespace dfn
