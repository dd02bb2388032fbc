#include "dfnvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dfnvem/errors.hpp"

namespace dfn {

Vec2 PolyMesh::edge_normal(int e) const {
  const Vec2 t = nodes[edges[e].n1] - nodes[edges[e].n0];
  return Vec2(t.y(), -t.x()).normalized();
}

void PolyMesh::update_geometry() {
  const int nc = n_cells();
  area.assign(nc, 0.0);
  centroid.assign(nc, Vec2::Zero());
  diameter.assign(nc, 0.0);
  for (int c = 0; c < nc; ++c) {
    const Cell& cell = cells[c];
    if (cell.edges.empty()) throw MeshError("cell " + std::to_string(c) + " has no edges");
    const Vec2 ref = nodes[edges[cell.edges[0]].n0];
    double a = 0.0;
    Vec2 first = Vec2::Zero();
    std::vector<int> ns;
    for (size_t k = 0; k < cell.edges.size(); ++k) {
      const int e = cell.edges[k];
      const double s = cell.signs[k];
      const Vec2 p = nodes[edges[e].n0] - ref, q = nodes[edges[e].n1] - ref;
      const Vec2 m = 0.5 * (p + q);
      const double len = (q - p).norm();
      const Vec2 n = edge_normal(e) * s;
      a += 0.5 * m.dot(n) * len;
      // Simpson is exact for the quadratic x_i^2 along a straight edge.
      for (int i = 0; i < 2; ++i)
        first[i] += 0.5 * n[i] * len / 6.0 * (p[i] * p[i] + 4 * m[i] * m[i] + q[i] * q[i]);
      ns.push_back(edges[e].n0);
      ns.push_back(edges[e].n1);
    }
    if (!(a > 0.0)) throw MeshError("cell " + std::to_string(c) + " has non-positive area");
    area[c] = a;
    centroid[c] = ref + first / a;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    double d = 0.0;
    for (size_t i = 0; i < ns.size(); ++i)
      for (size_t j = i + 1; j < ns.size(); ++j) d = std::max(d, (nodes[ns[i]] - nodes[ns[j]]).norm());
    diameter[c] = d;
  }
}

std::vector<std::array<int, 2>> PolyMesh::edge_cells() const {
  std::vector<std::array<int, 2>> ec(edges.size(), {-1, -1});
  for (int c = 0; c < n_cells(); ++c)
    for (int e : cells[c].edges) {
      auto& slot = ec[e];
      if (slot[0] < 0) slot[0] = c;
      else slot[1] = c;
    }
  return ec;
}

std::vector<std::vector<int>> PolyMesh::cell_loops(int c) const {
  const Cell& cell = cells[c];
  std::multimap<int, int> next;
  for (size_t k = 0; k < cell.edges.size(); ++k) {
    const Edge& e = edges[cell.edges[k]];
    if (cell.signs[k] > 0) next.emplace(e.n0, e.n1);
    else next.emplace(e.n1, e.n0);
  }
  std::vector<std::vector<int>> loops;
  while (!next.empty()) {
    std::vector<int> loop;
    const int start = next.begin()->first;
    int cur = start;
    while (true) {
      auto it = next.find(cur);
      if (it == next.end()) break;
      loop.push_back(cur);
      cur = it->second;
      next.erase(it);
      if (cur == start) break;
    }
    loops.push_back(std::move(loop));
  }
  auto loop_area = [&](const std::vector<int>& l) {
    double a = 0;
    for (size_t i = 0; i < l.size(); ++i) {
      const Vec2& p = nodes[l[i]];
      const Vec2& q = nodes[l[(i + 1) % l.size()]];
      a += p.x() * q.y() - p.y() * q.x();
    }
    return a;
  };
  std::stable_sort(loops.begin(), loops.end(),
                   [&](const auto& x, const auto& y) { return loop_area(x) > loop_area(y); });
  return loops;
}

void PolyMesh::compact() {
  std::vector<int> emap(edges.size(), -1), nmap(nodes.size(), -1);
  for (const auto& c : cells)
    for (int e : c.edges) emap[e] = 0;
  std::vector<Edge> ne;
  for (size_t e = 0; e < edges.size(); ++e) {
    if (emap[e] < 0) continue;
    emap[e] = int(ne.size());
    ne.push_back(edges[e]);
    nmap[edges[e].n0] = 0;
    nmap[edges[e].n1] = 0;
  }
  std::vector<Vec2> nn;
  for (size_t n = 0; n < nodes.size(); ++n) {
    if (nmap[n] < 0) continue;
    nmap[n] = int(nn.size());
    nn.push_back(nodes[n]);
  }
  for (auto& e : ne) {
    e.n0 = nmap[e.n0];
    e.n1 = nmap[e.n1];
  }
  for (auto& c : cells)
    for (int& e : c.edges) e = emap[e];
  edges = std::move(ne);
  nodes = std::move(nn);
}

MeshStats mesh_stats(const PolyMesh& mesh) {
  MeshStats s;
  s.n_nodes = mesh.n_nodes();
  s.n_cells = mesh.n_cells();
  s.n_edges = mesh.n_edges();
  if (s.n_cells == 0) return s;
  s.edges_min = int(mesh.cells[0].edges.size());
  for (int c = 0; c < s.n_cells; ++c) {
    const int ne = int(mesh.cells[c].edges.size());
    s.edges_min = std::min(s.edges_min, ne);
    s.edges_max = std::max(s.edges_max, ne);
    s.edges_avg += ne;
    s.h_max = std::max(s.h_max, mesh.diameter[c]);
    s.h_avg += mesh.diameter[c];
    s.total_area += mesh.area[c];
    bool convex = true;
    const auto loops = mesh.cell_loops(c);
    if (loops.size() != 1) convex = false;
    else {
      const auto& l = loops[0];
      for (size_t i = 0; i < l.size() && convex; ++i) {
        const Vec2 a = mesh.nodes[l[i]], b = mesh.nodes[l[(i + 1) % l.size()]],
                   d = mesh.nodes[l[(i + 2) % l.size()]];
        const Vec2 u = b - a, v = d - b;
        if (u.x() * v.y() - u.y() * v.x() < -1e-12 * u.norm() * v.norm()) convex = false;
      }
    }
    if (!convex) ++s.n_nonconvex;
  }
  s.edges_avg /= s.n_cells;
  s.h_avg /= s.n_cells;
  return s;
}

PolyMesh mesh_from_triangles(const std::vector<Vec2>& nodes, const std::vector<std::array<int, 3>>& tris) {
  PolyMesh m;
  m.nodes = nodes;
  std::map<std::pair<int, int>, int> index;
  for (const auto& t : tris) {
    Cell c;
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, fresh] = index.emplace(key, int(m.edges.size()));
      if (fresh) m.edges.push_back(Edge{a, b});
      const Edge& e = m.edges[it->second];
      c.edges.push_back(it->second);
      c.signs.push_back(e.n0 == a ? 1 : -1);
    }
    m.cells.push_back(std::move(c));
  }
  const auto ec = m.edge_cells();
  for (size_t e = 0; e < m.edges.size(); ++e)
    if (ec[e][1] < 0) m.edges[e].kind = EdgeKind::boundary;
  m.update_geometry();
  return m;
}

void tag_boundary(PolyMesh& mesh, const std::vector<Vec2>& polygon, double tol) {
  const auto ec = mesh.edge_cells();
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (ec[e][1] >= 0) continue;
    Edge& ed = mesh.edges[e];
    if (ed.kind == EdgeKind::trace) continue;
    const Vec2 m = mesh.edge_midpoint(e);
    int best = -1;
    double bd = tol;
    for (size_t s = 0; s < polygon.size(); ++s) {
      const double d = point_segment_distance(m, polygon[s], polygon[(s + 1) % polygon.size()]);
      if (d <= bd) {
        bd = d;
        best = int(s);
      }
    }
    ed.kind = EdgeKind::boundary;
    ed.tag = best;
  }
}

int tag_trace(PolyMesh& mesh, const Vec2& a, const Vec2& b, int line, double tol) {
  int count = 0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    if (point_segment_distance(mesh.nodes[ed.n0], a, b) <= tol &&
        point_segment_distance(mesh.nodes[ed.n1], a, b) <= tol) {
      mesh.edges[e].kind = EdgeKind::trace;
      mesh.edges[e].tag = line;
      ++count;
    }
  }
  return count;
}

int split_edge(PolyMesh& mesh, int e, const Vec2& x) {
  const int nx = mesh.n_nodes();
  mesh.nodes.push_back(x);
  Edge second = mesh.edges[e];
  second.n0 = nx;
  mesh.edges[e].n1 = nx;
  const int e2 = mesh.n_edges();
  mesh.edges.push_back(second);
  for (auto& c : mesh.cells) {
    for (size_t k = 0; k < c.edges.size(); ++k) {
      if (c.edges[k] != e) continue;
      c.edges.insert(c.edges.begin() + long(k) + 1, e2);
      c.signs.insert(c.signs.begin() + long(k) + 1, c.signs[k]);
      break;
    }
  }
  return nx;
}

}  // namespace dfn
