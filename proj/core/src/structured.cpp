#include "dfnvem/structured.hpp"

#include <random>

#include "dfnvem/geometry.hpp"

namespace dfn {

namespace {

int hnode(int i, int j, int nx) { return j * (nx + 1) + i; }

std::vector<Vec2> grid_nodes(const Vec2& lo, const Vec2& hi, int nx, int ny) {
  std::vector<Vec2> nodes;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      nodes.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny);
  return nodes;
}

double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return d1 * d2 <= 0 && d3 * d4 <= 0;
}

// Simple, counter-clockwise and not collapsed; reflex corners are allowed.
bool cell_valid(const PolyMesh& m, int c) {
  const auto loops = m.cell_loops(c);
  if (loops.size() != 1) return false;
  std::vector<Vec2> p;
  for (int n : loops[0]) p.push_back(m.nodes[n]);
  const size_t k = p.size();
  double perimeter = 0;
  for (size_t i = 0; i < k; ++i) perimeter += (p[(i + 1) % k] - p[i]).norm();
  if (polygon_signed_area(p) <= 1e-2 * perimeter * perimeter) return false;
  for (size_t i = 0; i < k; ++i)
    for (size_t j = i + 2; j < k; ++j) {
      if (i == 0 && j == k - 1) continue;
      if (segments_cross(p[i], p[(i + 1) % k], p[j], p[(j + 1) % k])) return false;
    }
  return true;
}

}  // namespace

PolyMesh cartesian_mesh(const Vec2& lo, const Vec2& hi, int nx, int ny) {
  PolyMesh m;
  m.nodes = grid_nodes(lo, hi, nx, ny);
  // Horizontal edges first, then vertical ones.
  auto hedge = [&](int i, int j) { return j * nx + i; };
  const int nh = nx * (ny + 1);
  auto vedge = [&](int i, int j) { return nh + j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) m.edges.push_back(Edge{hnode(i, j, nx), hnode(i + 1, j, nx)});
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) m.edges.push_back(Edge{hnode(i, j, nx), hnode(i, j + 1, nx)});
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.cells.push_back(Cell{{hedge(i, j), vedge(i + 1, j), hedge(i, j + 1), vedge(i, j)}, {1, 1, -1, -1}});
  const auto ec = m.edge_cells();
  for (int e = 0; e < m.n_edges(); ++e)
    if (ec[e][1] < 0) m.edges[e].kind = EdgeKind::boundary;
  m.update_geometry();
  return m;
}

PolyMesh structured_triangle_mesh(const Vec2& lo, const Vec2& hi, int nx, int ny) {
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = hnode(i, j, nx), b = hnode(i + 1, j, nx), c = hnode(i + 1, j + 1, nx), d = hnode(i, j + 1, nx);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  return mesh_from_triangles(grid_nodes(lo, hi, nx, ny), tris);
}

void jiggle_nodes(PolyMesh& mesh, double amplitude, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<char> fixed(mesh.nodes.size(), 0);
  for (const auto& e : mesh.edges)
    if (e.kind != EdgeKind::interior) fixed[e.n0] = fixed[e.n1] = 1;
  std::vector<std::vector<int>> node_cells(mesh.nodes.size());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int e : mesh.cells[c].edges) {
      for (int n : {mesh.edges[e].n0, mesh.edges[e].n1}) {
        auto& v = node_cells[n];
        if (v.empty() || v.back() != c) v.push_back(c);
      }
    }
  }
  for (size_t n = 0; n < mesh.nodes.size(); ++n) {
    if (fixed[n]) continue;
    const Vec2 orig = mesh.nodes[n];
    bool ok = false;
    for (int attempt = 0; attempt < 20 && !ok; ++attempt) {
      mesh.nodes[n] = orig + Vec2(u(rng), u(rng));
      ok = true;
      for (int c : node_cells[n]) ok = ok && cell_valid(mesh, c);
    }
    if (!ok) mesh.nodes[n] = orig;
  }
  mesh.update_geometry();
}

}  // namespace dfn
