#pragma once

#include <array>
#include <vector>

#include "dfnvem/geometry.hpp"

namespace dfn {

enum class EdgeKind { interior, boundary, trace };

struct Edge {
  int n0 = -1, n1 = -1;
  EdgeKind kind = EdgeKind::interior;
  int tag = -1;  // polygon side for boundary edges, line id for trace edges
  int side = 0;  // +1 / -1 on split trace edges
};

// sign +1 means the edge's right-hand normal (n0 -> n1 rotated clockwise) points out of the cell.
struct Cell {
  std::vector<int> edges;
  std::vector<int> signs;
};

class PolyMesh {
public:
  std::vector<Vec2> nodes;
  std::vector<Edge> edges;
  std::vector<Cell> cells;

  std::vector<double> area;
  std::vector<Vec2> centroid;
  std::vector<double> diameter;

  int n_nodes() const { return int(nodes.size()); }
  int n_edges() const { return int(edges.size()); }
  int n_cells() const { return int(cells.size()); }

  double edge_length(int e) const { return (nodes[edges[e].n1] - nodes[edges[e].n0]).norm(); }
  Vec2 edge_midpoint(int e) const { return 0.5 * (nodes[edges[e].n0] + nodes[edges[e].n1]); }
  Vec2 edge_normal(int e) const;

  // Area, centroid and diameter from the oriented edges. Throws MeshError on non-positive area.
  void update_geometry();

  // Adjacent cells per edge, -1 when absent.
  std::vector<std::array<int, 2>> edge_cells() const;

  // Closed node loops of a cell following the oriented edges, outer loop first.
  std::vector<std::vector<int>> cell_loops(int c) const;
  std::vector<int> cell_nodes(int c) const { return cell_loops(c).front(); }

  // Drops unreferenced edges and nodes, keeping relative order.
  void compact();
};

struct MeshStats {
  int n_nodes = 0, n_cells = 0, n_edges = 0;
  double h_max = 0, h_avg = 0;
  int edges_min = 0, edges_max = 0;
  double edges_avg = 0;
  int n_nonconvex = 0;
  double total_area = 0;
};

MeshStats mesh_stats(const PolyMesh& mesh);

// Builds a mesh from counter-clockwise triangles; edges get kind interior or boundary (one cell).
PolyMesh mesh_from_triangles(const std::vector<Vec2>& nodes, const std::vector<std::array<int, 3>>& tris);

// Labels edges with one adjacent cell by the polygon side they lie on.
void tag_boundary(PolyMesh& mesh, const std::vector<Vec2>& polygon, double tol);

// Marks edges lying on the segment [a, b] as trace edges of the given line.
int tag_trace(PolyMesh& mesh, const Vec2& a, const Vec2& b, int line, double tol);

// Inserts node x on edge e, replacing it by two edges in every cell that uses it. Returns the new node.
int split_edge(PolyMesh& mesh, int e, const Vec2& x);

}  // namespace dfn
