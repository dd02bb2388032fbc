#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dfnvem/cases.hpp"
#include "dfnvem/errors.hpp"
#include "dfnvem/mesh_io.hpp"
#include "dfnvem/pipeline.hpp"
#include "dfnvem/structured.hpp"
#include "dfnvem/traces.hpp"
#include "dfnvem/triangulate.hpp"

using namespace dfn;

namespace {

const std::vector<Vec2> unit_square{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};

double total_area(const PolyMesh& m) {
  double a = 0;
  for (double x : m.area) a += x;
  return a;
}

double max_edge(const PolyMesh& m, int c) {
  double h = 0;
  for (int e : m.cells[c].edges) h = std::max(h, m.edge_length(e));
  return h;
}

std::vector<int> edges_of_kind(const PolyMesh& m, EdgeKind k) {
  std::vector<int> out;
  for (int e = 0; e < m.n_edges(); ++e)
    if (m.edges[e].kind == k) out.push_back(e);
  return out;
}

}  // namespace

TEST(Triangulate, UnitSquareWithoutTraces) {
  const PolyMesh m = triangulate_polygon(unit_square, {}, 0.5, 1e-9);
  ASSERT_GT(m.n_cells(), 0);
  for (int c = 0; c < m.n_cells(); ++c) {
    EXPECT_EQ(m.cells[c].edges.size(), 3u);
    EXPECT_LE(m.diameter[c], 1.0 + 1e-12);
  }
  double boundary = 0;
  for (int e : edges_of_kind(m, EdgeKind::boundary)) boundary += m.edge_length(e);
  EXPECT_NEAR(boundary, 4.0, 1e-12);
  EXPECT_NEAR(total_area(m), 1.0, 1e-12);
}

TEST(Triangulate, ImmersedTraceCoveredByCollinearEdges) {
  const Vec2 a(0.25, 0.5), b(0.75, 0.5);
  const PolyMesh m = triangulate_polygon(unit_square, {TraceSegment{a, b, 7}}, 0.25, 1e-9);
  const auto tr = edges_of_kind(m, EdgeKind::trace);
  ASSERT_GE(tr.size(), 2u);
  double covered = 0;
  for (int e : tr) {
    EXPECT_EQ(m.edges[e].tag, 7);
    for (int n : {m.edges[e].n0, m.edges[e].n1}) EXPECT_NEAR(m.nodes[n].y(), 0.5, 1e-15);
    covered += m.edge_length(e);
  }
  EXPECT_NEAR(covered, 0.5, 1e-12);
  for (const Vec2& end : {a, b}) {
    bool found = false;
    for (const auto& x : m.nodes) found = found || (x - end).norm() < 1e-15;
    EXPECT_TRUE(found);
  }
}

TEST(Triangulate, EllipseDiameterTraceStaysOnTheDiameter) {
  const BenchmarkCase c = case_two_fractures();
  for (const auto& fr : c.network.fractures) {
    const PolyMesh m = triangulate(fr, c.network.lines, 0.1, c.network.tol);
    const auto& l = c.network.lines[0];
    const Vec2 a = fr.frame.to_local(l.a), b = fr.frame.to_local(l.b);
    const auto tr = edges_of_kind(m, EdgeKind::trace);
    ASSERT_FALSE(tr.empty());
    for (int e : tr)
      for (int n : {m.edges[e].n0, m.edges[e].n1}) EXPECT_LT(point_segment_distance(m.nodes[n], a, b), 1e-12);
    EXPECT_EQ(edges_of_kind(m, EdgeKind::boundary).size() >= 8, true);
  }
}

TEST(Triangulate, SizeControlAndEulerCharacteristic) {
  for (double h : {0.2, 0.1, 0.05}) {
    const PolyMesh m =
        triangulate_polygon(unit_square, {TraceSegment{Vec2(0.1, 0.2), Vec2(0.9, 0.7), 0}}, h, 1e-9);
    for (int c = 0; c < m.n_cells(); ++c) EXPECT_LE(max_edge(m, c), 1.5 * h + 1e-12);
    EXPECT_EQ(m.n_nodes() - m.n_edges() + m.n_cells(), 1);
    EXPECT_NEAR(total_area(m), 1.0, 1e-10);
  }
}

TEST(Triangulate, CrossingTracesMeetAtANode) {
  const PolyMesh m = triangulate_polygon(
      unit_square, {TraceSegment{Vec2(0, 0.5), Vec2(1, 0.5), 0}, TraceSegment{Vec2(0.5, 0), Vec2(0.5, 1), 1}}, 0.2,
      1e-9);
  bool centre = false;
  for (const auto& x : m.nodes) centre = centre || (x - Vec2(0.5, 0.5)).norm() < 1e-14;
  EXPECT_TRUE(centre);
  for (int line : {0, 1}) {
    double covered = 0;
    for (int e : edges_of_kind(m, EdgeKind::trace))
      if (m.edges[e].tag == line) covered += m.edge_length(e);
    EXPECT_NEAR(covered, 1.0, 1e-12);
  }
}

TEST(Triangulate, EmptyPolygonRejected) {
  EXPECT_THROW(triangulate_polygon({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)}, {}, 0.1, 1e-9), EmptyDomain);
}

TEST(Corefine, UnionOfBreakpoints) {
  const auto r = corefine_breakpoints({{0, 0.5, 1}, {0, 0.3, 1}}, 1e-9);
  EXPECT_EQ(r, (std::vector<double>{0, 0.3, 0.5, 1}));
}

TEST(Corefine, IdenticalBreakpointsAreIdempotent) {
  const std::vector<double> b{0, 0.25, 0.5, 1};
  EXPECT_EQ(corefine_breakpoints({b, b}, 1e-9), b);
}

TEST(Corefine, NearbyBreakpointsMergeTowardTheSmallerValue) {
  const auto r = corefine_breakpoints({{0, 0.5, 1}, {0, 0.5 + 1e-12, 1}}, 1e-9);
  EXPECT_EQ(r, (std::vector<double>{0, 0.5, 1}));
}

TEST(Corefine, DisagreeingEndpointsRejected) {
  EXPECT_THROW(corefine_breakpoints({{0, 0.5, 1}, {0, 0.5, 0.9}}, 1e-9), InconsistentEndpoints);
}

TEST(Corefine, ParentsShareTheSameTracePartition) {
  const BenchmarkCase c = case_two_fractures();
  MeshOptions opt;
  opt.h = 0.15;
  const MeshResult r = build_mesh(c.network, opt);
  const auto& tm = r.mesh.traces[0];
  for (size_t k = 1; k < tm.breakpoints.size(); ++k) EXPECT_GT(tm.breakpoints[k], tm.breakpoints[k - 1]);
  for (int f = 0; f < 2; ++f) {
    std::vector<double> lengths;
    const PolyMesh& m = r.mesh.fractures[f];
    for (int e : edges_of_kind(m, EdgeKind::trace))
      if (m.edges[e].side > 0) lengths.push_back(m.edge_length(e));
    std::sort(lengths.begin(), lengths.end());
    std::vector<double> expected;
    for (int k = 0; k < tm.n_elements(); ++k) expected.push_back(tm.element_length(k));
    std::sort(expected.begin(), expected.end());
    ASSERT_EQ(lengths.size(), expected.size());
    for (size_t k = 0; k < lengths.size(); ++k) EXPECT_NEAR(lengths[k], expected[k], 1e-12);
  }
  // Each element is seen by both sides of both fractures.
  for (const auto& inc : tm.incidence) EXPECT_EQ(inc.size(), 4u);
}

TEST(SplitInterfaceDofs, FullTraceDuplicatesEveryTraceEdge) {
  const Fracture fr = make_fracture(0, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)});
  IntersectionLine line;
  line.a = Vec3(0, 0.5, 0);
  line.b = Vec3(1, 0.5, 0);
  line.parents = {0, 1};
  PolyMesh m = cartesian_mesh(Vec2(0, 0), Vec2(1, 1), 4, 4);
  ASSERT_EQ(tag_trace(m, fr.frame.to_local(line.a), fr.frame.to_local(line.b), 0, 1e-9), 4);
  const PolyMesh s = split_interface_dofs(m, fr, {line});
  EXPECT_EQ(s.n_edges(), m.n_edges() + 4);
  EXPECT_EQ(s.n_nodes(), m.n_nodes());
  const auto ec = s.edge_cells();
  int plus = 0, minus = 0;
  for (int e : edges_of_kind(s, EdgeKind::trace)) {
    EXPECT_LT(ec[e][1], 0);
    (s.edges[e].side > 0 ? plus : minus)++;
  }
  EXPECT_EQ(plus, 4);
  EXPECT_EQ(minus, 4);
  for (int e = 0; e < s.n_edges(); ++e)
    if (s.edges[e].kind == EdgeKind::interior) EXPECT_GE(ec[e][1], 0);
}

TEST(SplitInterfaceDofs, NoTracesIsIdentity) {
  const Fracture fr = make_fracture(0, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)});
  const PolyMesh m = cartesian_mesh(Vec2(0, 0), Vec2(1, 1), 3, 3);
  const PolyMesh s = split_interface_dofs(m, fr, {});
  EXPECT_EQ(s.n_edges(), m.n_edges());
  EXPECT_EQ(s.n_nodes(), m.n_nodes());
  for (int c = 0; c < m.n_cells(); ++c) EXPECT_EQ(s.cells[c].edges, m.cells[c].edges);
}

TEST(SplitInterfaceDofs, ImmersedTipKeepsItsNode) {
  const Fracture fr = make_fracture(0, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)});
  IntersectionLine line;
  line.a = Vec3(0, 0.5, 0);
  line.b = Vec3(0.5, 0.5, 0);
  line.parents = {0, 1};
  PolyMesh m = cartesian_mesh(Vec2(0, 0), Vec2(1, 1), 4, 4);
  ASSERT_EQ(tag_trace(m, Vec2(0, 0.5), Vec2(0.5, 0.5), 0, 1e-9), 2);
  const PolyMesh s = split_interface_dofs(m, fr, {line});
  EXPECT_EQ(s.n_nodes(), m.n_nodes());
  EXPECT_EQ(s.n_edges(), m.n_edges() + 2);
  // Edges beyond the tip are untouched interior edges with two cells.
  const auto ec = s.edge_cells();
  for (int e = 0; e < s.n_edges(); ++e) {
    const Vec2 mid = s.edge_midpoint(e);
    if (std::abs(mid.y() - 0.5) < 1e-12 && mid.x() > 0.5) {
      EXPECT_EQ(s.edges[e].kind, EdgeKind::interior);
      EXPECT_GE(ec[e][1], 0);
    }
  }
}

TEST(MeshStats, TwoByTwoCartesianGrid) {
  const MeshStats s = mesh_stats(cartesian_mesh(Vec2(0, 0), Vec2(1, 1), 2, 2));
  EXPECT_EQ(s.n_cells, 4);
  EXPECT_EQ(s.n_edges, 12);
  EXPECT_EQ(s.n_nodes, 9);
  EXPECT_NEAR(s.h_avg, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(s.h_max, std::sqrt(0.5), 1e-15);
  EXPECT_EQ(s.edges_min, 4);
  EXPECT_EQ(s.edges_max, 4);
  EXPECT_EQ(s.n_nonconvex, 0);
}

TEST(StructuredMeshes, TriangleGridConservesArea) {
  const PolyMesh m = structured_triangle_mesh(Vec2(-1, 0), Vec2(1, 3), 5, 7);
  EXPECT_EQ(m.n_cells(), 70);
  EXPECT_NEAR(total_area(m), 6.0, 1e-12);
  EXPECT_EQ(m.n_nodes() - m.n_edges() + m.n_cells(), 1);
}

TEST(StructuredMeshes, JiggleKeepsBoundaryAndValidCells) {
  PolyMesh m = cartesian_mesh(Vec2(0, 0), Vec2(1, 1), 10, 10);
  const PolyMesh before = m;
  jiggle_nodes(m, 0.3 * 0.1, 42);
  EXPECT_NEAR(total_area(m), 1.0, 1e-12);
  int moved = 0;
  for (int n = 0; n < m.n_nodes(); ++n) {
    const Vec2& x = before.nodes[n];
    const bool on_boundary = x.x() == 0 || x.x() == 1 || x.y() == 0 || x.y() == 1;
    const double d = (m.nodes[n] - x).cwiseAbs().maxCoeff();
    if (on_boundary) EXPECT_EQ(d, 0.0);
    EXPECT_LE(d, 0.03 + 1e-15);
    moved += d > 0;
  }
  EXPECT_GT(moved, 60);
  for (int c = 0; c < m.n_cells(); ++c) EXPECT_GT(m.area[c], 0.0);
  PolyMesh again = before;
  jiggle_nodes(again, 0.03, 42);
  for (int n = 0; n < m.n_nodes(); ++n) EXPECT_EQ(again.nodes[n], m.nodes[n]);
}

TEST(BuildMesh, InterfaceEdgesHaveOneCellAndOthersTwo) {
  const BenchmarkCase c = case_two_fractures();
  MeshOptions opt;
  opt.h = 0.2;
  const MeshResult r = build_mesh(c.network, opt);
  for (int f = 0; f < 2; ++f) {
    const PolyMesh& m = r.mesh.fractures[f];
    const auto ec = m.edge_cells();
    for (int e = 0; e < m.n_edges(); ++e) {
      if (m.edges[e].kind == EdgeKind::interior) EXPECT_GE(ec[e][1], 0);
      else EXPECT_LT(ec[e][1], 0);
    }
    EXPECT_NEAR(total_area(m), c.network.fractures[f].area(), 1e-10 * c.network.fractures[f].area());
  }
}

TEST(BuildMesh, CartesianFamilyNeedsRectangles) {
  const BenchmarkCase c = case_two_fractures();
  MeshOptions opt;
  opt.family = MeshFamily::cartesian;
  opt.h = 0.1;
  EXPECT_THROW(build_mesh(c.network, opt), ConfigError);
}

TEST(MeshIo, RoundTripPreservesTopologyAndTags) {
  const BenchmarkCase c = case_two_fractures();
  MeshOptions opt;
  opt.h = 0.3;
  const PolyMesh m = build_mesh(c.network, opt).mesh.fractures[0];
  std::stringstream buf;
  write_mesh(buf, m);
  const PolyMesh r = read_mesh(buf);
  ASSERT_EQ(r.n_nodes(), m.n_nodes());
  ASSERT_EQ(r.n_edges(), m.n_edges());
  ASSERT_EQ(r.n_cells(), m.n_cells());
  for (int n = 0; n < m.n_nodes(); ++n) EXPECT_EQ(r.nodes[n], m.nodes[n]);
  for (int e = 0; e < m.n_edges(); ++e) {
    EXPECT_EQ(r.edges[e].kind, m.edges[e].kind);
    EXPECT_EQ(r.edges[e].tag, m.edges[e].tag);
    EXPECT_EQ(r.edges[e].side, m.edges[e].side);
  }
  for (int k = 0; k < m.n_cells(); ++k) {
    EXPECT_EQ(r.cells[k].edges, m.cells[k].edges);
    EXPECT_EQ(r.cells[k].signs, m.cells[k].signs);
    EXPECT_EQ(r.area[k], m.area[k]);
  }
}

TEST(MeshIo, MalformedInputRaisesIoError) {
  std::stringstream bad("dfnvem-mesh 1\nnodes 2\n0 0\n");
  EXPECT_THROW(read_mesh(bad), IoError);
  EXPECT_THROW(read_meshes("/nonexistent/dir/mesh.txt"), IoError);
}
