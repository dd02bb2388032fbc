#pragma once

#include <vector>

#include "dfnvem/geometry.hpp"
#include "dfnvem/mesh.hpp"

namespace dfn {

struct TraceSegment {
  Vec2 a, b;
  int line = -1;
};

struct TriangulateOptions {
  double max_diameter_factor = 1.5;  // triangles with a longer edge than factor*h get refined
  double lattice_clearance = 0.6;    // interior points keep this multiple of h away from constraints
  int max_refine_rounds = 60;
};

// Conforming Delaunay triangulation of a simple polygon with internal constraint segments.
// Every trace is covered by a chain of mesh edges tagged with its line id; boundary edges
// are tagged with their polygon side index.
PolyMesh triangulate_polygon(const std::vector<Vec2>& polygon, const std::vector<TraceSegment>& traces,
                             double h, double tol, const TriangulateOptions& opt = {});

// Same, using the fracture frame and the lines whose parent list contains the fracture.
PolyMesh triangulate(const Fracture& fracture, const std::vector<IntersectionLine>& lines, double h,
                     double tol, const TriangulateOptions& opt = {});

// Plain Delaunay triangulation of a point set (no constraints), counter-clockwise triangles.
std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points);

}  // namespace dfn
