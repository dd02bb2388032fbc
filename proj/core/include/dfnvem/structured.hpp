#pragma once

#include <cstdint>

#include "dfnvem/mesh.hpp"

namespace dfn {

// nx by ny rectangles on [lo, hi]; boundary edges untagged (use tag_boundary).
PolyMesh cartesian_mesh(const Vec2& lo, const Vec2& hi, int nx, int ny);

// Same grid, every rectangle split along its rising diagonal.
PolyMesh structured_triangle_mesh(const Vec2& lo, const Vec2& hi, int nx, int ny);

// Moves every node not on a boundary or trace edge by up to amplitude in each direction.
// A move is retried (at most 20 times, then skipped) when an adjacent cell would self-intersect or collapse.
void jiggle_nodes(PolyMesh& mesh, double amplitude, uint64_t seed);

}  // namespace dfn
