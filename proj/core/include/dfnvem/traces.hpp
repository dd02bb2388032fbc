#pragma once

#include <vector>

#include "dfnvem/geometry.hpp"
#include "dfnvem/mesh.hpp"

namespace dfn {

struct TraceIncidence {
  int fracture = -1;
  int edge = -1;
  int side = 0;
};

// 1D partition of one intersection line, in arclength from line.a.
struct TraceMesh {
  int line = -1;
  std::vector<double> breakpoints;
  std::vector<std::vector<TraceIncidence>> incidence;  // per element, every (fracture, edge) on it

  int n_elements() const { return int(breakpoints.size()) - 1; }
  double element_length(int i) const { return breakpoints[i + 1] - breakpoints[i]; }
  // Element containing arclength s (clamped).
  int locate(double s) const;
};

struct NetworkMesh {
  std::vector<PolyMesh> fractures;
  std::vector<TraceMesh> traces;  // indexed like FractureNetwork::lines
};

// Arclength positions of the nodes of the mesh edges tagged with the line.
std::vector<double> trace_breakpoints(const PolyMesh& mesh, const Fracture& fracture, const IntersectionLine& line);

// Union of breakpoint sets, merging values within tol toward the smaller one.
// Throws InconsistentEndpoints when the sets disagree on the first or last value.
std::vector<double> corefine_breakpoints(const std::vector<std::vector<double>>& drafts, double tol);

// Splits trace edges in every parent so that all parents share the merged partition, adds
// intersection points as breakpoints, and fills the incidence maps.
void corefine(NetworkMesh& mesh, const FractureNetwork& network);

// Duplicates every trace edge with two cells; the copy belongs to the minus side cell.
PolyMesh split_interface_dofs(const PolyMesh& mesh, const Fracture& fracture,
                              const std::vector<IntersectionLine>& lines);

// Recomputes the trace incidence maps from the tagged edges of each fracture mesh.
void build_incidence(NetworkMesh& mesh, const FractureNetwork& network);

}  // namespace dfn
