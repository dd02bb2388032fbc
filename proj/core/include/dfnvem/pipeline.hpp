#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dfnvem/assembly.hpp"
#include "dfnvem/cases.hpp"
#include "dfnvem/coarsening.hpp"
#include "dfnvem/postprocess.hpp"
#include "dfnvem/solver.hpp"
#include "dfnvem/triangulate.hpp"

namespace dfn {

struct MeshOptions {
  MeshFamily family = MeshFamily::triangular;
  double h = 0.1;
  MeshFamily coarse_base = MeshFamily::triangular;
  int c_depth = 2;
  double eps_str = 0.25;
  double jiggle = 0.3;  // random family: node displacement relative to the cell size
  uint64_t seed = 20170501;
  int threads = 1;
  TriangulateOptions triangulate;
  TpfaOptions tpfa;
  // Permeability per cell centroid (frame coordinates); unset uses the fracture tensor.
  std::function<Mat2(int fracture, const Vec2& x)> lambda;
};

struct MeshResult {
  NetworkMesh mesh;
  std::vector<std::vector<Mat2>> cell_lambda;  // per fracture, per cell
  std::vector<CoarsePartition> partitions;     // coarse family only
  std::vector<int> fine_cells;                 // cells per fracture before coarsening
};

// Fine mesh of one fracture, with tagged boundary and trace edges. Cartesian and random grids
// need a fracture that is a rectangle in its frame and traces along grid lines (ConfigError).
PolyMesh fracture_mesh(const Fracture& fracture, const std::vector<IntersectionLine>& lines, MeshFamily family,
                       const MeshOptions& opt, double tol);

// Meshes every fracture (in parallel), coarsens, co-refines the traces and splits interface edges.
MeshResult build_mesh(const FractureNetwork& network, const MeshOptions& opt);

struct Timings {
  double mesh = 0, assemble = 0, solve = 0, post = 0;
};

struct RunResult {
  MeshResult mesh;
  ProblemData data;
  SaddleSystem system;
  SolveReport solve;
  Solution solution;
  ErrorReport report;
  FluxBalance balance;
  Timings timings;
};

// Throws ConfigError for a dc run on lines without k_hat or k_tilde.
void validate(const FractureNetwork& network, Model model);

RunResult run(const FractureNetwork& network, Model model, ProblemData data, const MeshOptions& mesh,
              const SolverOptions& solver = {}, const ExactSolution* exact = nullptr);

MeshOptions case_mesh_options(const BenchmarkCase& c, MeshFamily family, int level);
RunResult run_case(const BenchmarkCase& c, MeshFamily family, int level, const SolverOptions& solver = {},
                   int threads = 1);

struct Ladder {
  std::vector<ErrorReport> levels;
  Orders orders;
  std::vector<Timings> timings;
};
Ladder convergence(const BenchmarkCase& c, MeshFamily family, int levels, const SolverOptions& solver = {},
                   int threads = 1);

// DFN_VEM_THREADS, when set to a positive integer, overrides the requested count.
int resolve_threads(int requested);

}  // namespace dfn
