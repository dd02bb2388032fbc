#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "dfnvem/mesh.hpp"

namespace dfn {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct TpfaOptions {
  bool closure = true;  // boundary and trace edges add their half-transmissibility to the diagonal
};

// Cell-by-cell two-point flux matrix; interior edges couple, trace edges never do.
SparseMatrix tpfa_matrix(const PolyMesh& mesh, const std::vector<Mat2>& lambda, const TpfaOptions& opt = {});

struct StrengthMatrix {
  SparseMatrix A;
  std::vector<std::vector<int>> S;   // strong couplings of each row
  std::vector<std::vector<int>> ST;  // rows that depend strongly on each cell
};

StrengthMatrix strength(const SparseMatrix& A, double eps_str);

enum class CF : char { undecided, coarse, fine };

// Classical first-pass C/F splitting. Cells in forced_coarse are made coarse before the loop.
std::vector<CF> cf_split(const SparseMatrix& A, double eps_str, const std::vector<int>& forced_coarse = {});

struct CoarsePartition {
  std::vector<int> coarse_of;             // fine cell -> coarse cell
  std::vector<std::vector<int>> members;  // coarse cell -> fine cells
  int levels = 0;
};

struct CoarseResult {
  PolyMesh mesh;
  CoarsePartition partition;
  std::vector<Mat2> lambda;  // area-weighted per coarse cell
};

// Nodes where a trace ends inside the domain.
std::vector<int> tip_nodes(const PolyMesh& mesh);

// Cells that touch a tip node and own an edge of a trace.
std::vector<int> tip_cells(const PolyMesh& mesh);

// Merges fine cells into coarse ones, dropping shared edges; nodes are kept (hanging nodes allowed).
PolyMesh merge_cells(const PolyMesh& mesh, const std::vector<int>& coarse_of, int n_coarse);

CoarseResult agglomerate(const PolyMesh& mesh, const std::vector<Mat2>& lambda, int c_depth, double eps_str = 0.25,
                         const TpfaOptions& opt = {});

}  // namespace dfn
