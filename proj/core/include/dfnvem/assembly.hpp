#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "dfnvem/geometry.hpp"
#include "dfnvem/traces.hpp"
#include "dfnvem/vem.hpp"

namespace dfn {

enum class Model { cc, dc };

enum class BCType { dirichlet, neumann };

// Neumann value is the outward normal velocity u.n on the edge.
struct EdgeBC {
  BCType type = BCType::neumann;
  double value = 0.0;
};

enum class EndpointType { dirichlet, tip };

struct EndpointBC {
  EndpointType type = EndpointType::tip;
  double value = 0.0;
};

struct PointSource {
  int fracture = 0;
  Vec3 x = Vec3::Zero();
  double q = 1.0;
};

struct ProblemData {
  std::function<double(int fracture, const Vec3& x)> f;
  std::function<double(int line, const Vec3& x)> f_hat;
  // Called for every boundary edge with its polygon side; unset means no-flux everywhere.
  std::function<EdgeBC(int fracture, int side, const Vec3& midpoint)> edge_bc;
  // Called for line endpoints on a fracture boundary; immersed endpoints are always tips.
  std::function<EndpointBC(int line, int end, const Vec3& x)> endpoint_bc;
  std::vector<PointSource> point_sources;
  std::vector<std::vector<Mat2>> cell_lambda;  // per fracture, per cell; empty uses the fracture tensor
  std::vector<double> stabilization;           // per fracture; empty uses the largest eigenvalue of lambda^-1
  bool pin_floating = true;                    // false raises UnconstrainedPressure instead
};

struct DofMap {
  Model model = Model::cc;
  std::vector<int> edge_offset, cell_offset;  // per fracture
  std::vector<int> line_cell_offset;          // per line, dc only
  std::vector<std::vector<std::array<int, 2>>> line_flux;  // per line, per element: (left, right) flux dofs, dc only
  std::vector<int> line_multiplier_offset;    // per line, cc only: one multiplier per trace element
  std::vector<int> point_multiplier;          // per intersection point, dc only
  int n_flux = 0, n_pressure = 0, n_multiplier = 0;

  int size() const { return n_flux + n_pressure + n_multiplier; }
  int edge_dof(int f, int e) const { return edge_offset[f] + e; }
  int cell_dof(int f, int c) const { return cell_offset[f] + c; }
};

DofMap build_dof_map(const NetworkMesh& mesh, const FractureNetwork& network, Model model);

using SystemMatrix = Eigen::SparseMatrix<double>;

struct SaddleSystem {
  SystemMatrix A;
  VecX b;
  DofMap dofs;
  std::vector<std::pair<int, double>> fixed;  // eliminated dofs and their values
  std::vector<std::string> warnings;
};

// Unconstrained matrix contributions before boundary elimination.
struct RawSystem {
  std::vector<Eigen::Triplet<double>> triplets;
  VecX b;
};

// Replaces fixed rows and columns by the identity and moves their contributions to the right-hand side.
// Throws ConflictingBC when a dof is fixed twice to different values.
SaddleSystem apply_bc(const RawSystem& raw, const DofMap& dofs, std::vector<std::pair<int, double>> fixed);

SaddleSystem assemble(const NetworkMesh& mesh, const FractureNetwork& network, const DofMap& dofs,
                      const ProblemData& data);
SaddleSystem assemble_cc(const NetworkMesh& mesh, const FractureNetwork& network, const DofMap& dofs,
                         const ProblemData& data);
SaddleSystem assemble_dc(const NetworkMesh& mesh, const FractureNetwork& network, const DofMap& dofs,
                         const ProblemData& data);

// Per-cell permeability tensors used for fracture f.
std::vector<Mat2> cell_lambdas(const PolyMesh& mesh, const Fracture& fracture, const ProblemData& data, int f);
double fracture_stabilization(const std::vector<Mat2>& lambdas, const ProblemData& data, int f);

}  // namespace dfn
