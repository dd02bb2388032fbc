#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "dfnvem/assembly.hpp"
#include "dfnvem/cases.hpp"
#include "dfnvem/coarsening.hpp"

namespace dfn {

struct Solution {
  std::vector<VecX> pressure;                 // per fracture, per cell
  std::vector<VecX> flux;                     // per fracture, per edge, along the edge's right normal
  std::vector<std::vector<Vec3>> velocity;    // per fracture, per cell: projected velocity in 3D
  std::vector<VecX> line_pressure;            // per line, per element: p_hat (dc) or interface pressure (cc)
  std::vector<VecX> line_velocity;            // per line, per element: projected tangential velocity (dc)
  std::vector<std::vector<std::array<double, 2>>> line_flux;  // per line, per element: end values along the tangent
};

Solution extract_solution(const NetworkMesh& mesh, const FractureNetwork& network, const SaddleSystem& system,
                          const VecX& x, const ProblemData& data);

struct ErrorReport {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  int level = 0;
  double h_avg = 0, h_max = 0;
  double h_line = 0;  // longest 1D element
  double err_p = nan, err_u = nan, err_u_vector = nan;
  double err_p_hat = nan, err_u_hat = nan;
  double min_p = 0, max_p = 0;
  double min_p_hat = nan, max_p_hat = nan;
  int n_cells = 0;
  int edges_min = 0, edges_max = 0;
  double edges_avg = 0;
  int size = 0;
  long nnz = 0;
  double sparsity = 0;
};

// Mesh statistics, pressure range and matrix figures. Errors stay NaN.
ErrorReport summarize(const NetworkMesh& mesh, const SaddleSystem& system, const Solution& sol);

// Cell-centred relative L2 errors. err_u uses the Cartesian components separately,
// sqrt(sum_k |e_k|^2 / |u_k|^2) over components with non-zero exact norm; err_u_vector uses
// the Euclidean norm of the 3D difference. Throws MissingExactSolution when p_ex or u_ex is missing.
void relative_errors(ErrorReport& report, const NetworkMesh& mesh, const FractureNetwork& network,
                     const Solution& sol, const ExactSolution& exact);

double sparsity(const SystemMatrix& A);

double convergence_order(double err_prev, double err_cur, double h_prev, double h_cur);

struct Orders {
  std::vector<double> p, u, p_hat, u_hat;  // entry k compares levels k and k+1
};
// Uses h_avg for the fracture errors and h_line for the 1D errors.
Orders convergence_orders(const std::vector<ErrorReport>& ladder);

struct FluxBalance {
  double inflow = 0;   // through fracture boundaries and line ends
  double outflow = 0;
  double sources = 0;  // distributed, point and line sources
  // |outflow - inflow - sources| relative to the largest of the three.
  double imbalance() const;
};
FluxBalance flux_balance(const NetworkMesh& mesh, const FractureNetwork& network, const Solution& sol,
                         const ProblemData& data);

// Legacy VTK unstructured grid: fracture polygons and 1D elements with pressure, velocity and kind.
void write_vtk(const std::string& path, const NetworkMesh& mesh, const FractureNetwork& network,
               const Solution& sol);

// Convergence table with one row per level.
void write_csv(const std::string& path, const std::vector<ErrorReport>& ladder);

// fracture, cell, coarse cell
void write_partition_csv(const std::string& path, const std::vector<CoarsePartition>& partitions);

// Local matrices G, F, Pi, D, M, B of one cell as labelled CSV blocks.
void write_local_matrices_csv(const std::string& path, const LocalElement2D& el);

}  // namespace dfn
