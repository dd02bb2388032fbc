#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dfnvem/mesh.hpp"

namespace dfn {

using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// Scaled monomials m_i(x) = (x - x_E)_i / h_E.
struct Monomials {
  Vec2 center;
  double h;

  Vec2 operator()(const Vec2& x) const { return (x - center) / h; }
  Vec2 gradient(int i) const { return Vec2::Unit(i) / h; }
};

Monomials monomials(const PolyMesh& mesh, int cell);

// Local matrices of one polygon. Degrees of freedom are outward normal fluxes, one per edge,
// in the order of the cell's edge list.
struct LocalElement2D {
  Mat2 lambda;
  double h = 0, area = 0;
  Vec2 center;
  MatX G, F, Pi, D, M;
  Eigen::RowVectorXd B;  // pressure-divergence row, -1 per outward flux
  MatX consistency() const { return Pi.transpose() * G * Pi; }
};

LocalElement2D local_matrices_2d(const PolyMesh& mesh, int cell, const Mat2& lambda, double stab);

// Projected velocity in frame coordinates from outward fluxes.
Vec2 project_velocity(const LocalElement2D& el, const VecX& outward_flux);

// Outward fluxes of a constant vector field.
VecX interpolate_constant(const PolyMesh& mesh, int cell, const Vec2& v);

// Stabilization scale: largest eigenvalue of lambda^{-1} over the given tensors.
double stabilization_scale(const std::vector<Mat2>& lambdas);

// Segment element with outward end fluxes (left end first).
struct LocalElement1D {
  double h = 0, lambda = 0, stab = 0;
  Eigen::Matrix2d consistency, stabilization;
  Eigen::Matrix2d M() const { return consistency + stabilization; }
  Eigen::RowVector2d B;  // -1 per outward flux
};

LocalElement1D local_matrices_1d(double h, double lambda_hat);

}  // namespace dfn
