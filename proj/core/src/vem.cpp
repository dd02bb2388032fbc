#include "dfnvem/vem.hpp"

#include <Eigen/Eigenvalues>

#include "dfnvem/errors.hpp"

namespace dfn {

Monomials monomials(const PolyMesh& mesh, int cell) { return {mesh.centroid[cell], mesh.diameter[cell]}; }

LocalElement2D local_matrices_2d(const PolyMesh& mesh, int cell, const Mat2& lambda, double stab) {
  const Cell& c = mesh.cells[cell];
  const int n = int(c.edges.size());
  LocalElement2D el;
  el.lambda = lambda;
  el.h = mesh.diameter[cell];
  el.area = mesh.area[cell];
  el.center = mesh.centroid[cell];
  if (!(el.h > 0) || !(el.area > 0)) throw SingularG("degenerate cell " + std::to_string(cell));
  const double h = el.h;

  el.G = lambda * (el.area / (h * h));
  // With x_E the centroid the cell average of m_i vanishes, leaving the edge mean (midpoint rule).
  el.F.resize(2, n);
  el.D.resize(n, 2);
  el.B.resize(n);
  for (int k = 0; k < n; ++k) {
    const int e = c.edges[k];
    const Vec2 nrm = c.signs[k] * mesh.edge_normal(e);
    const double len = mesh.edge_length(e);
    el.F.col(k) = (mesh.edge_midpoint(e) - el.center) / h;
    for (int j = 0; j < 2; ++j) el.D(k, j) = len * (lambda.col(j)).dot(nrm) / h;
    el.B(k) = -1.0;
  }
  Eigen::LDLT<MatX> g(el.G);
  if (g.info() != Eigen::Success || !(el.G.determinant() > 0))
    throw SingularG("G not positive definite in cell " + std::to_string(cell));
  el.Pi = g.solve(el.F);
  const MatX I = MatX::Identity(n, n);
  const MatX R = I - el.D * el.Pi;
  el.M = el.Pi.transpose() * el.G * el.Pi + stab * R.transpose() * R;
  return el;
}

Vec2 project_velocity(const LocalElement2D& el, const VecX& flux) {
  const Vec2 coef = el.Pi * flux;
  return el.lambda * coef / el.h;
}

VecX interpolate_constant(const PolyMesh& mesh, int cell, const Vec2& v) {
  const Cell& c = mesh.cells[cell];
  VecX u(c.edges.size());
  for (size_t k = 0; k < c.edges.size(); ++k)
    u(k) = mesh.edge_length(c.edges[k]) * v.dot(c.signs[k] * mesh.edge_normal(c.edges[k]));
  return u;
}

double stabilization_scale(const std::vector<Mat2>& lambdas) {
  double s = 0.0;
  for (const auto& l : lambdas) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (l + l.transpose()));
    s = std::max(s, 1.0 / es.eigenvalues().minCoeff());
  }
  return s > 0 ? s : 1.0;
}

LocalElement1D local_matrices_1d(double h, double lambda_hat) {
  if (!(h > 0) || !(lambda_hat > 0)) throw SingularG("1D element needs positive length and permeability");
  LocalElement1D el;
  el.h = h;
  el.lambda = lambda_hat;
  el.stab = h / lambda_hat;
  el.consistency << 1, -1, -1, 1;
  el.consistency *= h / (4 * lambda_hat);
  el.stabilization << 0.5, 0.5, 0.5, 0.5;
  el.stabilization *= el.stab;
  el.B << -1, -1;
  return el;
}

}  // namespace dfn
