#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dfnvem/assembly.hpp"
#include "dfnvem/geometry.hpp"

namespace dfn {

enum class MeshFamily { cartesian, triangular, random, coarse };

const char* family_name(MeshFamily f);
// Throws ConfigError for unknown names.
MeshFamily parse_family(const std::string& name);

// Analytic fields; any member may be empty.
struct ExactSolution {
  std::function<double(int fracture, const Vec3& x)> p;
  std::function<Vec3(int fracture, const Vec3& x)> u;
  std::function<double(int line, const Vec3& x)> p_hat;
  std::function<double(int line, const Vec3& x)> u_hat;  // velocity component along the line tangent

  bool fracture() const { return bool(p) && bool(u); }
  bool line() const { return bool(p_hat) && bool(u_hat); }
};

struct BenchmarkCase {
  std::string name;
  FractureNetwork network;
  Model model = Model::cc;
  ProblemData data;
  ExactSolution exact;
  std::vector<MeshFamily> families;
  MeshFamily coarse_base = MeshFamily::triangular;  // fine mesh the coarse family starts from
  int c_depth = 2;
  double jiggle = 0.3;  // random family: node displacement relative to the cell size
  double h0 = 0.1;  // target size of level 1; each level halves it
};

BenchmarkCase case_single_fracture();
BenchmarkCase case_two_fractures(double zeta = 1.0);
BenchmarkCase case_intersection_flow();
BenchmarkCase case_four_fractures();

// single, two-fractures, intersection-flow, four-fractures. Throws ConfigError otherwise.
BenchmarkCase make_case(const std::string& name);
std::vector<std::string> case_names();

double level_size(const BenchmarkCase& c, int level);

// Largest strong-form residuals of the exact fields at random points of each fracture and line:
// div u - f, u + lambda grad p, and the 1D analogue u_hat + lambda_hat dp_hat/ds.
struct ResidualCheck {
  double divergence = 0;
  double darcy = 0;
  double line_darcy = 0;
  int samples = 0;
};
ResidualCheck strong_residual(const BenchmarkCase& c, int points_per_fracture = 100, uint64_t seed = 7);

}  // namespace dfn
