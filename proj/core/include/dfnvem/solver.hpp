#pragma once

#include <string>

#include "dfnvem/assembly.hpp"

namespace dfn {

enum class SolverKind { direct, minres };

struct SolverOptions {
  SolverKind kind = SolverKind::direct;
  double tol = 1e-12;  // relative residual target for the iterative path
  int max_iterations = 50000;
  bool fallback = true;  // direct failure retries with the iterative path
};

struct SolveReport {
  VecX x;
  double residual = 0;  // ||Ax - b|| / ||b||
  int iterations = 0;
  std::string method;
  bool nullspace = false;
};

SolveReport solve(const SystemMatrix& A, const VecX& b, const SolverOptions& opt = {});
SolveReport solve(const SaddleSystem& system, const SolverOptions& opt = {});

}  // namespace dfn
