// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SMALLSCAT_LINALG_HPP
#define SMALLSCAT_LINALG_HPP

#include <functional>

#include <Eigen/LU>

#include "smallscat/types.hpp"

namespace smallscat
{

//
// Dense LU with a reciprocal condition estimate. Factorization fails with a SolverError when
// the estimate drops below `min_rcond`.
//
class DenseSolver
{
  Eigen::PartialPivLU<CMatrix> lu;
  double condition_estimate = 0.0;

public:
  explicit DenseSolver(const CMatrix &matrix, double min_rcond = 1e-14);

  template <class Rhs>
  auto solve(const Eigen::MatrixBase<Rhs> &rhs) const
  {
    return lu.solve(rhs).eval();
  }
  // Reciprocal 1-norm condition estimate.
  double rcond() const { return condition_estimate; }
};

using LinearOperator = std::function<void(const CVector &, CVector &)>;

struct GmresResult
{
  CVector solution;
  double relative_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct GmresOptions
{
  double tolerance = 1e-10;
  int restart = 80;
  int max_iterations = 3000;
};

// Restarted GMRES, no preconditioner. Does not throw on non-convergence.
GmresResult gmres(const LinearOperator &apply, const CVector &rhs, const GmresOptions &options = {},
                  const CVector *initial_guess = nullptr);

}  // namespace smallscat

#endif  // SMALLSCAT_LINALG_HPP
