// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smallscat/linalg.hpp"

#include <cmath>
#include <sstream>

namespace smallscat
{

DenseSolver::DenseSolver(const CMatrix &matrix, double min_rcond)
{
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
  {
    throw ValidationError("invalid_argument", "dense solve needs a non-empty square matrix");
  }
  if (!matrix.allFinite())
  {
    throw SolverError("non_finite_system", "system matrix contains non-finite entries");
  }
  lu.compute(matrix);
  condition_estimate = lu.rcond();
  if (!(condition_estimate >= min_rcond))
  {
    std::ostringstream os;
    os << "system is numerically singular (reciprocal condition estimate " << condition_estimate
       << ")";
    throw SolverError("singular_system", os.str());
  }
}

GmresResult gmres(const LinearOperator &apply, const CVector &rhs, const GmresOptions &options,
                  const CVector *initial_guess)
{
  const Eigen::Index n = rhs.size();
  GmresResult result;
  result.solution = initial_guess ? *initial_guess : CVector::Zero(n);
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0)
  {
    result.solution.setZero();
    result.converged = true;
    return result;
  }

  const int m = std::max(1, std::min<int>(options.restart, static_cast<int>(n)));
  CMatrix basis(n, m + 1);
  CMatrix hess = CMatrix::Zero(m + 1, m);
  std::vector<complex> cs(m), sn(m);
  CVector g(m + 1);
  CVector work(n);

  while (result.iterations < options.max_iterations)
  {
    apply(result.solution, work);
    CVector r = rhs - work;
    double beta = r.norm();
    result.relative_residual = beta / rhs_norm;
    if (result.relative_residual <= options.tolerance)
    {
      result.converged = true;
      return result;
    }
    basis.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    hess.setZero();

    int j = 0;
    for (; j < m && result.iterations < options.max_iterations; ++j)
    {
      ++result.iterations;
      apply(basis.col(j), work);
      // Modified Gram-Schmidt.
      for (int i = 0; i <= j; ++i)
      {
        hess(i, j) = basis.col(i).dot(work);
        work -= hess(i, j) * basis.col(i);
      }
      const double h_next = work.norm();
      hess(j + 1, j) = h_next;
      if (h_next > 0.0)
      {
        basis.col(j + 1) = work / h_next;
      }
      for (int i = 0; i < j; ++i)
      {
        const complex tmp = std::conj(cs[i]) * hess(i, j) + std::conj(sn[i]) * hess(i + 1, j);
        hess(i + 1, j) = -sn[i] * hess(i, j) + cs[i] * hess(i + 1, j);
        hess(i, j) = tmp;
      }
      const complex a = hess(j, j), b = hess(j + 1, j);
      const double denom = std::sqrt(std::norm(a) + std::norm(b));
      cs[j] = denom > 0.0 ? a / denom : 1.0;
      sn[j] = denom > 0.0 ? b / denom : 0.0;
      hess(j, j) = std::conj(cs[j]) * a + std::conj(sn[j]) * b;
      hess(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = std::conj(cs[j]) * g[j];
      result.relative_residual = std::abs(g[j + 1]) / rhs_norm;
      if (result.relative_residual <= options.tolerance || h_next == 0.0)
      {
        ++j;
        break;
      }
    }
    // Back substitution on the j x j triangle.
    CVector y = hess.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    result.solution += basis.leftCols(j) * y;
  }
  apply(result.solution, work);
  result.relative_residual = (rhs - work).norm() / rhs_norm;
  result.converged = result.relative_residual <= options.tolerance;
  return result;
}

}  // namespace smallscat
