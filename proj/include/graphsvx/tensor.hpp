#pragma once

#include <functional>

#include <Eigen/Dense>

namespace graphsvx {

// Row-major so that a node's feature row is contiguous.
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Solves min_phi sum_i w_i (design_i . phi - y_i)^2 + ridge * |phi|^2 through
/// the normal equations with a Cholesky factorisation.
///
/// If the regularised normal matrix is not positive definite or its estimated
/// condition number exceeds 1e12, a ridge of 1e-8 is added once and the solve
/// retried; a second failure throws SingularSystem.
Vector wls_solve(const DenseMatrix& design, const Vector& targets,
                 const Vector& weights, double ridge = 0.0);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h per coordinate.
Vector finite_diff_grad(const std::function<double(const Vector&)>& f,
                        const Vector& x, double h);

bool all_finite(const DenseMatrix& m);
bool all_finite(const Vector& v);

}  // namespace graphsvx
