#include "graphsvx/tensor.hpp"

#include <cmath>
#include <string>

#include "graphsvx/errors.hpp"

namespace graphsvx {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kFallbackRidge = 1e-8;

bool try_cholesky(const DenseMatrix& normal, const Vector& rhs, Vector& out) {
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) return false;
  const double rcond = llt.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > kMaxCondition) return false;
  out = llt.solve(rhs);
  return all_finite(out);
}

}  // namespace

Vector wls_solve(const DenseMatrix& design, const Vector& targets,
                 const Vector& weights, double ridge) {
  const auto rows = design.rows();
  const auto cols = design.cols();
  if (rows < 1 || cols < 1) {
    throw DimensionMismatch("wls_solve: empty design matrix");
  }
  if (targets.size() != rows || weights.size() != rows) {
    throw DimensionMismatch("wls_solve: design has " + std::to_string(rows) +
                            " rows but targets/weights have " +
                            std::to_string(targets.size()) + "/" +
                            std::to_string(weights.size()));
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw std::invalid_argument("wls_solve: ridge must be finite and >= 0");
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      throw std::invalid_argument("wls_solve: weights must be finite and >= 0");
    }
  }

  const DenseMatrix weighted = weights.asDiagonal() * design;
  DenseMatrix normal = design.transpose() * weighted;
  const Vector rhs = weighted.transpose() * targets;
  normal.diagonal().array() += ridge;

  Vector phi;
  if (try_cholesky(normal, rhs, phi)) return phi;
  normal.diagonal().array() += kFallbackRidge;
  if (try_cholesky(normal, rhs, phi)) return phi;
  throw SingularSystem("wls_solve: normal matrix is numerically singular (" +
                       std::to_string(cols) + " unknowns, " +
                       std::to_string(rows) + " samples)");
}

Vector finite_diff_grad(const std::function<double(const Vector&)>& f,
                        const Vector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be > 0");
  Vector grad(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

bool all_finite(const DenseMatrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace graphsvx
