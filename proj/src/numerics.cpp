#include "sdegp/numerics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "sdegp/errors.hpp"

namespace sdegp {

namespace {

void check_square_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw NotSymmetricError("factor_spd: matrix is not square");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(scale, 1e-300)) {
    std::ostringstream msg;
    msg << "factor_spd: matrix is asymmetric (relative deviation " << asym / scale << ")";
    throw NotSymmetricError(msg.str());
  }
}

}  // namespace

SpdFactor factor_spd(const Eigen::MatrixXd& matrix, std::span<const double> jitter_ladder) {
  check_square_symmetric(matrix);
  const Eigen::Index n = matrix.rows();
  const double mean_diag = matrix.diagonal().mean();
  const double scale = mean_diag > 0.0 ? mean_diag : 1.0;

  for (double rung : jitter_ladder) {
    const double jitter = rung * scale;
    Eigen::MatrixXd shifted = matrix;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) {
      continue;
    }
    Eigen::MatrixXd lower = llt.matrixL();
    if ((lower.diagonal().array() > 0.0).all()) {
      return SpdFactor{std::move(lower), jitter};
    }
  }
  std::ostringstream msg;
  msg << "factor_spd: jitter ladder exhausted for " << n << "x" << n << " matrix";
  throw FactorizationError(msg.str());
}

Eigen::MatrixXd solve_spd(const SpdFactor& factor, const Eigen::MatrixXd& rhs) {
  if (rhs.rows() != factor.dim()) {
    throw DimensionError("solve_spd: rhs rows do not match factor dimension");
  }
  Eigen::MatrixXd x = factor.lower.triangularView<Eigen::Lower>().solve(rhs);
  factor.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Eigen::VectorXd solve_spd(const SpdFactor& factor, const Eigen::VectorXd& rhs) {
  if (rhs.size() != factor.dim()) {
    throw DimensionError("solve_spd: rhs size does not match factor dimension");
  }
  Eigen::VectorXd x = factor.lower.triangularView<Eigen::Lower>().solve(rhs);
  factor.lower.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

double log_det(const SpdFactor& factor) {
  return 2.0 * factor.lower.diagonal().array().log().sum();
}

}  // namespace sdegp
