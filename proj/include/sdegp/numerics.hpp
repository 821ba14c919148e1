#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>

namespace sdegp {

/// Cholesky factor of a symmetric positive definite matrix plus the jitter
/// that was required to make the factorization succeed.
struct SpdFactor {
  Eigen::MatrixXd lower;  // L with A + jitter*I = L * L^T
  double jitter = 0.0;

  Eigen::Index dim() const { return lower.rows(); }
};

/// Relative jitter ladder; entries are multiplied by the mean diagonal of the
/// input before being added.
inline constexpr std::array<double, 5> kDefaultJitterLadder = {0.0, 1e-10, 1e-8, 1e-6, 1e-4};

/// Factors `matrix + j*I` for the smallest ladder entry j that admits a
/// Cholesky factorization. Ladder entries are relative to the mean diagonal.
///
/// Throws NotSymmetricError if the input is asymmetric beyond 1e-10 relative
/// tolerance, FactorizationError if the whole ladder is exhausted.
SpdFactor factor_spd(const Eigen::MatrixXd& matrix,
                     std::span<const double> jitter_ladder = kDefaultJitterLadder);

/// Solves (A + jitter*I) x = rhs using the cached factor.
Eigen::MatrixXd solve_spd(const SpdFactor& factor, const Eigen::MatrixXd& rhs);
Eigen::VectorXd solve_spd(const SpdFactor& factor, const Eigen::VectorXd& rhs);

/// log det(A + jitter*I) = 2 * sum(log diag(L)).
double log_det(const SpdFactor& factor);

}  // namespace sdegp
