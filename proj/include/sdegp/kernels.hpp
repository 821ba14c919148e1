#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sdegp {

enum class KernelFamily { Matern52, Linear, WhiteNoise };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// A parameterized covariance function. Only the parameters relevant to the
/// family are meaningful; the rest keep their defaults.
struct KernelSpec {
  KernelFamily family = KernelFamily::Matern52;
  double variance = 1.0;     // sigma^2 (Matern52, Linear)
  double lengthscale = 1.0;  // l (Matern52)
  double offset = 0.0;       // c (Linear)
  double level = 1.0;        // c (WhiteNoise)

  static KernelSpec matern52(double variance, double lengthscale) {
    KernelSpec k;
    k.family = KernelFamily::Matern52;
    k.variance = variance;
    k.lengthscale = lengthscale;
    return k;
  }
  static KernelSpec linear(double variance, double offset) {
    KernelSpec k;
    k.family = KernelFamily::Linear;
    k.variance = variance;
    k.offset = offset;
    return k;
  }
  static KernelSpec white_noise(double level) {
    KernelSpec k;
    k.family = KernelFamily::WhiteNoise;
    k.level = level;
    return k;
  }

  /// Throws InvalidParamsError on violated positivity constraints.
  void validate() const;
};

/// Hyperparameters of the whole recovery: the drift prior K, the volatility
/// prior G, the discretization-noise variance lambda and the smoothing noise
/// variance gamma.
struct HyperParams {
  KernelSpec drift_kernel;
  KernelSpec vol_kernel;
  double lambda = 1e-4;
  double gamma = 1e-4;

  void validate() const;
};

/// Covariance between two points (rows of a point matrix).
double eval(const KernelSpec& kernel, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double eval(const KernelSpec& kernel, double x, double y);

/// Gram matrix with entry (i, j) = k(X.row(i), Z.row(j)).
Eigen::MatrixXd gram(const KernelSpec& kernel, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z);
Eigen::MatrixXd gram(const KernelSpec& kernel, const Eigen::MatrixXd& X);

/// Mean pairwise distance over ordered pairs i != j. Returns 0 for coincident
/// points; the default-parameter rule floors that before use.
double default_lengthscale(const Eigen::MatrixXd& points);

/// Lengthscale floor applied when building default parameters from data.
inline constexpr double kMinLengthscale = 1e-6;

/// Unoptimized kernel for a point set: lengthscale from the data (floored),
/// every other parameter 1.
KernelSpec default_kernel(KernelFamily family, const Eigen::MatrixXd& points);

// --- search-space encoding -------------------------------------------------

struct ParamBound {
  std::string name;  // "drift.variance", "vol.lengthscale", "lambda", ...
  double lo = 0.0;
  double hi = 0.0;
  bool log10_scale = true;
};

/// Box bounds for hyperparameter search together with the base HyperParams
/// that decoding overwrites.
struct SearchSpace {
  HyperParams base;
  std::vector<ParamBound> bounds;

  int dim() const { return static_cast<int>(bounds.size()); }
};

/// Positive parameters are searched in log10 space within +-3 decades of the
/// base value; the linear-kernel offset is searched linearly in [0, 10].
SearchSpace build_search_space(const HyperParams& base, bool include_lambda_gamma = false);

Eigen::VectorXd encode_params(const HyperParams& hp, const SearchSpace& space);
HyperParams decode_params(const Eigen::VectorXd& values, const SearchSpace& space);

}  // namespace sdegp
