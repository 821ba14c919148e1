#include "sdegp/kernels.hpp"

#include <cmath>
#include <sstream>

#include "sdegp/errors.hpp"

namespace sdegp {

namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873;

double matern52(double r, double variance, double lengthscale) {
  const double s = kSqrt5 * r / lengthscale;
  return variance * (1.0 + s + 5.0 * r * r / (3.0 * lengthscale * lengthscale)) * std::exp(-s);
}

double param_by_name(const HyperParams& hp, const std::string& name) {
  if (name == "drift.variance") return hp.drift_kernel.variance;
  if (name == "drift.lengthscale") return hp.drift_kernel.lengthscale;
  if (name == "drift.offset") return hp.drift_kernel.offset;
  if (name == "drift.level") return hp.drift_kernel.level;
  if (name == "vol.variance") return hp.vol_kernel.variance;
  if (name == "vol.lengthscale") return hp.vol_kernel.lengthscale;
  if (name == "vol.offset") return hp.vol_kernel.offset;
  if (name == "vol.level") return hp.vol_kernel.level;
  if (name == "lambda") return hp.lambda;
  if (name == "gamma") return hp.gamma;
  throw InvalidParamsError("unknown search parameter: " + name);
}

void set_param_by_name(HyperParams& hp, const std::string& name, double value) {
  if (name == "drift.variance") hp.drift_kernel.variance = value;
  else if (name == "drift.lengthscale") hp.drift_kernel.lengthscale = value;
  else if (name == "drift.offset") hp.drift_kernel.offset = value;
  else if (name == "drift.level") hp.drift_kernel.level = value;
  else if (name == "vol.variance") hp.vol_kernel.variance = value;
  else if (name == "vol.lengthscale") hp.vol_kernel.lengthscale = value;
  else if (name == "vol.offset") hp.vol_kernel.offset = value;
  else if (name == "vol.level") hp.vol_kernel.level = value;
  else if (name == "lambda") hp.lambda = value;
  else if (name == "gamma") hp.gamma = value;
  else throw InvalidParamsError("unknown search parameter: " + name);
}

void append_kernel_bounds(std::vector<ParamBound>& bounds, const KernelSpec& kernel,
                          const std::string& prefix) {
  auto log_bound = [&](const std::string& name, double center) {
    const double c = std::log10(center);
    bounds.push_back({prefix + name, c - 3.0, c + 3.0, true});
  };
  switch (kernel.family) {
    case KernelFamily::Matern52:
      log_bound("variance", kernel.variance);
      log_bound("lengthscale", kernel.lengthscale);
      break;
    case KernelFamily::Linear:
      log_bound("variance", kernel.variance);
      bounds.push_back({prefix + "offset", 0.0, 10.0, false});
      break;
    case KernelFamily::WhiteNoise:
      log_bound("level", kernel.level > 0.0 ? kernel.level : 1.0);
      break;
  }
}

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Matern52: return "Matern52";
    case KernelFamily::Linear: return "Linear";
    case KernelFamily::WhiteNoise: return "WhiteNoise";
  }
  return "?";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "Matern52") return KernelFamily::Matern52;
  if (name == "Linear") return KernelFamily::Linear;
  if (name == "WhiteNoise") return KernelFamily::WhiteNoise;
  throw InvalidParamsError("unknown kernel family: " + name);
}

void KernelSpec::validate() const {
  switch (family) {
    case KernelFamily::Matern52:
      if (!(variance > 0.0) || !(lengthscale > 0.0)) {
        throw InvalidParamsError("Matern52 requires variance > 0 and lengthscale > 0");
      }
      break;
    case KernelFamily::Linear:
      if (!(variance > 0.0) || offset < 0.0) {
        throw InvalidParamsError("Linear requires variance > 0 and offset >= 0");
      }
      break;
    case KernelFamily::WhiteNoise:
      if (level < 0.0) {
        throw InvalidParamsError("WhiteNoise requires level >= 0");
      }
      break;
  }
}

void HyperParams::validate() const {
  drift_kernel.validate();
  vol_kernel.validate();
  if (!(lambda > 0.0)) {
    throw InvalidParamsError("lambda must be > 0");
  }
  if (gamma < 0.0) {
    throw InvalidParamsError("gamma must be >= 0");
  }
}

double eval(const KernelSpec& kernel, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  kernel.validate();
  if (x.size() != y.size()) {
    throw DimensionError("kernel eval: point dimensions differ");
  }
  switch (kernel.family) {
    case KernelFamily::Matern52:
      return matern52((x - y).norm(), kernel.variance, kernel.lengthscale);
    case KernelFamily::Linear:
      return kernel.variance * (x.dot(y) + kernel.offset);
    case KernelFamily::WhiteNoise:
      // Exact coordinate equality; only meaningful on Gram diagonals.
      return (x.array() == y.array()).all() ? kernel.level : 0.0;
  }
  return 0.0;
}

double eval(const KernelSpec& kernel, double x, double y) {
  Eigen::VectorXd vx(1), vy(1);
  vx << x;
  vy << y;
  return eval(kernel, vx, vy);
}

Eigen::MatrixXd gram(const KernelSpec& kernel, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z) {
  kernel.validate();
  if (X.rows() == 0 || Z.rows() == 0) {
    throw EmptyInputError("gram: empty point list");
  }
  if (X.cols() != Z.cols()) {
    throw DimensionError("gram: point dimensions differ");
  }
  Eigen::MatrixXd out(X.rows(), Z.rows());
  switch (kernel.family) {
    case KernelFamily::Matern52:
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < Z.rows(); ++j) {
          out(i, j) = matern52((X.row(i) - Z.row(j)).norm(), kernel.variance, kernel.lengthscale);
        }
      }
      break;
    case KernelFamily::Linear:
      out.noalias() = X * Z.transpose();
      out.array() += kernel.offset;
      out *= kernel.variance;
      break;
    case KernelFamily::WhiteNoise:
      for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < Z.rows(); ++j) {
          out(i, j) = (X.row(i).array() == Z.row(j).array()).all() ? kernel.level : 0.0;
        }
      }
      break;
  }
  return out;
}

Eigen::MatrixXd gram(const KernelSpec& kernel, const Eigen::MatrixXd& X) {
  return gram(kernel, X, X);
}

double default_lengthscale(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  if (n < 2) {
    throw TooFewPointsError("default_lengthscale needs at least two points");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      total += 2.0 * (points.row(i) - points.row(j)).norm();
    }
  }
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

KernelSpec default_kernel(KernelFamily family, const Eigen::MatrixXd& points) {
  switch (family) {
    case KernelFamily::Matern52:
      return KernelSpec::matern52(1.0, std::max(default_lengthscale(points), kMinLengthscale));
    case KernelFamily::Linear:
      return KernelSpec::linear(1.0, 1.0);
    case KernelFamily::WhiteNoise:
      return KernelSpec::white_noise(1.0);
  }
  return KernelSpec{};
}

SearchSpace build_search_space(const HyperParams& base, bool include_lambda_gamma) {
  base.validate();
  SearchSpace space;
  space.base = base;
  append_kernel_bounds(space.bounds, base.drift_kernel, "drift.");
  append_kernel_bounds(space.bounds, base.vol_kernel, "vol.");
  if (include_lambda_gamma) {
    const double cl = std::log10(base.lambda);
    space.bounds.push_back({"lambda", cl - 3.0, cl + 3.0, true});
    const double cg = std::log10(base.gamma > 0.0 ? base.gamma : 1e-8);
    space.bounds.push_back({"gamma", cg - 3.0, cg + 3.0, true});
  }
  return space;
}

Eigen::VectorXd encode_params(const HyperParams& hp, const SearchSpace& space) {
  Eigen::VectorXd out(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    const ParamBound& bound = space.bounds[i];
    const double raw = param_by_name(hp, bound.name);
    const double value = bound.log10_scale ? std::log10(raw) : raw;
    if (!(value >= bound.lo && value <= bound.hi)) {
      std::ostringstream msg;
      msg << "encode_params: " << bound.name << " = " << raw << " outside ["
          << bound.lo << ", " << bound.hi << "]" << (bound.log10_scale ? " (log10)" : "");
      throw OutOfBoundsError(msg.str());
    }
    out[i] = value;
  }
  return out;
}

HyperParams decode_params(const Eigen::VectorXd& values, const SearchSpace& space) {
  if (values.size() != space.dim()) {
    throw DimensionError("decode_params: vector length does not match search space");
  }
  HyperParams hp = space.base;
  for (int i = 0; i < space.dim(); ++i) {
    const ParamBound& bound = space.bounds[i];
    const double value = values[i];
    if (!(value >= bound.lo && value <= bound.hi)) {
      std::ostringstream msg;
      msg << "decode_params: coordinate " << i << " (" << bound.name << ") = " << value
          << " outside [" << bound.lo << ", " << bound.hi << "]";
      throw OutOfBoundsError(msg.str());
    }
    set_param_by_name(hp, bound.name, bound.log10_scale ? std::pow(10.0, value) : value);
  }
  return hp;
}

}  // namespace sdegp
