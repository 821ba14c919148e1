#include "sdegp/estimator.hpp"

#include <cmath>
#include <sstream>

#include "sdegp/errors.hpp"
#include "sdegp/numerics.hpp"

namespace sdegp {

namespace {

// Factors and products that stay fixed while sigma varies.
struct GpWorkspace {
  Eigen::VectorXd y;
  Eigen::VectorXd dt;
  double lambda = 0.0;
  double gamma = 0.0;
  Eigen::MatrixXd k;    // K(X,X)
  Eigen::MatrixXd lkl;  // Lambda K Lambda
  SpdFactor k_factor;
  SpdFactor g_factor;   // G(X,X) + gamma I

  Eigen::Index size() const { return y.size(); }
};

Eigen::VectorXd univariate_increments(const ObservationSet& obs) {
  if (obs.increments.cols() != 1) {
    throw DimensionError("estimator: expected scalar increments (one column)");
  }
  return obs.increments.col(0);
}

GpWorkspace make_workspace(const ObservationSet& obs, const HyperParams& hp) {
  hp.validate();
  GpWorkspace w;
  w.y = univariate_increments(obs);
  w.dt = obs.dt;
  w.lambda = hp.lambda;
  w.gamma = hp.gamma;
  w.k = gram(hp.drift_kernel, obs.states);
  w.lkl = w.dt.asDiagonal() * w.k * w.dt.asDiagonal();
  w.k_factor = factor_spd(w.k);
  Eigen::MatrixXd g = gram(hp.vol_kernel, obs.states);
  Eigen::MatrixXd g_shifted = g;
  g_shifted.diagonal().array() += hp.gamma;
  w.g_factor = factor_spd(g_shifted);
  return w;
}

Eigen::VectorXd noise_diag(const GpWorkspace& w, const Eigen::VectorXd& sigma) {
  return (sigma.array().square() * w.dt.array() + w.lambda).matrix();
}

SpdFactor factor_regression_matrix(const GpWorkspace& w, const Eigen::VectorXd& sigma) {
  Eigen::MatrixXd a = w.lkl;
  a.diagonal() += noise_diag(w, sigma);
  return factor_spd(a);
}

double map_loss_impl(const GpWorkspace& w, const SpdFactor& g_prior_factor,
                     const Eigen::VectorXd& f_bar, const Eigen::VectorXd& sigma_bar) {
  const Eigen::VectorXd d = noise_diag(w, sigma_bar);
  const Eigen::VectorXd residual = w.y - w.dt.cwiseProduct(f_bar);
  const double data_term = (residual.array().square() / d.array()).sum();
  const double barrier = d.array().log().sum();
  const double f_prior = f_bar.dot(solve_spd(w.k_factor, f_bar));
  const double s_prior = sigma_bar.dot(solve_spd(g_prior_factor, sigma_bar));
  return data_term + barrier + f_prior + s_prior;
}

Eigen::VectorXd drift_given_sigma_impl(const GpWorkspace& w, const Eigen::VectorXd& sigma_bar) {
  const SpdFactor a = factor_regression_matrix(w, sigma_bar);
  const Eigen::VectorXd alpha = solve_spd(a, w.y);
  return w.k * w.dt.cwiseProduct(alpha);
}

// The sigma prior inside the profile loss uses the plain G factor (gamma only
// enters the smoothing steps), so workspaces carry G + gamma I and the
// profile path refactors G alone when gamma != 0.
struct ProfileObjective {
  const GpWorkspace& w;
  SpdFactor g_plain;  // G(X,X) with no gamma shift

  explicit ProfileObjective(const GpWorkspace& workspace, const ObservationSet& obs,
                            const HyperParams& hp)
      : w(workspace) {
    if (hp.gamma == 0.0) {
      g_plain = w.g_factor;
    } else {
      g_plain = factor_spd(gram(hp.vol_kernel, obs.states));
    }
  }

  double loss(const Eigen::VectorXd& sigma) const {
    return map_loss_impl(w, g_plain, drift_given_sigma_impl(w, sigma), sigma);
  }

  Eigen::VectorXd grad(const Eigen::VectorXd& sigma) const {
    const SpdFactor a = factor_regression_matrix(w, sigma);
    const Eigen::VectorXd alpha = solve_spd(a, w.y);
    const Eigen::VectorXd d = noise_diag(w, sigma);
    Eigen::VectorXd g = 2.0 * sigma.array() * w.dt.array() *
                        (1.0 / d.array() - alpha.array().square());
    g += 2.0 * solve_spd(g_plain, sigma);
    return g;
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& sigma) const {
    const Eigen::Index n = w.size();
    const SpdFactor a = factor_regression_matrix(w, sigma);
    const Eigen::VectorXd alpha = solve_spd(a, w.y);
    const Eigen::VectorXd d = noise_diag(w, sigma);
    const Eigen::MatrixXd a_inv = solve_spd(a, Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd g_inv = solve_spd(g_plain, Eigen::MatrixXd::Identity(n, n));
    const Eigen::VectorXd u = sigma.cwiseProduct(w.dt).cwiseProduct(alpha);
    Eigen::MatrixXd h = 8.0 * u.asDiagonal() * a_inv * u.asDiagonal() + 2.0 * g_inv;
    h.diagonal() += (2.0 * w.dt.array() / d.array() -
                     4.0 * sigma.array().square() * w.dt.array().square() / d.array().square() -
                     2.0 * w.dt.array() * alpha.array().square())
                        .matrix();
    return h;
  }
};

ScalarObjective as_scalar_objective(const ProfileObjective& profile) {
  return ScalarObjective{
      [&profile](const Eigen::VectorXd& s) { return profile.loss(s); },
      [&profile](const Eigen::VectorXd& s) { return profile.grad(s); },
      [&profile](const Eigen::VectorXd& s) { return profile.hessian(s); },
  };
}

Eigen::VectorXd smooth_through_prior(const GpWorkspace& w, const ObservationSet& obs,
                                     const HyperParams& hp, const Eigen::VectorXd& raw) {
  return gram(hp.vol_kernel, obs.states) * solve_spd(w.g_factor, raw);
}

}  // namespace

std::string to_string(SigmaOptimizer optimizer) {
  return optimizer == SigmaOptimizer::NormBoundedGd ? "NormBoundedGD" : "NewtonArmijo";
}

SigmaOptimizer sigma_optimizer_from_string(const std::string& name) {
  if (name == "NormBoundedGD") return SigmaOptimizer::NormBoundedGd;
  if (name == "NewtonArmijo") return SigmaOptimizer::NewtonArmijo;
  throw ConfigError("unknown optimizer: " + name);
}

std::string to_string(SigmaInit mode) {
  return mode == SigmaInit::SqrtQuadVar ? "SqrtQuadVar" : "LiteralQuadVar";
}

SigmaInit sigma_init_from_string(const std::string& name) {
  if (name == "SqrtQuadVar") return SigmaInit::SqrtQuadVar;
  if (name == "LiteralQuadVar") return SigmaInit::LiteralQuadVar;
  throw ConfigError("unknown init mode: " + name);
}

void FitConfig::validate() const {
  hp.validate();
  if (!(gd_p_floor > 0.0) || !(newton_grad_tol > 0.0)) {
    throw InvalidParamsError("FitConfig tolerances must be positive");
  }
  if (gd_max_iters < 1 || newton_max_iters < 1) {
    throw InvalidParamsError("FitConfig iteration caps must be >= 1");
  }
}

double map_loss(const Eigen::VectorXd& f_bar, const Eigen::VectorXd& sigma_bar,
                const ObservationSet& obs, const HyperParams& hp) {
  if (f_bar.size() != obs.size() || sigma_bar.size() != obs.size()) {
    throw DimensionError("map_loss: vector lengths do not match the observations");
  }
  GpWorkspace w = make_workspace(obs, hp);
  const SpdFactor g_plain =
      hp.gamma == 0.0 ? w.g_factor : factor_spd(gram(hp.vol_kernel, obs.states));
  return map_loss_impl(w, g_plain, f_bar, sigma_bar);
}

Eigen::VectorXd drift_given_sigma(const Eigen::VectorXd& sigma_bar, const ObservationSet& obs,
                                  const HyperParams& hp) {
  if (sigma_bar.size() != obs.size()) {
    throw DimensionError("drift_given_sigma: sigma length does not match the observations");
  }
  GpWorkspace w = make_workspace(obs, hp);
  return drift_given_sigma_impl(w, sigma_bar);
}

PosteriorSummary drift_posterior(const Eigen::MatrixXd& query, const Eigen::VectorXd& sigma_bar,
                                 const ObservationSet& obs, const HyperParams& hp) {
  if (sigma_bar.size() != obs.size()) {
    throw DimensionError("drift_posterior: sigma length does not match the observations");
  }
  if (query.cols() != obs.states.cols()) {
    throw DimensionError("drift_posterior: query dimension does not match the states");
  }
  GpWorkspace w = make_workspace(obs, hp);
  const SpdFactor a = factor_regression_matrix(w, sigma_bar);
  const Eigen::MatrixXd cross = gram(hp.drift_kernel, query, obs.states);  // q x N
  const Eigen::MatrixXd cross_dt = cross * w.dt.asDiagonal();
  const Eigen::MatrixXd a_inv_cross = solve_spd(a, Eigen::MatrixXd(cross_dt.transpose()));

  PosteriorSummary out;
  out.mean = cross_dt * solve_spd(a, w.y);
  out.variance.resize(query.rows());
  for (Eigen::Index i = 0; i < query.rows(); ++i) {
    const Eigen::VectorXd xi = query.row(i).transpose();
    out.variance[i] = eval(hp.drift_kernel, xi, xi) - cross_dt.row(i).dot(a_inv_cross.col(i));
  }
  out.min_variance_pre_clamp = out.variance.minCoeff();
  out.variance = out.variance.cwiseMax(0.0);
  return out;
}

double sigma_profile_loss(const Eigen::VectorXd& sigma_bar, const ObservationSet& obs,
                          const HyperParams& hp) {
  return map_loss(drift_given_sigma(sigma_bar, obs, hp), sigma_bar, obs, hp);
}

Eigen::VectorXd sigma_profile_grad(const Eigen::VectorXd& sigma_bar, const ObservationSet& obs,
                                   const HyperParams& hp) {
  if (sigma_bar.size() != obs.size()) {
    throw DimensionError("sigma_profile_grad: sigma length does not match the observations");
  }
  GpWorkspace w = make_workspace(obs, hp);
  ProfileObjective profile(w, obs, hp);
  return profile.grad(sigma_bar);
}

Eigen::VectorXd init_sigma(const ObservationSet& obs, const HyperParams& hp, SigmaInit mode) {
  GpWorkspace w = make_workspace(obs, hp);
  Eigen::VectorXd raw(obs.size());
  const Eigen::VectorXd y = univariate_increments(obs);
  if (mode == SigmaInit::SqrtQuadVar) {
    raw = y.cwiseAbs().cwiseQuotient(obs.dt.cwiseSqrt());
  } else {
    raw = y.cwiseAbs2().cwiseQuotient(obs.dt);
  }
  return smooth_through_prior(w, obs, hp, raw);
}

Eigen::VectorXd smooth_sigma(const Eigen::VectorXd& sigma_dagger, const ObservationSet& obs,
                             const HyperParams& hp) {
  if (sigma_dagger.size() != obs.size()) {
    throw DimensionError("smooth_sigma: sigma length does not match the observations");
  }
  GpWorkspace w = make_workspace(obs, hp);
  return smooth_through_prior(w, obs, hp, sigma_dagger);
}

Eigen::VectorXd sigma_posterior(const Eigen::MatrixXd& query, const Eigen::VectorXd& sigma_dagger,
                                const ObservationSet& obs, const HyperParams& hp) {
  if (sigma_dagger.size() != obs.size()) {
    throw DimensionError("sigma_posterior: sigma length does not match the observations");
  }
  if (query.cols() != obs.states.cols()) {
    throw DimensionError("sigma_posterior: query dimension does not match the states");
  }
  GpWorkspace w = make_workspace(obs, hp);
  return gram(hp.vol_kernel, query, obs.states) * solve_spd(w.g_factor, sigma_dagger);
}

MinimizeResult norm_bounded_descent(const ScalarObjective& objective, Eigen::VectorXd x0,
                                    int max_iters, double p_floor) {
  double loss = objective.value(x0);
  if (!std::isfinite(loss)) {
    throw NonFiniteLossError("norm_bounded_descent: initial loss is non-finite", 0);
  }
  MinimizeResult result;
  result.x = std::move(x0);
  result.trace.push_back(loss);

  double p = 1.0;  // percent of the iterate norm
  Eigen::VectorXd grad = objective.gradient(result.x);
  while (result.iterations < max_iters && p >= p_floor) {
    const double grad_norm = grad.norm();
    if (grad_norm == 0.0) {
      break;
    }
    const double step_norm = (p / 100.0) * std::max(result.x.norm(), 1e-12);
    const Eigen::VectorXd candidate = result.x - (step_norm / grad_norm) * grad;
    const double candidate_loss = objective.value(candidate);
    ++result.iterations;
    if (std::isfinite(candidate_loss) && candidate_loss < loss) {
      result.x = candidate;
      loss = candidate_loss;
      result.trace.push_back(loss);
      grad = objective.gradient(result.x);
    } else {
      p *= 0.9;
    }
  }
  return result;
}

MinimizeResult newton_armijo(const ScalarObjective& objective, Eigen::VectorXd x0, int max_iters,
                             double grad_tol) {
  static constexpr double kArmijoC1 = 1e-4;
  static constexpr double kMinStep = 1e-16;

  double loss = objective.value(x0);
  if (!std::isfinite(loss)) {
    throw NonFiniteLossError("newton_armijo: initial loss is non-finite", 0);
  }
  MinimizeResult result;
  result.x = std::move(x0);
  result.trace.push_back(loss);
  const Eigen::Index n = result.x.size();

  while (result.iterations < max_iters) {
    const Eigen::VectorXd grad = objective.gradient(result.x);
    if (grad.norm() < grad_tol) {
      break;
    }
    const Eigen::MatrixXd hess = objective.hessian(result.x);
    const double scale = std::max(hess.diagonal().cwiseAbs().mean(), 1.0);

    // Escalate the ridge until the Newton direction points downhill.
    Eigen::VectorXd direction = -grad;
    for (double ridge : {0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2, 1e4}) {
      Eigen::MatrixXd regularized = hess;
      regularized.diagonal().array() += ridge * scale;
      Eigen::LLT<Eigen::MatrixXd> llt(regularized);
      if (llt.info() != Eigen::Success) {
        continue;
      }
      const Eigen::VectorXd candidate = llt.solve(-grad);
      if (grad.dot(candidate) < 0.0) {
        direction = candidate;
        break;
      }
    }

    const double slope = grad.dot(direction);
    double step = 1.0;
    bool accepted = false;
    while (step >= kMinStep) {
      const Eigen::VectorXd candidate = result.x + step * direction;
      const double candidate_loss = objective.value(candidate);
      if (std::isfinite(candidate_loss) && candidate_loss <= loss + kArmijoC1 * step * slope) {
        result.x = candidate;
        loss = candidate_loss;
        result.trace.push_back(loss);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++result.iterations;
    if (!accepted) {
      break;
    }
    (void)n;
  }
  return result;
}

MinimizeResult minimize_sigma(const ObservationSet& obs, const HyperParams& hp,
                              const FitConfig& config) {
  config.validate();
  GpWorkspace w = make_workspace(obs, hp);
  ProfileObjective profile(w, obs, hp);
  const ScalarObjective objective = as_scalar_objective(profile);
  Eigen::VectorXd start = init_sigma(obs, hp, config.init_mode);
  if (config.optimizer == SigmaOptimizer::NormBoundedGd) {
    return norm_bounded_descent(objective, std::move(start), config.gd_max_iters,
                                config.gd_p_floor);
  }
  return newton_armijo(objective, std::move(start), config.newton_max_iters,
                       config.newton_grad_tol);
}

FitResult fit(const ObservationSet& obs, const FitConfig& config) {
  config.validate();
  if (obs.size() < 2) {
    throw TooFewPointsError("fit: need at least two observations");
  }
  MinimizeResult minimized = minimize_sigma(obs, config.hp, config);
  FitResult result;
  result.sigma_dagger = minimized.x;
  result.sigma_bar = smooth_sigma(result.sigma_dagger, obs, config.hp);
  result.f_bar = drift_given_sigma(result.sigma_bar, obs, config.hp);
  result.loss_trace = std::move(minimized.trace);
  result.final_loss = result.loss_trace.back();
  result.iterations = minimized.iterations;
  result.config = config;
  result.training_states = obs.states;
  return result;
}

std::vector<FitResult> fit_multivariate(const ObservationSet& obs,
                                        const std::vector<FitConfig>& configs) {
  const Eigen::Index d = obs.increments.cols();
  if (static_cast<Eigen::Index>(configs.size()) != d) {
    throw DimensionError("fit_multivariate: one FitConfig per increment column required");
  }
  std::vector<FitResult> results;
  results.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    ObservationSet slice;
    slice.states = obs.states;
    slice.increments = obs.increments.col(i);
    slice.dt = obs.dt;
    results.push_back(fit(slice, configs[static_cast<std::size_t>(i)]));
  }
  return results;
}

double coupled_sigma_map_loss(const Eigen::MatrixXd& f_bars, const Eigen::MatrixXd& sigmas,
                              const ObservationSet& obs, const std::vector<HyperParams>& hps) {
  const Eigen::Index n = obs.size();
  const Eigen::Index d = obs.increments.cols();
  if (f_bars.rows() != n || sigmas.rows() != n || f_bars.cols() != d || sigmas.cols() != d ||
      static_cast<Eigen::Index>(hps.size()) != d) {
    throw DimensionError("coupled_sigma_map_loss: shape mismatch");
  }
  const double lambda = hps.front().lambda;
  const Eigen::VectorXd total_noise =
      (sigmas.array().square().rowwise().sum() * obs.dt.array() + lambda).matrix();

  double loss = total_noise.array().log().sum();
  for (Eigen::Index i = 0; i < d; ++i) {
    const HyperParams& hp = hps[static_cast<std::size_t>(i)];
    hp.validate();
    const Eigen::VectorXd residual =
        obs.increments.col(i) - obs.dt.cwiseProduct(f_bars.col(i));
    loss += (residual.array().square() / total_noise.array()).sum();
    const SpdFactor k_factor = factor_spd(gram(hp.drift_kernel, obs.states));
    const SpdFactor g_factor = factor_spd(gram(hp.vol_kernel, obs.states));
    loss += f_bars.col(i).dot(solve_spd(k_factor, Eigen::VectorXd(f_bars.col(i))));
    loss += sigmas.col(i).dot(solve_spd(g_factor, Eigen::VectorXd(sigmas.col(i))));
  }
  return loss;
}

}  // namespace sdegp
