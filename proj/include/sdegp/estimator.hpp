#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sdegp/kernels.hpp"
#include "sdegp/simulate.hpp"

namespace sdegp {

enum class SigmaOptimizer { NormBoundedGd, NewtonArmijo };
enum class SigmaInit { SqrtQuadVar, LiteralQuadVar };

std::string to_string(SigmaOptimizer optimizer);
SigmaOptimizer sigma_optimizer_from_string(const std::string& name);
std::string to_string(SigmaInit mode);
SigmaInit sigma_init_from_string(const std::string& name);

struct FitConfig {
  HyperParams hp;
  SigmaOptimizer optimizer = SigmaOptimizer::NormBoundedGd;
  int gd_max_iters = 100000;
  double gd_p_floor = 1e-20;
  double newton_grad_tol = 1e-8;
  int newton_max_iters = 1000;
  SigmaInit init_mode = SigmaInit::SqrtQuadVar;

  void validate() const;
};

struct FitResult {
  Eigen::VectorXd sigma_dagger;    // raw minimizer of the profile loss
  Eigen::VectorXd sigma_bar;       // smoothed volatility estimate
  Eigen::VectorXd f_bar;           // drift estimate at the training points
  std::vector<double> loss_trace;  // nonincreasing, initial value first
  double final_loss = 0.0;
  int iterations = 0;  // optimizer iterations consumed, rejected trials included
  FitConfig config;
  Eigen::MatrixXd training_states;
};

/// Negative log posterior of (f_bar, sigma_bar) given the increments:
/// a weighted data misfit, the log noise-variance barrier and the two
/// kernel-prior quadratics.
double map_loss(const Eigen::VectorXd& f_bar, const Eigen::VectorXd& sigma_bar,
                const ObservationSet& obs, const HyperParams& hp);

/// Closed-form minimizer of map_loss over f_bar at fixed sigma_bar.
Eigen::VectorXd drift_given_sigma(const Eigen::VectorXd& sigma_bar, const ObservationSet& obs,
                                  const HyperParams& hp);

struct PosteriorSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // clamped at zero
  double min_variance_pre_clamp = 0.0;
};

/// GP posterior of the drift at query points, with the per-observation noise
/// built from sigma_bar at the training points.
PosteriorSummary drift_posterior(const Eigen::MatrixXd& query, const Eigen::VectorXd& sigma_bar,
                                 const ObservationSet& obs, const HyperParams& hp);

/// map_loss with f_bar profiled out, a function of sigma_bar alone.
double sigma_profile_loss(const Eigen::VectorXd& sigma_bar, const ObservationSet& obs,
                          const HyperParams& hp);

/// Analytic gradient of sigma_profile_loss (differentiating through the
/// noise matrix and the profiled drift).
Eigen::VectorXd sigma_profile_grad(const Eigen::VectorXd& sigma_bar, const ObservationSet& obs,
                                   const HyperParams& hp);

/// Quadratic-variation initial volatility, smoothed through the vol prior.
Eigen::VectorXd init_sigma(const ObservationSet& obs, const HyperParams& hp, SigmaInit mode);

Eigen::VectorXd smooth_sigma(const Eigen::VectorXd& sigma_dagger, const ObservationSet& obs,
                             const HyperParams& hp);

/// Volatility posterior mean at query points, conditioned on the noisy
/// minimizer sigma_dagger.
Eigen::VectorXd sigma_posterior(const Eigen::MatrixXd& query, const Eigen::VectorXd& sigma_dagger,
                                const ObservationSet& obs, const HyperParams& hp);

struct MinimizeResult {
  Eigen::VectorXd x;
  std::vector<double> trace;  // accepted losses, initial value first
  int iterations = 0;
};

/// Generic objective bundle; hessian may be empty for gradient descent.
struct ScalarObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

/// Descent along the negative gradient with the step rescaled to p% of the
/// iterate norm; p shrinks by 0.9 on every rejected trial and never grows.
MinimizeResult norm_bounded_descent(const ScalarObjective& objective, Eigen::VectorXd x0,
                                    int max_iters, double p_floor);

/// Newton direction from a ladder-regularized Hessian with Armijo
/// backtracking (c1 = 1e-4, halving).
MinimizeResult newton_armijo(const ScalarObjective& objective, Eigen::VectorXd x0, int max_iters,
                             double grad_tol);

MinimizeResult minimize_sigma(const ObservationSet& obs, const HyperParams& hp,
                              const FitConfig& config);

/// init_sigma -> minimize_sigma -> smooth_sigma -> drift_given_sigma.
FitResult fit(const ObservationSet& obs, const FitConfig& config);

/// Independent per-dimension fits sharing the state matrix; the diffusion is
/// assumed diagonal so each column of the increments is fitted on its own.
std::vector<FitResult> fit_multivariate(const ObservationSet& obs,
                                        const std::vector<FitConfig>& configs);

/// Joint MAP loss over all diffusion columns, with the log barrier coupling
/// the per-dimension volatilities. Evaluator only; the default pipeline fits
/// dimensions independently.
double coupled_sigma_map_loss(const Eigen::MatrixXd& f_bars, const Eigen::MatrixXd& sigmas,
                              const ObservationSet& obs, const std::vector<HyperParams>& hps);

}  // namespace sdegp
