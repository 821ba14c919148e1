#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdegp {

/// Catalog of scalar diffusion processes used by the experiments.
struct ProcessSpec {
  enum class Family { ExpDecayVol, Trigonometric, Gbm, Ou };

  Family family = Family::Ou;
  double mu = 0.0;      // drift rate (ExpDecayVol, Gbm)
  double b = 0.0;       // volatility amplitude (ExpDecayVol, Trigonometric)
  double k_freq = 1.0;  // frequency (Trigonometric)
  double sigma = 0.0;   // volatility level (Gbm, Ou)
  double theta = 0.0;   // mean-reversion rate (Ou); negative values run the explosive variant

  static ProcessSpec exp_decay_vol(double mu, double b);
  static ProcessSpec trigonometric(double k_freq, double b);
  static ProcessSpec gbm(double mu, double sigma);
  static ProcessSpec ou(double theta, double sigma);
};

std::string to_string(ProcessSpec::Family family);
ProcessSpec::Family process_family_from_string(const std::string& name);

double drift_of(const ProcessSpec& process, double x);
double vol_of(const ProcessSpec& process, double x);

/// Discretely observed path. `values` holds one row per sample; columns are
/// state dimensions (one column in the scalar case).
struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd values;
  std::uint64_t seed = 0;
  std::optional<ProcessSpec> process;

  Eigen::Index length() const { return times.size(); }
  Eigen::Index dim() const { return values.cols(); }
};

/// Training triples (X_n, Y_n, dt_n) with Y_n = X_{n+1} - X_n.
struct ObservationSet {
  Eigen::MatrixXd states;      // N x d
  Eigen::MatrixXd increments;  // N x d
  Eigen::VectorXd dt;          // N, all positive

  Eigen::Index size() const { return dt.size(); }
  Eigen::Index dim() const { return states.cols(); }
};

/// Explicit first-order path simulation on a regular grid: each step adds
/// drift*dt plus vol*sqrt(dt) times a seeded standard normal.
///
/// Throws NonFiniteStateError when the state leaves the finite range.
Trajectory euler_maruyama(const ProcessSpec& process, double x0, double dt, int n_steps,
                          std::uint64_t seed);

/// Keeps samples 0, k, 2k, ...; time spacing becomes k*dt.
Trajectory subsample(const Trajectory& trajectory, int k);

ObservationSet to_observations(const Trajectory& trajectory);

/// Stacks equally-timed scalar trajectories into one multivariate trajectory.
Trajectory combine_trajectories(const std::vector<Trajectory>& components);

/// Row subset of an observation set (partitioning machinery).
ObservationSet subset_observations(const ObservationSet& obs, std::span<const int> indices);

/// CSV with header `t,x` (or `t,x1,...,xd`), full double precision.
void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace sdegp
