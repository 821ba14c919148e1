#include "sdegp/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdegp/errors.hpp"
#include "sdegp/rng.hpp"

namespace sdegp {

namespace {

void format_full_precision(std::string& out, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  out += buf;
}

}  // namespace

ProcessSpec ProcessSpec::exp_decay_vol(double mu, double b) {
  ProcessSpec p;
  p.family = Family::ExpDecayVol;
  p.mu = mu;
  p.b = b;
  return p;
}

ProcessSpec ProcessSpec::trigonometric(double k_freq, double b) {
  ProcessSpec p;
  p.family = Family::Trigonometric;
  p.k_freq = k_freq;
  p.b = b;
  return p;
}

ProcessSpec ProcessSpec::gbm(double mu, double sigma) {
  ProcessSpec p;
  p.family = Family::Gbm;
  p.mu = mu;
  p.sigma = sigma;
  return p;
}

ProcessSpec ProcessSpec::ou(double theta, double sigma) {
  ProcessSpec p;
  p.family = Family::Ou;
  p.theta = theta;
  p.sigma = sigma;
  return p;
}

std::string to_string(ProcessSpec::Family family) {
  switch (family) {
    case ProcessSpec::Family::ExpDecayVol: return "ExpDecayVol";
    case ProcessSpec::Family::Trigonometric: return "Trigonometric";
    case ProcessSpec::Family::Gbm: return "GBM";
    case ProcessSpec::Family::Ou: return "OU";
  }
  return "?";
}

ProcessSpec::Family process_family_from_string(const std::string& name) {
  if (name == "ExpDecayVol") return ProcessSpec::Family::ExpDecayVol;
  if (name == "Trigonometric") return ProcessSpec::Family::Trigonometric;
  if (name == "GBM" || name == "Gbm") return ProcessSpec::Family::Gbm;
  if (name == "OU" || name == "Ou") return ProcessSpec::Family::Ou;
  throw ConfigError("unknown process family: " + name);
}

double drift_of(const ProcessSpec& process, double x) {
  switch (process.family) {
    case ProcessSpec::Family::ExpDecayVol: return process.mu * x;
    case ProcessSpec::Family::Trigonometric: return std::sin(2.0 * process.k_freq * M_PI * x);
    case ProcessSpec::Family::Gbm: return process.mu * x;
    case ProcessSpec::Family::Ou: return -process.theta * x;
  }
  return 0.0;
}

double vol_of(const ProcessSpec& process, double x) {
  switch (process.family) {
    case ProcessSpec::Family::ExpDecayVol: return process.b * std::exp(-x * x);
    case ProcessSpec::Family::Trigonometric:
      return process.b * std::cos(2.0 * process.k_freq * M_PI * x);
    case ProcessSpec::Family::Gbm: return process.sigma * x;
    case ProcessSpec::Family::Ou: return process.sigma;
  }
  return 0.0;
}

Trajectory euler_maruyama(const ProcessSpec& process, double x0, double dt, int n_steps,
                          std::uint64_t seed) {
  if (!(dt > 0.0)) {
    throw InvalidParamsError("euler_maruyama: dt must be positive");
  }
  if (n_steps < 1) {
    throw InvalidParamsError("euler_maruyama: n_steps must be >= 1");
  }
  Trajectory traj;
  traj.times.resize(n_steps + 1);
  traj.values.resize(n_steps + 1, 1);
  traj.seed = seed;
  traj.process = process;

  NormalSampler normals(seed);
  const double sqrt_dt = std::sqrt(dt);
  double x = x0;
  traj.times[0] = 0.0;
  traj.values(0, 0) = x;
  for (int n = 0; n < n_steps; ++n) {
    x += drift_of(process, x) * dt + vol_of(process, x) * sqrt_dt * normals.next();
    if (!std::isfinite(x)) {
      std::ostringstream msg;
      msg << "euler_maruyama: state became non-finite at step " << n + 1;
      throw NonFiniteStateError(msg.str(), n + 1);
    }
    traj.times[n + 1] = (n + 1) * dt;
    traj.values(n + 1, 0) = x;
  }
  return traj;
}

Trajectory subsample(const Trajectory& trajectory, int k) {
  if (k < 1) {
    throw InvalidParamsError("subsample: k must be >= 1");
  }
  if (k == 1) {
    return trajectory;
  }
  if (trajectory.length() <= k) {
    throw FactorTooLargeError("subsample: factor leaves fewer than two samples");
  }
  const Eigen::Index kept = (trajectory.length() - 1) / k + 1;
  Trajectory out;
  out.seed = trajectory.seed;
  out.process = trajectory.process;
  out.times.resize(kept);
  out.values.resize(kept, trajectory.dim());
  for (Eigen::Index i = 0; i < kept; ++i) {
    out.times[i] = trajectory.times[i * k];
    out.values.row(i) = trajectory.values.row(i * k);
  }
  return out;
}

ObservationSet to_observations(const Trajectory& trajectory) {
  const Eigen::Index n = trajectory.length();
  if (n < 2) {
    throw TooShortError("to_observations: trajectory needs at least two samples");
  }
  ObservationSet obs;
  obs.states = trajectory.values.topRows(n - 1);
  obs.increments = trajectory.values.bottomRows(n - 1) - trajectory.values.topRows(n - 1);
  obs.dt = trajectory.times.tail(n - 1) - trajectory.times.head(n - 1);
  if (!(obs.dt.array() > 0.0).all()) {
    throw TooShortError("to_observations: timestamps are not strictly increasing");
  }
  return obs;
}

Trajectory combine_trajectories(const std::vector<Trajectory>& components) {
  if (components.empty()) {
    throw EmptyInputError("combine_trajectories: no components");
  }
  const Eigen::Index n = components.front().length();
  Trajectory out;
  out.times = components.front().times;
  out.seed = components.front().seed;
  out.values.resize(n, static_cast<Eigen::Index>(components.size()));
  for (std::size_t d = 0; d < components.size(); ++d) {
    const Trajectory& c = components[d];
    if (c.length() != n || c.dim() != 1 || (c.times - out.times).cwiseAbs().maxCoeff() != 0.0) {
      throw DimensionError("combine_trajectories: components must share the time grid");
    }
    out.values.col(static_cast<Eigen::Index>(d)) = c.values.col(0);
  }
  return out;
}

ObservationSet subset_observations(const ObservationSet& obs, std::span<const int> indices) {
  ObservationSet out;
  const Eigen::Index m = static_cast<Eigen::Index>(indices.size());
  out.states.resize(m, obs.states.cols());
  out.increments.resize(m, obs.increments.cols());
  out.dt.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const int idx = indices[static_cast<std::size_t>(i)];
    if (idx < 0 || idx >= obs.size()) {
      throw DimensionError("subset_observations: index out of range");
    }
    out.states.row(i) = obs.states.row(idx);
    out.increments.row(i) = obs.increments.row(idx);
    out.dt[i] = obs.dt[idx];
  }
  return out;
}

void write_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::string text = "t,";
  if (trajectory.dim() == 1) {
    text += "x";
  } else {
    for (Eigen::Index d = 0; d < trajectory.dim(); ++d) {
      if (d > 0) text += ',';
      text += "x" + std::to_string(d + 1);
    }
  }
  text += '\n';
  for (Eigen::Index i = 0; i < trajectory.length(); ++i) {
    format_full_precision(text, trajectory.times[i]);
    for (Eigen::Index d = 0; d < trajectory.dim(); ++d) {
      text += ',';
      format_full_precision(text, trajectory.values(i, d));
    }
    text += '\n';
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open for writing: " + path.string());
  }
  out << text;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open trajectory CSV: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw TooShortError("trajectory CSV is empty: " + path.string());
  }
  Eigen::Index cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',')) + 1;
  if (cols < 2 || line.rfind("t,", 0) != 0) {
    throw ConfigError("trajectory CSV must start with a `t,x...` header: " + path.string());
  }
  std::vector<double> flat;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    Eigen::Index got = 0;
    while (std::getline(ls, cell, ',')) {
      flat.push_back(std::stod(cell));
      ++got;
    }
    if (got != cols) {
      throw ConfigError("trajectory CSV row has wrong column count: " + path.string());
    }
    ++rows;
  }
  if (rows < 2) {
    throw TooShortError("trajectory CSV needs at least two rows: " + path.string());
  }
  Trajectory traj;
  traj.times.resize(rows);
  traj.values.resize(rows, cols - 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    traj.times[i] = flat[static_cast<std::size_t>(i * cols)];
    for (Eigen::Index d = 0; d < cols - 1; ++d) {
      traj.values(i, d) = flat[static_cast<std::size_t>(i * cols + d + 1)];
    }
  }
  return traj;
}

}  // namespace sdegp
