#pragma once

#include <cstdint>
#include <functional>

#include "fgamma/common.hpp"

namespace fgamma {

/// Settings for projected gradient ascent over a parameter ball.
struct AscentConfig {
  std::size_t restarts = 5;
  std::size_t max_iterations = 500;
  double learning_rate = 0.05;
  /// Initial points are uniform on the ball scaled by this factor.
  double init_scale = 0.1;
  /// Stop once the best value has improved by less than this over
  /// `patience` iterations.
  double tolerance = 1e-10;
  std::size_t patience = 50;
  std::uint64_t seed = 0;
  /// Also score theta = 0 (the constant member of squashed classes).
  bool include_zero = true;
};

/// Adam moment estimates with bias correction.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t dim, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);

  /// Step direction for the given gradient (to be added for ascent).
  Vector direction(const Vector& grad);
  void set_learning_rate(double lr) { lr_ = lr; }
  void reset();

 private:
  double lr_ = 0.0;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::size_t t_ = 0;
  Vector m_;
  Vector v_;
};

/// Returns f(theta) and, when grad is non-null, writes its gradient.
using Objective = std::function<double(const Vector& theta, Vector* grad)>;

struct AscentRun {
  Vector theta;
  double value = 0.0;
  double initial_value = 0.0;
  Vector trace;
  std::size_t iterations = 0;
};

/// Single projected Adam ascent from theta0; returns the best point visited.
AscentRun ascend(const Objective& fn, Vector theta0, double rho, const AscentConfig& cfg);

struct MultiStartResult {
  AscentRun best;
  std::size_t best_index = 0;
  std::vector<double> restart_values;
  std::vector<double> initial_values;
};

/// Restarts run in parallel with seeds derived from (cfg.seed, restart).
/// The maximum wins, lowest restart index on ties. When cfg.include_zero
/// is set, theta = 0 competes as an extra candidate after the restarts.
MultiStartResult multi_start_ascent(const Objective& fn, std::size_t dim, double rho,
                                    const AscentConfig& cfg);

}  // namespace fgamma
