#include "fgamma/optim.hpp"

#include <cmath>

#include "fgamma/discriminators.hpp"

namespace fgamma {

Adam::Adam(std::size_t dim, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps), m_(dim, 0.0), v_(dim, 0.0) {}

void Adam::reset() {
  t_ = 0;
  std::fill(m_.begin(), m_.end(), 0.0);
  std::fill(v_.begin(), v_.end(), 0.0);
}

Vector Adam::direction(const Vector& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  Vector step(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    step[i] = lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
  return step;
}

AscentRun ascend(const Objective& fn, Vector theta0, double rho, const AscentConfig& cfg) {
  AscentRun run;
  project_to_ball(theta0, rho);
  Vector theta = std::move(theta0);
  Vector grad(theta.size());
  double value = fn(theta, &grad);
  if (!std::isfinite(value)) throw InvariantError("ascent objective is not finite at the start");
  run.initial_value = value;
  run.value = value;
  run.theta = theta;
  run.trace.push_back(value);

  Adam adam(theta.size(), cfg.learning_rate);
  double mark = value;
  std::size_t since_mark = 0;
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    const Vector step = adam.direction(grad);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += step[i];
    project_to_ball(theta, rho);
    value = fn(theta, &grad);
    if (!std::isfinite(value)) throw InvariantError("ascent objective became non-finite");
    run.trace.push_back(value);
    run.iterations = it + 1;
    if (value > run.value) {
      run.value = value;
      run.theta = theta;
    }
    if (++since_mark >= cfg.patience) {
      if (run.value - mark < cfg.tolerance) break;
      mark = run.value;
      since_mark = 0;
    }
  }
  return run;
}

MultiStartResult multi_start_ascent(const Objective& fn, std::size_t dim, double rho,
                                    const AscentConfig& cfg) {
  const std::size_t restarts = std::max<std::size_t>(cfg.restarts, 1);
  std::vector<AscentRun> runs(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    Rng rng = make_rng(cfg.seed, r);
    runs[r] = ascend(fn, uniform_ball(rng, dim, cfg.init_scale * rho), rho, cfg);
  });

  MultiStartResult out;
  for (std::size_t r = 0; r < restarts; ++r) {
    out.restart_values.push_back(runs[r].value);
    out.initial_values.push_back(runs[r].initial_value);
    if (r == 0 || runs[r].value > runs[out.best_index].value) out.best_index = r;
  }
  out.best = runs[out.best_index];
  if (cfg.include_zero) {
    Vector zero(dim, 0.0);
    const double v = fn(zero, nullptr);
    if (v > out.best.value) {
      out.best.value = v;
      out.best.theta = zero;
      out.best_index = restarts;
    }
  }
  return out;
}

}  // namespace fgamma
