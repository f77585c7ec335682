#pragma once

#include <span>

#include "fgamma/cgf.hpp"
#include "fgamma/discriminators.hpp"
#include "fgamma/optim.hpp"
#include "fgamma/sample.hpp"

namespace fgamma {

struct EstimateResult {
  double value = 0.0;
  Vector theta_star;
  double nu_star = 0.0;
  /// Objective per ascent iteration for the winning restart.
  Vector ascent_trace;
  std::size_t restarts_used = 0;
  /// Best value reached by each restart, and each restart's starting value.
  std::vector<double> restart_values;
  std::vector<double> restart_initial_values;
  /// Dictionary classes: index of the winning member.
  std::size_t member = 0;
  bool exact = false;
};

/// E_q[h] - Lambda_f^p[h] for already-evaluated values of h.
double objective_from_values(const DivergenceGenerator& gen, std::span<const double> hq,
                             std::span<const double> hp, double* nu_star = nullptr);

/// E_q[h_theta] - Lambda_f^p[h_theta], with the envelope gradient in theta
/// when grad is non-null: mean of dh/dtheta over q minus
/// (1/m) sum (f*)'_+(h(p_j) - nu*) dh(p_j)/dtheta.
double variational_objective(const DivergenceGenerator& gen, const BoundedFunctionClass& cls,
                             std::span<const double> theta, const Sample& q, const Sample& p,
                             Vector* grad = nullptr, double* nu_star = nullptr);

/// Lower estimate of D_f^Gamma(Q_n || P_m) by multi-start ascent over the
/// class; exact enumeration for dictionaries.
EstimateResult estimate_divergence(const DivergenceGenerator& gen,
                                   const BoundedFunctionClass& cls, const Sample& q,
                                   const Sample& p, const AscentConfig& cfg = {});

/// Exact maximum over dictionary members; first member wins ties.
double estimate_divergence_exact(const DivergenceGenerator& gen, const BoundedFunctionClass& dict,
                                 const Sample& q, const Sample& p,
                                 std::size_t* argmax = nullptr);

/// sum_i p_i f(q_i / p_i). Terms with p_i = 0 < q_i contribute
/// q_i times the recession slope of f (infinite for kl and alpha).
double f_divergence_discrete(const DivergenceGenerator& gen, std::span<const double> q,
                             std::span<const double> p);

/// sup over the class of E_q[h] - E_p[h]; exact for dictionaries.
double estimate_ipm(const BoundedFunctionClass& cls, const Sample& q, const Sample& p,
                    const AscentConfig& cfg = {});

/// (1 + (f*)'_+(z0 + beta - alpha)) max_{h in gamma} min_{h~ in gamma_tilde}
/// ||h - h~||_inf on the common support, with [alpha, beta] the range of gamma.
double approx_error(const BoundedFunctionClass& gamma, const BoundedFunctionClass& gamma_tilde,
                    const DivergenceGenerator& gen);

}  // namespace fgamma
