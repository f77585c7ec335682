#pragma once

#include <span>

#include "fgamma/generators.hpp"

namespace fgamma {

/// Value of the generalized cumulant generating function on an empirical
/// vector, with the minimizing shift.
struct LambdaResult {
  double value = 0.0;
  double nu_star = 0.0;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// nu + (1/n) sum_i f*(x_i - nu); +inf when any term is infinite.
double lambda_objective(std::span<const double> values, const DivergenceGenerator& gen, double nu);

/// Lambda_f(x) = inf_nu { nu + (1/n) sum f*(x_i - nu) }, searched on the
/// compact bracket [min x - z0, max x - z0]. tol <= 0 selects the default
/// 1e-10 * max(1, max x - min x).
///
/// Throws UserError for an empty vector or when the generator is not
/// compatible with the range [min x, max x].
LambdaResult lambda_empirical(std::span<const double> values, const DivergenceGenerator& gen,
                              double tol = 0.0);

/// (f*)'_+(z0 + beta - alpha): the Lipschitz constant of Lambda_f on
/// [alpha, beta]^n with respect to the normalized l1 distance.
double lambda_lipschitz_const(const DivergenceGenerator& gen, double alpha, double beta);

struct DeltaResult {
  double value = 0.0;
  /// Unclamped solver output.
  double raw = 0.0;
  double z_star = 0.0;
  bool clamped_low = false;
  bool clamped_high = false;
  bool clamped() const { return clamped_low || clamped_high; }
};

/// The single-point perturbation constant
///   inf_{z in [z0-(beta-alpha), z0]} -n z + (n-1) f*(z) + f*(beta-alpha+z),
/// clamped into [beta-alpha, f*(beta-alpha+z0) - z0].
DeltaResult delta_f(const DivergenceGenerator& gen, std::size_t n, double alpha, double beta,
                    double tol = 0.0);

/// Lambda_f(x~) - Lambda_f(x) for x = (alpha, ..., alpha) and x~ equal to x
/// with its first coordinate raised to beta.
double perturbation_extremal_gap(const DivergenceGenerator& gen, std::size_t n, double alpha,
                                 double beta, double tol = 0.0);

}  // namespace fgamma
