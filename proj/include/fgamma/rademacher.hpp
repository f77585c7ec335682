#pragma once

#include <cstdint>
#include <string>

#include "fgamma/discriminators.hpp"
#include "fgamma/generators.hpp"
#include "fgamma/optim.hpp"
#include "fgamma/sample.hpp"

namespace fgamma {

/// Ascent settings for the inner sup over parameterized classes.
AscentConfig rademacher_ascent_defaults();

enum class InnerSolver { exact_enumeration, ascent };

/// Monte Carlo estimate of E_sigma sup_psi (1/n) sigma . psi(y). No absolute
/// value is taken, so singleton classes have complexity 0.
struct RademacherEstimate {
  double mean = 0.0;
  /// Sample standard deviation over draws divided by sqrt(draws); 0 for one draw.
  double std_error = 0.0;
  std::size_t draws = 0;
  InnerSolver solver = InnerSolver::exact_enumeration;

  /// "exact" when the inner sup is exact, "ascent-lower-bound" otherwise.
  std::string mode() const;
};

/// Inner sup is exact for dictionaries and by projected ascent (3 restarts
/// per draw unless cfg says otherwise) for parameterized classes.
RademacherEstimate empirical_rademacher(const BoundedFunctionClass& cls, const Sample& points,
                                        std::size_t draws, std::uint64_t seed,
                                        const AscentConfig& cfg = rademacher_ascent_defaults());

/// Exact value for a dictionary by enumerating all 2^n sign patterns (n <= 24).
double rademacher_enumerate(const BoundedFunctionClass& dict, const Sample& points);

/// Same, for a class given directly as rows of values at the n points.
double rademacher_enumerate_rows(const std::vector<Vector>& rows);

/// ((beta - alpha) / (2n)) E|sigma_1 + ... + sigma_n| via binomial sums, n <= 30.
double rademacher_constant_interval(std::size_t n, double alpha, double beta);

/// 48 sqrt(k / n) el2_root: the unit-ball case of the entropy-integral bound.
double dudley_ball_bound(std::size_t k, std::size_t n, double el2_root);

/// 12 n^{-1/2} el2_root int_0^D sqrt(k log(1 + 2/eps)) d eps for the unit
/// ball. The covering number is 1 beyond eps = 2, so D is capped there.
double dudley_integral_bound(std::size_t k, std::size_t n, double el2_root, double diameter);

/// sqrt(mean of L(y_i)^2) over the sample.
double estimate_el2_root(const LipschitzProfile& profile, const Sample& sample);

/// Dudley certificate for a class whose parameters range over a ball of
/// radius rho: rescaling to the unit ball multiplies L by rho.
double dudley_certificate(std::size_t k, double rho, const LipschitzProfile& profile,
                          const Sample& sample);

/// K_{f,Psi,P,n}. The min with the Lipschitz branch applies only when
/// (f*)'_+ has a Lipschitz constant on [z0 - (beta-alpha), z0 + beta-alpha]
/// and the class contains a constant.
double k_quantity(const DivergenceGenerator& gen, double r, std::size_t n, double alpha,
                  double beta, bool class_has_constant = true);

}  // namespace fgamma
