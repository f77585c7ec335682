#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fgamma {

enum class Budget { quick, full };
Budget parse_budget(const std::string& name);
std::string to_string(Budget b);

/// One invariant check. `value` is the measured quantity and `limit` the
/// bound it must not exceed; both are NaN for pass/fail checks.
struct Check {
  std::string suite;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<Check> checks;
  std::size_t passed() const;
  std::size_t failed() const;
  bool ok() const { return failed() == 0; }
};

/// "generators", "cgf", "divergence", "rademacher", "bounds", "all".
const std::vector<std::string>& verify_suites();

/// Runs every check of a suite. Throws UserError for unknown suites.
VerifyReport verify(const std::string& suite, Budget budget, std::uint64_t seed = 0);

// Individual check groups. Sizes grow with the budget; all randomness comes
// from the seed.

/// Conjugate identities, monotonicity and Legendre round trip for kl, js,
/// alpha(1.5, 2, 3, 5).
std::vector<Check> check_conjugate_identities(Budget budget, std::uint64_t seed);
/// Lambda for kl against log-mean-exp on random vectors.
std::vector<Check> check_kl_closed_form(Budget budget, std::uint64_t seed);
/// Compact-bracket minimization against a 1e5-point wide grid.
std::vector<Check> check_bracket_equivalence(Budget budget, std::uint64_t seed);
/// Lipschitz bound on random pairs, extremal perturbation equality and
/// random single-coordinate perturbations.
std::vector<Check> check_lipschitz_perturbation(Budget budget, std::uint64_t seed);
/// Delta sandwich for n = 1..100.
std::vector<Check> check_delta_sandwich(Budget budget, std::uint64_t seed);
/// Order inequalities, the two-atom KL example and exact zero at q = p.
std::vector<Check> check_divergence_order(Budget budget, std::uint64_t seed);
/// Reverse-mode gradients against central differences.
std::vector<Check> check_gradients(Budget budget, std::uint64_t seed);
/// Closed-form, enumerated and Monte Carlo Rademacher values.
std::vector<Check> check_rademacher_exactness(Budget budget, std::uint64_t seed);
/// Dudley integral, ball formula and mlp certificates.
std::vector<Check> check_dudley(Budget budget, std::uint64_t seed);
/// Monte Carlo ULLN deviations for a dictionary on a 4-atom space against 2 K.
std::vector<Check> check_ulln(Budget budget, std::uint64_t seed);
/// Bound arithmetic examples, inversion round trips and L^q integrals.
std::vector<Check> check_bound_arithmetic(Budget budget, std::uint64_t seed);
/// Empirical tail frequencies of the estimation experiment at Q = P.
std::vector<Check> check_tail_validity(Budget budget, std::uint64_t seed);

}  // namespace fgamma
