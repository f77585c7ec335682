#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fgamma/common.hpp"

namespace fgamma {

/// Closures describing a user-defined convex generator f with f(1) = 0.
struct CustomGeneratorSpec {
  std::string name = "custom";
  std::function<double(double)> f;
  std::function<double(double)> f_star;
  std::function<double(double)> f_star_rprime;
  double z0 = 0.0;
  /// Supremum of {f* < inf}; f* is taken to be finite on (-inf, sup).
  double fstar_finite_sup = kInf;
  double domain_lo = 0.0;
  double domain_hi = kInf;
  /// lim_{t->inf} f(t)/t, used for atoms where p = 0 < q.
  double recession_slope = kInf;
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  /// Worst observed violation (0 when the check holds exactly).
  double margin = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
  std::string summary() const;
};

/// A convex generator f on (a, b), a >= 0, with its Legendre conjugate.
///
/// +inf is returned as a value by f and f_star outside their finiteness
/// domains. Instances are immutable and cheap to copy.
class DivergenceGenerator {
 public:
  enum class Family { kl, js, alpha, custom };

  static DivergenceGenerator kl();
  static DivergenceGenerator js();
  /// Throws UserError unless alpha > 1.
  static DivergenceGenerator alpha(double alpha);
  /// Validates the conjugate identities on a probe grid; throws UserError
  /// with the failing checks if any do not hold.
  static DivergenceGenerator custom(CustomGeneratorSpec spec);
  /// Parses "kl", "js" or "alpha:<value>".
  static DivergenceGenerator parse(std::string_view spec);

  Family family() const { return family_; }
  const std::string& name() const { return name_; }
  /// Round-trippable identifier ("kl", "js", "alpha:2").
  std::string spec() const;

  double domain_lo() const { return domain_lo_; }
  double domain_hi() const { return domain_hi_; }
  double z0() const { return z0_; }
  double fstar_finite_sup() const { return fstar_sup_; }
  std::optional<double> alpha_param() const;
  double recession_slope() const { return recession_; }

  double f(double t) const;
  double f_star(double z) const;
  /// Right derivative of f*. Throws UserError when z is outside the open
  /// finiteness domain of f*.
  double f_star_rprime(double z) const;

  bool fstar_finite_at(double z) const { return z < fstar_sup_; }

  /// True for the built-in families; for custom generators, the result of
  /// the midpoint-convexity probe on [0.9, 1.1] made at construction.
  bool strictly_convex_near_one() const;

  /// Validation results recorded at construction (custom generators) or
  /// computed on demand for the built-in families.
  ValidationReport validate() const;

 private:
  DivergenceGenerator() = default;

  Family family_ = Family::kl;
  std::string name_;
  double alpha_ = 0.0;
  // f*(z) = coef * max(z, 0)^power + offset for the alpha family.
  double alpha_power_ = 0.0;
  double alpha_coef_ = 0.0;
  double alpha_offset_ = 0.0;
  double z0_ = 1.0;
  double fstar_sup_ = kInf;
  double domain_lo_ = 0.0;
  double domain_hi_ = kInf;
  double recession_ = kInf;
  std::shared_ptr<const CustomGeneratorSpec> custom_;
  std::shared_ptr<const ValidationReport> report_;
};

/// Numerical Legendre transform of f*: sup_z { z t - f*(z) }.
double legendre_of_conjugate(const DivergenceGenerator& gen, double t);

/// Smallest verified Lipschitz constant of (f*)'_+ on
/// [z0 - (beta - alpha), z0 + beta - alpha]; empty when (f*)'_+ is not
/// Lipschitz there. Throws UserError when the interval leaves the open
/// finiteness domain of f*.
std::optional<double> rprime_lipschitz(const DivergenceGenerator& gen, double alpha, double beta);

struct Compatibility {
  bool ok = true;
  std::string violation;
  explicit operator bool() const { return ok; }
};

/// ok iff z0 + beta - alpha lies strictly inside {f* < inf} and f is strictly
/// convex near 1.
Compatibility check_compatibility(const DivergenceGenerator& gen, double alpha, double beta);

/// Throws UserError with the violation text when incompatible.
void require_compatible(const DivergenceGenerator& gen, double alpha, double beta);

}  // namespace fgamma
