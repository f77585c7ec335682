#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "fgamma/generators.hpp"

namespace fgamma {

enum class BoundSetting {
  forward_gan,
  forward_gan_zero_approx,
  reverse_gan,
  reverse_gan_zero_approx,
  estimation_lower,
  estimation_upper,
};

std::string to_string(BoundSetting s);
/// Accepts the canonical names plus the short forms gan, gan-zero-approx,
/// reverse, reverse-zero-approx.
BoundSetting parse_setting(const std::string& name);

enum class Provenance { certified, estimated, user_supplied };
std::string to_string(Provenance p);
Provenance parse_provenance(const std::string& name);

/// Inputs of every concentration bound. `r` and `k` are the Rademacher and
/// K terms of the chosen setting: R over the data and K over the noise for
/// forward settings, the reverse for reverse settings, and R_{Gamma,Q,n},
/// K_{f,Gamma,P,m} for estimation.
struct BoundInputs {
  std::size_t n = 1;
  std::size_t m = 1;
  double alpha = 0.0;
  double beta = 1.0;
  DivergenceGenerator gen = DivergenceGenerator::kl();
  double epsilon = 0.0;
  double eps_approx = 0.0;
  double eps_opt = 0.0;
  double r = 0.0;
  double k = 0.0;
  /// Overrides the computed Delta_{f,.} when set.
  std::optional<double> delta;

  Provenance r_provenance = Provenance::user_supplied;
  Provenance k_provenance = Provenance::user_supplied;
  Provenance eps_opt_provenance = Provenance::user_supplied;
};

struct BoundReport {
  BoundSetting setting = BoundSetting::forward_gan;
  BoundInputs inputs;
  /// Delta_{f,count} actually used and the sample count it refers to.
  double delta = 0.0;
  std::size_t delta_count = 0;
  double denominator = 0.0;
  double threshold = 0.0;
  double tail_probability = 1.0;
  bool zero_approx_asserted = false;
  std::map<std::string, Provenance> provenance;

  /// "estimated" if any of R, K, Delta is estimated; otherwise
  /// "user-supplied" if any is user supplied; otherwise "certified".
  std::string label() const;
};

BoundReport gan_bound(const BoundInputs& in);
BoundReport gan_bound_zero_approx(const BoundInputs& in);
BoundReport reverse_gan_bound(const BoundInputs& in);
BoundReport reverse_gan_bound_zero_approx(const BoundInputs& in);
/// (lower-deviation, upper-deviation) reports.
std::pair<BoundReport, BoundReport> estimation_bounds(const BoundInputs& in);

BoundReport compute_bound(BoundSetting setting, const BoundInputs& in);

/// Denominator of the tail exponent for the setting; the estimation tails
/// are exp(-2 eps^2 / den), all others exp(-eps^2 / den).
double tail_denominator(BoundSetting setting, const BoundInputs& in);

/// The epsilon at which the setting's tail equals delta.
double epsilon_for_confidence(BoundSetting setting, const BoundInputs& in, double delta);

/// a^q + q int_0^inf (a + eps)^{q-1} K(eps) d eps. The range is truncated
/// where K drops below 1e-16; throws UserError when K does not decay.
double lq_bound(double q, double a, const std::function<double(double)>& tail_fn);

}  // namespace fgamma
