#include "fgamma/bounds.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "fgamma/cgf.hpp"

namespace fgamma {

std::string to_string(BoundSetting s) {
  switch (s) {
    case BoundSetting::forward_gan: return "forward-gan";
    case BoundSetting::forward_gan_zero_approx: return "forward-gan-zero-approx";
    case BoundSetting::reverse_gan: return "reverse-gan";
    case BoundSetting::reverse_gan_zero_approx: return "reverse-gan-zero-approx";
    case BoundSetting::estimation_lower: return "estimation-lower";
    case BoundSetting::estimation_upper: return "estimation-upper";
  }
  return "unknown";
}

BoundSetting parse_setting(const std::string& name) {
  static const std::map<std::string, BoundSetting> names = {
      {"gan", BoundSetting::forward_gan},
      {"forward-gan", BoundSetting::forward_gan},
      {"gan-zero-approx", BoundSetting::forward_gan_zero_approx},
      {"forward-gan-zero-approx", BoundSetting::forward_gan_zero_approx},
      {"reverse", BoundSetting::reverse_gan},
      {"reverse-gan", BoundSetting::reverse_gan},
      {"reverse-zero-approx", BoundSetting::reverse_gan_zero_approx},
      {"reverse-gan-zero-approx", BoundSetting::reverse_gan_zero_approx},
      {"estimation-lower", BoundSetting::estimation_lower},
      {"estimation-upper", BoundSetting::estimation_upper},
  };
  const auto it = names.find(name);
  if (it == names.end()) throw UserError("unknown bound setting '" + name + "'");
  return it->second;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::certified: return "certified";
    case Provenance::estimated: return "estimated";
    case Provenance::user_supplied: return "user-supplied";
  }
  return "unknown";
}

Provenance parse_provenance(const std::string& name) {
  if (name == "certified") return Provenance::certified;
  if (name == "estimated") return Provenance::estimated;
  if (name == "user-supplied" || name == "user") return Provenance::user_supplied;
  throw UserError("unknown provenance '" + name + "'");
}

std::string BoundReport::label() const {
  bool any_user = false;
  for (const char* key : {"r", "k", "delta"}) {
    const auto it = provenance.find(key);
    if (it == provenance.end()) continue;
    if (it->second == Provenance::estimated) return "estimated";
    any_user = any_user || it->second == Provenance::user_supplied;
  }
  return any_user ? "user-supplied" : "certified";
}

namespace {

bool is_reverse(BoundSetting s) {
  return s == BoundSetting::reverse_gan || s == BoundSetting::reverse_gan_zero_approx;
}

bool is_estimation(BoundSetting s) {
  return s == BoundSetting::estimation_lower || s == BoundSetting::estimation_upper;
}

void validate(const BoundInputs& in) {
  if (in.n == 0 || in.m == 0) throw UserError("n and m must be at least 1");
  for (double v : {in.alpha, in.beta, in.epsilon, in.eps_approx, in.eps_opt, in.r, in.k}) {
    if (!std::isfinite(v)) throw UserError("bound inputs must be finite");
  }
  if (in.epsilon < 0) throw UserError("epsilon must be non-negative");
  if (in.r < 0 || in.k < 0) throw UserError("R and K must be non-negative");
  if (in.eps_approx < 0 || in.eps_opt < 0) throw UserError("error terms must be non-negative");
  if (in.delta && !(std::isfinite(*in.delta) && *in.delta >= 0)) {
    throw UserError("delta override must be finite and non-negative");
  }
  require_compatible(in.gen, in.alpha, in.beta);
}

// Delta is taken over the sample that feeds Lambda: the noise (m) in the
// forward and estimation settings, the data (n) in the reverse settings.
std::size_t delta_count(BoundSetting s, const BoundInputs& in) {
  return is_reverse(s) ? in.n : in.m;
}

double delta_value(BoundSetting s, const BoundInputs& in) {
  if (in.delta) return *in.delta;
  return delta_f(in.gen, delta_count(s, in), in.alpha, in.beta).value;
}

double denominator_with(BoundSetting s, const BoundInputs& in, double delta) {
  const double w = in.beta - in.alpha;
  const double n = static_cast<double>(in.n);
  const double m = static_cast<double>(in.m);
  switch (s) {
    case BoundSetting::forward_gan: return 2.0 / n * w * w + 2.0 / m * delta * delta;
    case BoundSetting::forward_gan_zero_approx:
      return 1.0 / (2.0 * n) * w * w + 2.0 / m * delta * delta;
    case BoundSetting::reverse_gan: return 2.0 / m * w * w + 2.0 / n * delta * delta;
    case BoundSetting::reverse_gan_zero_approx:
      return 2.0 / m * w * w + 1.0 / (2.0 * n) * delta * delta;
    case BoundSetting::estimation_lower:
    case BoundSetting::estimation_upper: return 1.0 / n * w * w + 1.0 / m * delta * delta;
  }
  return 0.0;
}

double exponent_factor(BoundSetting s) { return is_estimation(s) ? 2.0 : 1.0; }

double threshold_for(BoundSetting s, const BoundInputs& in) {
  const double base = in.epsilon + in.eps_approx + in.eps_opt;
  switch (s) {
    case BoundSetting::forward_gan: return base + 4.0 * in.r + 4.0 * in.k;
    case BoundSetting::forward_gan_zero_approx: return base + 2.0 * in.r + 4.0 * in.k;
    case BoundSetting::reverse_gan: return base + 4.0 * in.r + 4.0 * in.k;
    case BoundSetting::reverse_gan_zero_approx: return base + 4.0 * in.r + 2.0 * in.k;
    // The estimation bound carries no approximation or optimization terms.
    case BoundSetting::estimation_lower: return in.epsilon;
    case BoundSetting::estimation_upper: return in.epsilon + 2.0 * in.r + 2.0 * in.k;
  }
  return 0.0;
}

BoundReport make_report(BoundSetting s, const BoundInputs& in) {
  validate(in);
  if (is_estimation(s) && (in.eps_approx != 0.0 || in.eps_opt != 0.0)) {
    throw UserError("estimation bounds take no approximation or optimization error terms");
  }
  BoundReport rep;
  rep.setting = s;
  rep.inputs = in;
  rep.delta = delta_value(s, in);
  rep.delta_count = delta_count(s, in);
  rep.denominator = denominator_with(s, in, rep.delta);
  rep.threshold = threshold_for(s, in);
  rep.zero_approx_asserted = s == BoundSetting::forward_gan_zero_approx ||
                             s == BoundSetting::reverse_gan_zero_approx;
  if (in.epsilon == 0.0) {
    rep.tail_probability = 1.0;
  } else {
    const double t = std::exp(-exponent_factor(s) * in.epsilon * in.epsilon / rep.denominator);
    rep.tail_probability = std::clamp(t, std::numeric_limits<double>::min(), 1.0);
  }
  rep.provenance["r"] = in.r_provenance;
  rep.provenance["k"] = in.k_provenance;
  rep.provenance["delta"] = in.delta ? Provenance::user_supplied : Provenance::certified;
  rep.provenance["eps_approx"] = Provenance::user_supplied;
  rep.provenance["eps_opt"] = in.eps_opt_provenance;
  return rep;
}

}  // namespace

BoundReport gan_bound(const BoundInputs& in) { return make_report(BoundSetting::forward_gan, in); }

BoundReport gan_bound_zero_approx(const BoundInputs& in) {
  return make_report(BoundSetting::forward_gan_zero_approx, in);
}

BoundReport reverse_gan_bound(const BoundInputs& in) {
  return make_report(BoundSetting::reverse_gan, in);
}

BoundReport reverse_gan_bound_zero_approx(const BoundInputs& in) {
  return make_report(BoundSetting::reverse_gan_zero_approx, in);
}

std::pair<BoundReport, BoundReport> estimation_bounds(const BoundInputs& in) {
  return {make_report(BoundSetting::estimation_lower, in),
          make_report(BoundSetting::estimation_upper, in)};
}

BoundReport compute_bound(BoundSetting setting, const BoundInputs& in) {
  return make_report(setting, in);
}

double tail_denominator(BoundSetting setting, const BoundInputs& in) {
  validate(in);
  return denominator_with(setting, in, delta_value(setting, in));
}

double epsilon_for_confidence(BoundSetting setting, const BoundInputs& in, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw UserError("confidence level delta must lie in (0, 1)");
  const double den = tail_denominator(setting, in);
  return std::sqrt(den * std::log(1.0 / delta) / exponent_factor(setting));
}

double lq_bound(double q, double a, const std::function<double(double)>& tail_fn) {
  if (!(q > 0.0) || !std::isfinite(q)) throw UserError("q must be positive");
  if (!(a >= 0.0) || !std::isfinite(a)) throw UserError("a must be non-negative");
  double upper = 1.0;
  while (tail_fn(upper) >= 1e-16) {
    upper *= 2.0;
    if (upper > 1e8) throw UserError("tail function does not decay; the integral diverges");
  }
  const auto integrand = [&](double e) { return std::pow(a + e, q - 1.0) * tail_fn(e); };
  // Split at 1 so singular (a + eps)^{q-1} near 0 gets its own panel.
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double head = GK::integrate(integrand, 0.0, std::min(1.0, upper), 25, 1e-13);
  const double body = upper > 1.0 ? GK::integrate(integrand, 1.0, upper, 25, 1e-13) : 0.0;
  return std::pow(a, q) + q * (head + body);
}

}  // namespace fgamma
