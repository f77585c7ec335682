#include "fgamma/cgf.hpp"

#include <algorithm>
#include <cmath>

#include "fgamma/golden.hpp"

namespace fgamma {

namespace {

double default_tol(double width) { return 1e-10 * std::max(1.0, width); }

}  // namespace

double lambda_objective(std::span<const double> values, const DivergenceGenerator& gen,
                        double nu) {
  double s = 0.0;
  for (double x : values) {
    const double v = gen.f_star(x - nu);
    if (std::isinf(v)) return kInf;
    s += v;
  }
  return nu + s / static_cast<double>(values.size());
}

LambdaResult lambda_empirical(std::span<const double> values, const DivergenceGenerator& gen,
                              double tol) {
  if (values.empty()) throw UserError("lambda_empirical: empty input vector");
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it;
  const double hi = *max_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw UserError("lambda_empirical: non-finite input value");
  }
  require_compatible(gen, lo, hi);
  if (tol <= 0.0) tol = default_tol(hi - lo);

  LambdaResult out;
  out.bracket_lo = lo - gen.z0();
  out.bracket_hi = hi - gen.z0();
  const auto best = golden_section_minimize(
      [&](double nu) { return lambda_objective(values, gen, nu); }, out.bracket_lo,
      out.bracket_hi, tol);
  if (!std::isfinite(best.value)) {
    throw InvariantError("lambda_empirical: objective infinite on the whole compact bracket");
  }
  // The infimum lies in [min x, max x]; clamping only removes rounding.
  out.value = std::clamp(best.value, lo, hi);
  out.nu_star = best.x;
  out.iterations = best.iterations;
  return out;
}

double lambda_lipschitz_const(const DivergenceGenerator& gen, double alpha, double beta) {
  require_compatible(gen, alpha, beta);
  return gen.f_star_rprime(gen.z0() + beta - alpha);
}

DeltaResult delta_f(const DivergenceGenerator& gen, std::size_t n, double alpha, double beta,
                    double tol) {
  if (n == 0) throw UserError("delta_f requires n >= 1");
  require_compatible(gen, alpha, beta);
  const double width = beta - alpha;
  DeltaResult out;
  out.z_star = gen.z0();
  if (width == 0.0) return out;
  if (tol <= 0.0) tol = default_tol(width);

  const double nn = static_cast<double>(n);
  const auto best = golden_section_minimize(
      [&](double z) {
        return -nn * z + (nn - 1.0) * gen.f_star(z) + gen.f_star(width + z);
      },
      gen.z0() - width, gen.z0(), tol);
  out.raw = best.value;
  out.z_star = best.x;

  const double lower = width;
  const double upper = gen.f_star(width + gen.z0()) - gen.z0();
  out.value = out.raw;
  if (out.value < lower) {
    out.value = lower;
    out.clamped_low = true;
  }
  if (out.value > upper) {
    out.value = upper;
    out.clamped_high = true;
  }
  return out;
}

double perturbation_extremal_gap(const DivergenceGenerator& gen, std::size_t n, double alpha,
                                 double beta, double tol) {
  if (n == 0) throw UserError("perturbation_extremal_gap requires n >= 1");
  require_compatible(gen, alpha, beta);
  std::vector<double> base(n, alpha);
  std::vector<double> moved = base;
  moved.front() = beta;
  return lambda_empirical(moved, gen, tol).value - lambda_empirical(base, gen, tol).value;
}

}  // namespace fgamma
