#include "fgamma/rademacher.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "fgamma/cgf.hpp"

namespace fgamma {

AscentConfig rademacher_ascent_defaults() {
  AscentConfig cfg;
  cfg.restarts = 3;
  cfg.max_iterations = 200;
  return cfg;
}

std::string RademacherEstimate::mode() const {
  return solver == InnerSolver::exact_enumeration ? "exact" : "ascent-lower-bound";
}

namespace {

double sup_rows(const std::vector<Vector>& rows, const Vector& sigma) {
  double best = -kInf;
  for (const auto& row : rows) {
    double s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) s += sigma[i] * row[i];
    best = std::max(best, s);
  }
  return best / static_cast<double>(sigma.size());
}

}  // namespace

RademacherEstimate empirical_rademacher(const BoundedFunctionClass& cls, const Sample& points,
                                        std::size_t draws, std::uint64_t seed,
                                        const AscentConfig& cfg) {
  if (points.empty()) throw UserError("Rademacher estimate needs a non-empty sample");
  if (draws == 0) throw UserError("draws must be at least 1");
  const std::size_t n = points.size();

  std::vector<Vector> rows;
  if (!cls.differentiable()) {
    for (std::size_t j = 0; j < cls.member_count(); ++j) rows.push_back(cls.member_values(j, points));
  }

  Vector values(draws);
  parallel_for(draws, [&](std::size_t d) {
    Rng rng = make_rng(seed, d);
    std::bernoulli_distribution coin(0.5);
    Vector sigma(n);
    for (auto& s : sigma) s = coin(rng) ? 1.0 : -1.0;
    if (!cls.differentiable()) {
      values[d] = sup_rows(rows, sigma);
      return;
    }
    Vector cot(sigma);
    for (auto& c : cot) c /= static_cast<double>(n);
    const Objective fn = [&](const Vector& theta, Vector* grad) {
      if (grad) *grad = cls.gradient(theta, points, cot);
      const Vector h = cls.evaluate(theta, points);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += cot[i] * h[i];
      return s;
    };
    AscentConfig inner = cfg;
    inner.seed = mix_seed(seed, d + 0x5bd1e995ULL);
    values[d] = multi_start_ascent(fn, cls.param_dim(), cls.rho(), inner).best.value;
  });

  RademacherEstimate est;
  est.draws = draws;
  est.solver = cls.differentiable() ? InnerSolver::ascent : InnerSolver::exact_enumeration;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(draws);
  if (draws > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(draws - 1)) / std::sqrt(static_cast<double>(draws));
  }
  return est;
}

double rademacher_enumerate_rows(const std::vector<Vector>& rows) {
  if (rows.empty() || rows.front().empty()) throw UserError("class has no rows");
  const std::size_t n = rows.front().size();
  if (n > 24) throw UserError("exact enumeration is limited to n <= 24");
  const std::uint64_t patterns = std::uint64_t{1} << n;
  Vector sigma(n);
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    for (std::size_t i = 0; i < n; ++i) sigma[i] = (mask >> i) & 1U ? 1.0 : -1.0;
    total += sup_rows(rows, sigma);
  }
  return total / static_cast<double>(patterns);
}

double rademacher_enumerate(const BoundedFunctionClass& dict, const Sample& points) {
  if (dict.differentiable()) throw UserError("exact enumeration needs a dictionary class");
  std::vector<Vector> rows;
  for (std::size_t j = 0; j < dict.member_count(); ++j) rows.push_back(dict.member_values(j, points));
  return rademacher_enumerate_rows(rows);
}

double rademacher_constant_interval(std::size_t n, double alpha, double beta) {
  if (n == 0) throw UserError("n must be at least 1");
  if (n > 30) throw UserError("exact binomial mode is limited to n <= 30");
  if (!(alpha <= beta)) throw UserError("interval must satisfy alpha <= beta");
  // E|S| with S = 2K - n, K ~ Binomial(n, 1/2).
  double expected = 0.0;
  double binom = 1.0;
  const double scale = std::ldexp(1.0, -static_cast<int>(n));
  for (std::size_t k = 0; k <= n; ++k) {
    expected += binom * std::abs(2.0 * static_cast<double>(k) - static_cast<double>(n));
    binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  expected *= scale;
  return (beta - alpha) / (2.0 * static_cast<double>(n)) * expected;
}

double dudley_ball_bound(std::size_t k, std::size_t n, double el2_root) {
  if (k == 0 || n == 0) throw UserError("k and n must be at least 1");
  if (!(el2_root >= 0)) throw UserError("el2_root must be non-negative");
  return 48.0 * std::sqrt(static_cast<double>(k) / static_cast<double>(n)) * el2_root;
}

double dudley_integral_bound(std::size_t k, std::size_t n, double el2_root, double diameter) {
  if (k == 0 || n == 0) throw UserError("k and n must be at least 1");
  if (!(el2_root >= 0) || !(diameter >= 0)) {
    throw UserError("el2_root and diameter must be non-negative");
  }
  const double D = std::min(diameter, 2.0);
  if (D == 0.0 || el2_root == 0.0) return 0.0;
  const double kd = static_cast<double>(k);
  const double delta = 1e-6 * D;
  // log(1 + x) <= x bounds the singular head by sqrt(2k) * 2 sqrt(delta).
  const double head = std::sqrt(2.0 * kd) * 2.0 * std::sqrt(delta);
  const auto integrand = [kd](double e) { return std::sqrt(kd * std::log1p(2.0 / e)); };
  const double body =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, delta, D, 20, 1e-12);
  return 12.0 / std::sqrt(static_cast<double>(n)) * el2_root * (head + body);
}

double estimate_el2_root(const LipschitzProfile& profile, const Sample& sample) {
  if (sample.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double l = profile(sample.point(i));
    s += l * l;
  }
  return std::sqrt(s / static_cast<double>(sample.size()));
}

double dudley_certificate(std::size_t k, double rho, const LipschitzProfile& profile,
                          const Sample& sample) {
  return dudley_ball_bound(k, sample.size(), rho * estimate_el2_root(profile, sample));
}

double k_quantity(const DivergenceGenerator& gen, double r, std::size_t n, double alpha,
                  double beta, bool class_has_constant) {
  require_compatible(gen, alpha, beta);
  if (!(r >= 0)) throw UserError("Rademacher value must be non-negative");
  if (n == 0) throw UserError("n must be at least 1");
  const double w = beta - alpha;
  const double rn = std::sqrt(static_cast<double>(n));
  const double slope = gen.f_star_rprime(w + gen.z0());
  const double plain = slope * (r + w / (2.0 * rn));
  if (!class_has_constant) return plain;
  const auto L = rprime_lipschitz(gen, alpha, beta);
  if (!L) return plain;
  const double lip = (1.0 + 2.0 * w * *L) * r + w * w * *L / (2.0 * rn);
  return std::min(lip, plain);
}

}  // namespace fgamma
