#include "fgamma/divergence.hpp"

#include <cmath>

namespace fgamma {

namespace {

void require_samples(const Sample& q, const Sample& p) {
  if (q.empty() || p.empty()) throw UserError("samples must be non-empty");
  if (q.dim() != p.dim()) throw UserError("samples have different dimensions");
}

}  // namespace

double objective_from_values(const DivergenceGenerator& gen, std::span<const double> hq,
                             std::span<const double> hp, double* nu_star) {
  // Both terms shift by the same constant; centering on hp[0] makes constant
  // members give exactly 0 when q = p.
  const double c = hp.empty() ? 0.0 : hp[0];
  Vector cq(hq.begin(), hq.end());
  Vector cp(hp.begin(), hp.end());
  for (auto& v : cq) v -= c;
  for (auto& v : cp) v -= c;
  const auto lam = lambda_empirical(cp, gen);
  if (nu_star) *nu_star = lam.nu_star + c;
  return mean(cq) - lam.value;
}

double variational_objective(const DivergenceGenerator& gen, const BoundedFunctionClass& cls,
                             std::span<const double> theta, const Sample& q, const Sample& p,
                             Vector* grad, double* nu_star) {
  require_samples(q, p);
  BoundedFunctionClass::Cache cache_q;
  BoundedFunctionClass::Cache cache_p;
  const Vector hq = cls.evaluate(theta, q, grad ? &cache_q : nullptr);
  const Vector hp = cls.evaluate(theta, p, grad ? &cache_p : nullptr);
  double nu = 0.0;
  const double value = objective_from_values(gen, hq, hp, &nu);
  if (nu_star) *nu_star = nu;
  if (grad) {
    const double n = static_cast<double>(q.size());
    const double m = static_cast<double>(p.size());
    const Vector cq(q.size(), 1.0 / n);
    Vector cp(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) cp[j] = -gen.f_star_rprime(hp[j] - nu) / m;
    *grad = cls.gradient(theta, q, cq, nullptr, &cache_q);
    const Vector gp = cls.gradient(theta, p, cp, nullptr, &cache_p);
    for (std::size_t i = 0; i < grad->size(); ++i) (*grad)[i] += gp[i];
  }
  return value;
}

double estimate_divergence_exact(const DivergenceGenerator& gen, const BoundedFunctionClass& dict,
                                 const Sample& q, const Sample& p, std::size_t* argmax) {
  if (dict.kind() != ClassKind::finite_dictionary) {
    throw UserError("exact enumeration needs a dictionary class");
  }
  require_samples(q, p);
  require_compatible(gen, dict.range_lo(), dict.range_hi());
  double best = -kInf;
  std::size_t best_j = 0;
  for (std::size_t j = 0; j < dict.member_count(); ++j) {
    const double v =
        objective_from_values(gen, dict.member_values(j, q), dict.member_values(j, p));
    if (v > best) {
      best = v;
      best_j = j;
    }
  }
  if (argmax) *argmax = best_j;
  return best;
}

EstimateResult estimate_divergence(const DivergenceGenerator& gen,
                                   const BoundedFunctionClass& cls, const Sample& q,
                                   const Sample& p, const AscentConfig& cfg) {
  require_samples(q, p);
  require_compatible(gen, cls.range_lo(), cls.range_hi());
  EstimateResult out;
  if (!cls.differentiable()) {
    out.value = estimate_divergence_exact(gen, cls, q, p, &out.member);
    out.theta_star = {static_cast<double>(out.member)};
    objective_from_values(gen, cls.member_values(out.member, q), cls.member_values(out.member, p),
                          &out.nu_star);
    out.exact = true;
    out.restarts_used = 0;
    return out;
  }

  const Objective fn = [&](const Vector& theta, Vector* grad) {
    return variational_objective(gen, cls, theta, q, p, grad);
  };
  const auto res = multi_start_ascent(fn, cls.param_dim(), cls.rho(), cfg);
  out.theta_star = res.best.theta;
  out.ascent_trace = res.best.trace;
  out.restarts_used = res.restart_values.size();
  out.restart_values = res.restart_values;
  out.restart_initial_values = res.initial_values;
  // Recompute from scratch so the reported value is exactly the objective at theta*.
  out.value = variational_objective(gen, cls, out.theta_star, q, p, nullptr, &out.nu_star);
  return out;
}

double f_divergence_discrete(const DivergenceGenerator& gen, std::span<const double> q,
                             std::span<const double> p) {
  if (q.size() != p.size() || q.empty()) {
    throw UserError("probability vectors must be non-empty and of equal length");
  }
  auto check = [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw UserError("probabilities must be finite and >= 0");
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-12) throw UserError("probabilities must sum to 1");
  };
  check(q);
  check(p);
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (p[i] > 0.0) {
      total += p[i] * gen.f(q[i] / p[i]);
    } else if (q[i] > 0.0) {
      total += q[i] * gen.recession_slope();
    }
  }
  return total;
}

double estimate_ipm(const BoundedFunctionClass& cls, const Sample& q, const Sample& p,
                    const AscentConfig& cfg) {
  require_samples(q, p);
  if (!cls.differentiable()) {
    double best = -kInf;
    for (std::size_t j = 0; j < cls.member_count(); ++j) {
      best = std::max(best, mean(cls.member_values(j, q)) - mean(cls.member_values(j, p)));
    }
    return best;
  }
  const double n = static_cast<double>(q.size());
  const double m = static_cast<double>(p.size());
  const Vector cq(q.size(), 1.0 / n);
  const Vector cp(p.size(), -1.0 / m);
  const Objective fn = [&](const Vector& theta, Vector* grad) {
    if (grad) {
      *grad = cls.gradient(theta, q, cq);
      const Vector gp = cls.gradient(theta, p, cp);
      for (std::size_t i = 0; i < grad->size(); ++i) (*grad)[i] += gp[i];
    }
    return mean(cls.evaluate(theta, q)) - mean(cls.evaluate(theta, p));
  };
  return multi_start_ascent(fn, cls.param_dim(), cls.rho(), cfg).best.value;
}

double approx_error(const BoundedFunctionClass& gamma, const BoundedFunctionClass& gamma_tilde,
                    const DivergenceGenerator& gen) {
  if (gamma.kind() != ClassKind::finite_dictionary ||
      gamma_tilde.kind() != ClassKind::finite_dictionary) {
    throw UserError("approximation error is defined for dictionary pairs");
  }
  if (gamma.support().size() != gamma_tilde.support().size()) {
    throw UserError("dictionaries are not tabulated on a common support");
  }
  const Sample& support = gamma.support();
  std::vector<Vector> tilde;
  for (std::size_t j = 0; j < gamma_tilde.member_count(); ++j) {
    tilde.push_back(gamma_tilde.member_values(j, support));
  }
  double worst = 0.0;
  for (const auto& h : gamma.members()) {
    double nearest = kInf;
    for (const auto& t : tilde) {
      double d = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) d = std::max(d, std::abs(h[i] - t[i]));
      nearest = std::min(nearest, d);
    }
    worst = std::max(worst, nearest);
  }
  return (1.0 + lambda_lipschitz_const(gen, gamma.range_lo(), gamma.range_hi())) * worst;
}

}  // namespace fgamma
