#include "fgamma/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "fgamma/bounds.hpp"
#include "fgamma/cgf.hpp"
#include "fgamma/divergence.hpp"
#include "fgamma/ganlab.hpp"
#include "fgamma/generators.hpp"
#include "fgamma/rademacher.hpp"

namespace fgamma {

Budget parse_budget(const std::string& name) {
  if (name == "quick") return Budget::quick;
  if (name == "full") return Budget::full;
  throw UserError("unknown budget '" + name + "' (expected quick or full)");
}

std::string to_string(Budget b) { return b == Budget::quick ? "quick" : "full"; }

std::size_t VerifyReport::passed() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.passed; }));
}

std::size_t VerifyReport::failed() const { return checks.size() - passed(); }

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names = {"generators", "cgf",    "divergence",
                                                 "rademacher", "bounds", "all"};
  return names;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Check bounded(std::string suite, std::string name, double value, double limit,
              std::string detail = {}) {
  Check c;
  c.suite = std::move(suite);
  c.name = std::move(name);
  c.value = value;
  c.limit = limit;
  c.passed = std::isfinite(value) && value <= limit;
  c.detail = std::move(detail);
  return c;
}

Check flag(std::string suite, std::string name, bool ok, std::string detail = {}) {
  Check c;
  c.suite = std::move(suite);
  c.name = std::move(name);
  c.passed = ok;
  c.value = kNaN;
  c.limit = kNaN;
  c.detail = std::move(detail);
  return c;
}

std::size_t pick(Budget b, std::size_t quick, std::size_t full) {
  return b == Budget::quick ? quick : full;
}

struct RangedGen {
  DivergenceGenerator gen;
  double alpha;
  double beta;
};

// JS needs z0 + beta - alpha < log 2, so it runs on a narrower range.
std::vector<RangedGen> ranged_generators() {
  return {{DivergenceGenerator::kl(), 0.0, 1.0},
          {DivergenceGenerator::js(), 0.0, 0.5},
          {DivergenceGenerator::alpha(1.5), 0.0, 1.0},
          {DivergenceGenerator::alpha(2.0), 0.0, 1.0},
          {DivergenceGenerator::alpha(3.0), 0.0, 1.0},
          {DivergenceGenerator::alpha(5.0), 0.0, 1.0}};
}

Vector uniform_vector(Rng& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::size_t uniform_count(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Sample atoms(const std::vector<std::size_t>& idx) {
  Vector xs(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) xs[i] = static_cast<double>(idx[i]);
  return Sample::from_scalars(xs);
}

Sample atom_support(std::size_t k) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  return atoms(idx);
}

Sample atoms_with_counts(const std::vector<std::size_t>& counts) {
  std::vector<std::size_t> idx;
  for (std::size_t a = 0; a < counts.size(); ++a) idx.insert(idx.end(), counts[a], a);
  return atoms(idx);
}

// Independent evaluation of inf_nu { nu + mean f*(x - nu) } at one nu.
double cgf_objective_at(const DivergenceGenerator& gen, std::span<const double> xs, double nu) {
  double s = 0.0;
  for (double x : xs) {
    const double v = gen.f_star(x - nu);
    if (std::isinf(v)) return kInf;
    s += v;
  }
  return nu + s / static_cast<double>(xs.size());
}

double log_mean_exp(std::span<const double> xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s / static_cast<double>(xs.size()));
}

std::vector<double> central_difference(const std::function<double(const Vector&)>& fn,
                                       Vector theta) {
  Vector grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(theta[i]));
    const double keep = theta[i];
    theta[i] = keep + h;
    const double up = fn(theta);
    theta[i] = keep - h;
    const double down = fn(theta);
    theta[i] = keep;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double relative_error(const Vector& a, const Vector& b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    scale += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(scale), 1e-12);
}

// Known 4-atom distribution with rational weights, so Lambda^P is the
// empirical Lambda of the replicated values.
const std::vector<double> kAtomWeights = {0.1, 0.2, 0.3, 0.4};
const std::vector<std::size_t> kAtomMultiplicity = {1, 2, 3, 4};

Vector population_values(const Vector& member) {
  Vector out;
  for (std::size_t a = 0; a < member.size(); ++a) out.insert(out.end(), kAtomMultiplicity[a], member[a]);
  return out;
}

std::vector<std::size_t> draw_atoms(Rng& rng, std::size_t n) {
  std::discrete_distribution<std::size_t> d(kAtomWeights.begin(), kAtomWeights.end());
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = d(rng);
  return idx;
}

// Eight members over four atoms in [0, 1]; the first is a constant.
std::vector<Vector> ulln_dictionary(Rng& rng) {
  std::vector<Vector> members{{0.5, 0.5, 0.5, 0.5}};
  while (members.size() < 8) members.push_back(uniform_vector(rng, 4, 0.0, 1.0));
  return members;
}

// Population Rademacher complexity of a dictionary over the 4-atom P:
// Monte Carlo over samples and signs with an exact inner max.
double population_rademacher(const std::vector<Vector>& members, std::size_t n,
                             std::size_t draws, std::uint64_t seed) {
  Vector vals(draws);
  parallel_for(draws, [&](std::size_t d) {
    Rng rng = make_rng(seed, d);
    const auto idx = draw_atoms(rng, n);
    std::bernoulli_distribution coin(0.5);
    Vector sigma(n);
    for (auto& s : sigma) s = coin(rng) ? 1.0 : -1.0;
    double best = -kInf;
    for (const auto& m : members) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += sigma[i] * m[idx[i]];
      best = std::max(best, s / static_cast<double>(n));
    }
    vals[d] = best;
  });
  return mean(vals);
}

std::pair<double, double> mean_and_stderr(const Vector& xs) {
  const double mu = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  const double n = static_cast<double>(xs.size());
  return {mu, n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0};
}

std::string fmt(double x) { return format_double(x); }

std::string widths_label(const std::vector<std::size_t>& widths) {
  std::string out;
  for (std::size_t i = 0; i < widths.size(); ++i) out += (i ? "-" : "") + std::to_string(widths[i]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- generators

std::vector<Check> check_conjugate_identities(Budget budget, std::uint64_t seed) {
  std::vector<Check> out;
  const std::size_t probes = pick(budget, 2000, 10000);
  for (const auto& rg : ranged_generators()) {
    const auto& gen = rg.gen;
    for (const auto& c : gen.validate().checks) {
      Check k = flag("generators", gen.spec() + ": " + c.name, c.passed, c.detail);
      k.value = c.margin;
      out.push_back(k);
    }
    // Random probes inside {f* < inf}: f*(z) >= z and monotone pairs.
    Rng rng = make_rng(seed, 11);
    const double hi = std::min(gen.fstar_finite_sup(), gen.z0() + 5.0);
    std::uniform_real_distribution<double> u(gen.z0() - 10.0, hi);
    double worst_below = 0.0;
    double worst_order = 0.0;
    for (std::size_t i = 0; i < probes; ++i) {
      const double a = u(rng);
      const double b = u(rng);
      if (!gen.fstar_finite_at(a) || !gen.fstar_finite_at(b)) continue;
      worst_below = std::max(worst_below, a - gen.f_star(a));
      const double lo = std::min(a, b);
      const double up = std::max(a, b);
      worst_order = std::max(worst_order, gen.f_star(lo) - gen.f_star(up));
    }
    out.push_back(bounded("generators", gen.spec() + ": random probes z - f*(z)", worst_below,
                          1e-12, std::to_string(probes) + " probes"));
    out.push_back(bounded("generators", gen.spec() + ": random probes monotone", worst_order,
                          1e-12, std::to_string(probes) + " pairs"));
  }
  return out;
}

// ---------------------------------------------------------------- cgf

std::vector<Check> check_kl_closed_form(Budget budget, std::uint64_t seed) {
  const std::size_t count = pick(budget, 200, 1000);
  Rng rng = make_rng(seed, 21);
  const auto kl = DivergenceGenerator::kl();
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const Vector x = uniform_vector(rng, uniform_count(rng, 1, 64), 0.0, 1.0);
    worst = std::max(worst, std::abs(lambda_empirical(x, kl).value - log_mean_exp(x)));
  }
  return {bounded("cgf", "kl closed form (log-mean-exp)", worst, 1e-9,
                  std::to_string(count) + " vectors, n <= 64")};
}

std::vector<Check> check_bracket_equivalence(Budget budget, std::uint64_t seed) {
  std::vector<Check> out;
  const std::size_t count = pick(budget, 20, 100);
  constexpr std::size_t kGrid = 100000;
  for (const auto& rg : ranged_generators()) {
    const auto& gen = rg.gen;
    Rng rng = make_rng(seed, 31);
    Vector errs(count);
    std::vector<Vector> xs(count);
    for (auto& x : xs) x = uniform_vector(rng, uniform_count(rng, 1, 16), rg.alpha, rg.beta);
    parallel_for(count, [&](std::size_t i) {
      const auto& x = xs[i];
      const double lo = rg.alpha - gen.z0() - 10.0;
      const double hi = rg.beta - gen.z0() + 10.0;
      double grid = kInf;
      for (std::size_t g = 0; g < kGrid; ++g) {
        const double nu = lo + (hi - lo) * static_cast<double>(g) / (kGrid - 1);
        grid = std::min(grid, cgf_objective_at(gen, x, nu));
      }
      errs[i] = std::abs(lambda_empirical(x, gen).value - grid);
    });
    out.push_back(bounded("cgf", "compact-bracket vs wide-grid: " + gen.spec(),
                          *std::max_element(errs.begin(), errs.end()), 1e-6,
                          std::to_string(count) + " instances, 1e5-point grid"));
  }
  return out;
}

std::vector<Check> check_lipschitz_perturbation(Budget budget, std::uint64_t seed) {
  std::vector<Check> out;
  const auto gens = ranged_generators();
  const std::size_t pairs = pick(budget, 2000, 10000) / gens.size() + 1;
  for (const auto& rg : gens) {
    const auto& gen = rg.gen;
    Rng rng = make_rng(seed, 41);
    const double L = lambda_lipschitz_const(gen, rg.alpha, rg.beta);
    double worst_lip = -kInf;
    double worst_single = -kInf;
    std::size_t lip_violations = 0;
    for (std::size_t p = 0; p < pairs; ++p) {
      const std::size_t n = uniform_count(rng, 1, 32);
      const Vector x = uniform_vector(rng, n, rg.alpha, rg.beta);
      const Vector y = uniform_vector(rng, n, rg.alpha, rg.beta);
      double l1 = 0.0;
      for (std::size_t i = 0; i < n; ++i) l1 += std::abs(x[i] - y[i]);
      const double lx = lambda_empirical(x, gen).value;
      const double gap = std::abs(lx - lambda_empirical(y, gen).value);
      const double excess = gap - L * l1 / static_cast<double>(n);
      worst_lip = std::max(worst_lip, excess);
      lip_violations += excess > 1e-9 ? 1 : 0;

      Vector z = x;
      z[uniform_count(rng, 0, n - 1)] = std::uniform_real_distribution<double>(rg.alpha, rg.beta)(rng);
      const double bound = delta_f(gen, n, rg.alpha, rg.beta).value / static_cast<double>(n);
      worst_single =
          std::max(worst_single, std::abs(lambda_empirical(z, gen).value - lx) - bound);
    }
    out.push_back(bounded("cgf", "Lipschitz bound on random pairs: " + gen.spec(), worst_lip, 1e-9,
                          std::to_string(pairs) + " pairs, " + std::to_string(lip_violations) +
                              " violations"));
    double worst_gap = 0.0;
    for (std::size_t n : {1u, 2u, 4u, 10u, 100u}) {
      const double gap = perturbation_extremal_gap(gen, n, rg.alpha, rg.beta);
      const double d = delta_f(gen, n, rg.alpha, rg.beta).value / static_cast<double>(n);
      worst_gap = std::max(worst_gap, std::abs(gap - d));
    }
    out.push_back(bounded("cgf", "perturbation extremal equality: " + gen.spec(), worst_gap, 1e-6,
                          "n in {1, 2, 4, 10, 100}"));
    out.push_back(bounded("cgf", "random single-coordinate perturbation: " + gen.spec(),
                          worst_single, 1e-9, std::to_string(pairs) + " perturbations"));
  }
  return out;
}

std::vector<Check> check_delta_sandwich(Budget, std::uint64_t) {
  std::vector<Check> out;
  for (const auto& gen : {DivergenceGenerator::kl(), DivergenceGenerator::alpha(2.0),
                          DivergenceGenerator::alpha(3.0)}) {
    const double w = 1.0;
    const double upper = gen.f_star(w + gen.z0()) - gen.z0();
    const double loose = gen.f_star_rprime(w + gen.z0()) * w;
    double worst = -kInf;
    double worst_raw = -kInf;
    for (std::size_t n = 1; n <= 100; ++n) {
      const auto d = delta_f(gen, n, 0.0, 1.0);
      worst = std::max({worst, w - d.value, d.value - upper, upper - loose});
      worst_raw = std::max({worst_raw, w - d.raw, d.raw - upper});
    }
    out.push_back(bounded("cgf", "Delta sandwich n = 1..100: " + gen.spec(), worst, 1e-12));
    out.push_back(bounded("cgf", "Delta solver output inside sandwich: " + gen.spec(), worst_raw,
                          1e-9, "before clamping"));
  }
  const double d1 = delta_f(DivergenceGenerator::kl(), 1, 0.0, 1.0).value;
  out.push_back(bounded("cgf", "Delta_{kl,1} equals beta - alpha", std::abs(d1 - 1.0), 1e-9));
  return out;
}

// ---------------------------------------------------------------- divergence

std::vector<Check> check_divergence_order(Budget budget, std::uint64_t seed) {
  std::vector<Check> out;
  const std::size_t pairs = pick(budget, 30, 100);
  const Sample support = atom_support(4);
  for (const auto& gen : {DivergenceGenerator::kl(), DivergenceGenerator::alpha(2.0)}) {
    Rng rng = make_rng(seed, 51);
    double worst_f = -kInf;
    double worst_ipm = -kInf;
    double worst_neg = -kInf;
    for (std::size_t t = 0; t < pairs; ++t) {
      std::vector<std::size_t> qc(4);
      std::vector<std::size_t> pc(4);
      for (auto& c : qc) c = uniform_count(rng, 1, 10);
      for (auto& c : pc) c = uniform_count(rng, 1, 10);
      std::vector<Vector> members{{0.5, 0.5, 0.5, 0.5}};
      while (members.size() < 12) members.push_back(uniform_vector(rng, 4, 0.0, 1.0));
      const auto dict = BoundedFunctionClass::dictionary(support, members, std::pair{0.0, 1.0});
      const Sample q = atoms_with_counts(qc);
      const Sample p = atoms_with_counts(pc);
      Vector qp(4);
      Vector pp(4);
      for (std::size_t a = 0; a < 4; ++a) {
        qp[a] = static_cast<double>(qc[a]) / static_cast<double>(q.size());
        pp[a] = static_cast<double>(pc[a]) / static_cast<double>(p.size());
      }
      const double est = estimate_divergence_exact(gen, dict, q, p);
      worst_f = std::max(worst_f, est - f_divergence_discrete(gen, qp, pp));
      worst_ipm = std::max(worst_ipm, est - estimate_ipm(dict, q, p));
      worst_neg = std::max(worst_neg, -est);
    }
    const std::string tag = std::to_string(pairs) + " random 4-atom pairs";
    out.push_back(bounded("divergence", "D_f^Gamma <= D_f: " + gen.spec(), worst_f, 1e-9, tag));
    out.push_back(bounded("divergence", "D_f^Gamma <= d_Gamma: " + gen.spec(), worst_ipm, 1e-9, tag));
    out.push_back(bounded("divergence", "D_f^Gamma >= 0 with a constant: " + gen.spec(), worst_neg,
                          0.0, tag));
  }

  {
    const Sample s2 = atom_support(2);
    std::vector<Vector> members;
    for (int i = 0; i <= 280; ++i) {
      for (int j = 0; j <= 280; j += 2) members.push_back({1.4 * i / 280.0, 1.4 * j / 280.0});
    }
    const auto dict = BoundedFunctionClass::dictionary(s2, members, std::pair{0.0, 1.4});
    const double est =
        estimate_divergence_exact(DivergenceGenerator::kl(), dict, atoms_with_counts({3, 1}),
                                  atoms_with_counts({1, 1}));
    out.push_back(bounded("divergence", "two-atom KL example", std::abs(est - 0.130812), 1e-3,
                          "estimate " + fmt(est)));
  }

  {
    Rng rng = make_rng(seed, 52);
    const Sample s = atoms_with_counts({3, 1, 4, 2});
    std::vector<Vector> members{{0.2, 0.2, 0.2, 0.2}};
    while (members.size() < 6) members.push_back(uniform_vector(rng, 4, 0.0, 1.0));
    const auto dict = BoundedFunctionClass::dictionary(atom_support(4), members);
    double worst = 0.0;
    for (const auto& gen : {DivergenceGenerator::kl(), DivergenceGenerator::alpha(2.0),
                            DivergenceGenerator::alpha(3.0)}) {
      worst = std::max(worst, std::abs(estimate_divergence_exact(gen, dict, s, s)));
    }
    const auto net = BoundedFunctionClass::mlp({1, 4, 1}, 2.0, 0.0, 1.0);
    AscentConfig cfg;
    cfg.max_iterations = 50;
    cfg.seed = seed;
    worst = std::max(worst,
                     std::abs(estimate_divergence(DivergenceGenerator::kl(), net, s, s, cfg).value));
    out.push_back(bounded("divergence", "D_f^Gamma(mu, mu) = 0 exactly", worst, 0.0,
                          "dictionaries and an mlp containing a constant"));
  }
  return out;
}

std::vector<Check> check_gradients(Budget budget, std::uint64_t seed) {
  std::vector<Check> out;
  const std::size_t points = pick(budget, 12, 30);
  struct Case {
    std::string name;
    BoundedFunctionClass cls;
  };
  const std::vector<Case> classes = {
      {"linear identity d=1", BoundedFunctionClass::linear(1, FeatureMap::identity, 2.0, 0.0, 1.0)},
      {"linear affine d=2", BoundedFunctionClass::linear(2, FeatureMap::affine, 2.0, -1.0, 2.0)},
      {"mlp 1-4-1", BoundedFunctionClass::mlp({1, 4, 1}, 3.0, 0.0, 1.0)},
      {"mlp 2-5-3-1", BoundedFunctionClass::mlp({2, 5, 3, 1}, 3.0, 0.0, 1.0)},
      {"mlp 3-4-4-4-1", BoundedFunctionClass::mlp({3, 4, 4, 4, 1}, 3.0, -0.5, 1.5)},
  };
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const auto& [name, cls] = classes[ci];
    Rng rng = make_rng(seed, 61 + ci);
    const std::size_t d = cls.input_dim();
    const Sample x(d, uniform_vector(rng, points * d, -2.0, 2.0));
    const Sample y(d, uniform_vector(rng, (points + 3) * d, -1.0, 2.5));
    const Vector theta = cls.random_theta(rng, 0.8);
    const Vector cot = uniform_vector(rng, points, -1.0, 1.0);

    Vector gin;
    const Vector g = cls.gradient(theta, x, cot, &gin);
    const auto weighted = [&](const Vector& t) {
      const Vector h = cls.evaluate(t, x);
      double s = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) s += cot[i] * h[i];
      return s;
    };
    double err = relative_error(g, central_difference(weighted, theta));

    const auto by_input = [&](const Vector& flat) {
      const Vector h = cls.evaluate(theta, Sample(d, flat));
      double s = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) s += cot[i] * h[i];
      return s;
    };
    err = std::max(err, relative_error(gin, central_difference(by_input, x.data())));

    for (const auto& gen : {DivergenceGenerator::kl(), DivergenceGenerator::alpha(2.0)}) {
      if (!check_compatibility(gen, cls.range_lo(), cls.range_hi())) continue;
      Vector ge;
      variational_objective(gen, cls, theta, x, y, &ge);
      const auto obj = [&](const Vector& t) { return variational_objective(gen, cls, t, x, y); };
      err = std::max(err, relative_error(ge, central_difference(obj, theta)));
    }
    out.push_back(bounded("divergence", "gradients: " + name, err, 1e-5,
                          "parameter, input and envelope objective gradients"));
  }

  const std::vector<std::vector<std::size_t>> maps = {{1, 1}, {2, 8, 1}, {3, 4, 2}};
  for (std::size_t mi = 0; mi < maps.size(); ++mi) {
    const auto gmap = GeneratorMap::mlp(maps[mi], 4.0);
    Rng rng = make_rng(seed, 71 + mi);
    const Sample z(gmap.noise_dim(), uniform_vector(rng, points * gmap.noise_dim(), -2.0, 2.0));
    const Vector theta = gmap.random_theta(rng, 0.8);
    const Vector cot = uniform_vector(rng, points * gmap.output_dim(), -1.0, 1.0);
    const Vector g = gmap.vjp(theta, z, cot);
    const auto fn = [&](const Vector& t) {
      const Sample s = gmap.push(t, z);
      double acc = 0.0;
      for (std::size_t i = 0; i < cot.size(); ++i) acc += cot[i] * s.data()[i];
      return acc;
    };
    const std::string label = "generator map " + widths_label(maps[mi]);
    out.push_back(bounded("divergence", "gradients: " + label,
                          relative_error(g, central_difference(fn, theta)), 1e-5,
                          "vector-Jacobian product"));
  }

  for (auto ordering : {Ordering::forward, Ordering::reverse}) {
    TrainConfig cfg;
    cfg.ordering = ordering;
    cfg.disc = BoundedFunctionClass::mlp({1, 5, 4, 1}, 4.0, 0.0, 1.0);
    cfg.gmap = GeneratorMap::mlp({2, 5, 1}, 4.0);
    Rng rng = make_rng(seed, 81);
    const Vector td = cfg.disc.random_theta(rng, 0.6);
    const Vector tg = cfg.gmap.random_theta(rng, 0.6);
    const Sample data = sample_target(SyntheticTarget::gaussian(0, 1), points, mix_seed(seed, 82));
    const Sample noise = sample_noise(2, points + 5, mix_seed(seed, 83));
    Vector g;
    generator_objective(cfg, td, tg, data, noise, &g);
    const auto fn = [&](const Vector& t) {
      return generator_objective(cfg, td, t, data, noise, nullptr);
    };
    out.push_back(bounded("divergence", "gradients: generator objective, " + to_string(ordering),
                          relative_error(g, central_difference(fn, tg)), 1e-5,
                          "chain rule through the generator with envelope nu*"));
  }
  return out;
}

// ---------------------------------------------------------------- rademacher

std::vector<Check> check_rademacher_exactness(Budget budget, std::uint64_t seed) {
  std::vector<Check> out;
  const std::size_t draws = pick(budget, 1000, 4000);
  const auto interval = [](std::size_t n) {
    std::vector<Vector> members;
    for (int i = 0; i <= 100; ++i) members.emplace_back(n, i / 100.0);
    return BoundedFunctionClass::dictionary(atom_support(n), members);
  };
  for (std::size_t n : {1u, 2u}) {
    const double expect = n == 1 ? 0.5 : 0.25;
    const double closed = rademacher_constant_interval(n, 0.0, 1.0);
    const double enumerated = rademacher_enumerate(interval(n), atom_support(n));
    out.push_back(bounded("rademacher", "interval constants closed form, n = " + std::to_string(n),
                          std::abs(closed - expect), 1e-12, "expected " + fmt(expect)));
    out.push_back(bounded("rademacher", "interval constants enumeration, n = " + std::to_string(n),
                          std::abs(enumerated - expect), 1e-12, "expected " + fmt(expect)));
  }
  Rng rng = make_rng(seed, 91);
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<Vector> members(6);
    for (auto& m : members) m = uniform_vector(rng, n, 0.0, 1.0);
    const auto dict = BoundedFunctionClass::dictionary(atom_support(n), members);
    const double exact = rademacher_enumerate(dict, atom_support(n));
    const auto est = empirical_rademacher(dict, atom_support(n), draws, mix_seed(seed, 92 + n));
    out.push_back(bounded("rademacher", "Monte Carlo vs enumeration, n = " + std::to_string(n),
                          std::abs(est.mean - exact), 3.0 * est.std_error + 1e-15,
                          std::to_string(draws) + " draws; limit is 3 stderr"));
  }
  return out;
}

std::vector<Check> check_dudley(Budget budget, std::uint64_t seed) {
  std::vector<Check> out;
  double worst = 0.0;
  for (std::size_t k = 1; k <= 16; ++k) {
    const double closed = 12.0 / std::sqrt(100.0) * 4.0 * std::sqrt(static_cast<double>(k));
    worst = std::max(worst, dudley_integral_bound(k, 100, 1.0, 2.0) / closed);
  }
  out.push_back(bounded("rademacher", "entropy integral <= 4 sqrt(k) closed bound", worst, 1.0,
                        "ratio, k = 1..16"));
  out.push_back(bounded("rademacher", "ball formula (k=4, n=100, el2=1) = 9.6",
                        std::abs(dudley_ball_bound(4, 100, 1.0) - 9.6), 1e-12));

  struct Case {
    std::vector<std::size_t> widths;
    double rho;
    std::size_t n;
  };
  const std::vector<Case> cases = {{{1, 3, 1}, 1.0, 20},
                                   {{1, 4, 1}, 2.0, 30},
                                   {{2, 3, 1}, 1.0, 25},
                                   {{1, 3, 3, 1}, 1.0, 20},
                                   {{2, 4, 2, 1}, 0.5, 40}};
  const std::size_t draws = pick(budget, 12, 40);
  AscentConfig cfg = rademacher_ascent_defaults();
  cfg.max_iterations = pick(budget, 60, 200);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const auto cls = BoundedFunctionClass::mlp(c.widths, c.rho, 0.0, 1.0);
    const Sample pts = sample_target(SyntheticTarget::gaussian(0, 1, c.widths.front()), c.n,
                                     mix_seed(seed, 101 + i));
    const auto est = empirical_rademacher(cls, pts, draws, mix_seed(seed, 111 + i), cfg);
    const double cert = dudley_certificate(cls.param_dim(), cls.rho(), cls.lipschitz_profile(), pts);
    const std::string label = "mlp " + widths_label(c.widths) + ", rho " + fmt(c.rho);
    out.push_back(bounded("rademacher", "MC estimate under Dudley certificate: " + label,
                          est.mean - 3.0 * est.std_error, cert,
                          "estimate " + fmt(est.mean) + " +- " + fmt(est.std_error)));
  }
  return out;
}

std::vector<Check> check_ulln(Budget budget, std::uint64_t seed) {
  std::vector<Check> out;
  const std::size_t reps = pick(budget, 400, 2000);
  const std::size_t r_draws = pick(budget, 4000, 20000);
  Rng rng = make_rng(seed, 121);
  const auto members = ulln_dictionary(rng);
  for (const auto& gen : {DivergenceGenerator::kl(), DivergenceGenerator::alpha(2.0)}) {
    Vector pop(members.size());
    for (std::size_t j = 0; j < members.size(); ++j) {
      pop[j] = lambda_empirical(population_values(members[j]), gen).value;
    }
    for (std::size_t n : {10u, 100u}) {
      const double r = population_rademacher(members, n, r_draws, mix_seed(seed, 122 + n));
      const double bound = 2.0 * k_quantity(gen, r, n, 0.0, 1.0, true);
      Vector plus(reps);
      Vector minus(reps);
      parallel_for(reps, [&](std::size_t t) {
        Rng local = make_rng(mix_seed(seed, 123 + n), t);
        const auto idx = draw_atoms(local, n);
        double up = -kInf;
        double down = -kInf;
        for (std::size_t j = 0; j < members.size(); ++j) {
          Vector vals(n);
          for (std::size_t i = 0; i < n; ++i) vals[i] = members[j][idx[i]];
          const double emp = lambda_empirical(vals, gen).value;
          up = std::max(up, pop[j] - emp);
          down = std::max(down, emp - pop[j]);
        }
        plus[t] = up;
        minus[t] = down;
      });
      for (int sign : {1, -1}) {
        const auto [mu, se] = mean_and_stderr(sign > 0 ? plus : minus);
        out.push_back(bounded(
            "rademacher",
            std::string("ULLN ") + (sign > 0 ? "+" : "-") + " deviation: " + gen.spec() +
                ", n = " + std::to_string(n),
            mu + 3.0 * se, bound,
            "mean " + fmt(mu) + " + 3 stderr vs 2 K with R = " + fmt(r) + " (" +
                std::to_string(reps) + " reps)"));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- bounds

std::vector<Check> check_bound_arithmetic(Budget, std::uint64_t) {
  std::vector<Check> out;
  BoundInputs in;
  in.n = 100;
  in.m = 100;
  in.alpha = 0.0;
  in.beta = 1.0;
  in.epsilon = 0.2;
  in.delta = 1.0;
  out.push_back(bounded("bounds", "gan tail example = e^-1",
                        std::abs(gan_bound(in).tail_probability - std::exp(-1.0)), 1e-14));
  out.push_back(bounded("bounds", "gan zero-approx tail example = e^-1.6",
                        std::abs(gan_bound_zero_approx(in).tail_probability - std::exp(-1.6)),
                        1e-14));
  out.push_back(bounded("bounds", "reverse tail equals forward under symmetric inputs",
                        std::abs(reverse_gan_bound(in).tail_probability -
                                 gan_bound(in).tail_probability),
                        1e-15));
  BoundInputs est = in;
  est.n = 200;
  est.m = 200;
  est.epsilon = 0.1;
  out.push_back(bounded("bounds", "estimation tail example = e^-2",
                        std::abs(estimation_bounds(est).first.tail_probability - std::exp(-2.0)),
                        1e-14));
  out.push_back(bounded(
      "bounds", "epsilon for confidence e^-1 = 0.2",
      std::abs(epsilon_for_confidence(BoundSetting::forward_gan, in, std::exp(-1.0)) - 0.2), 1e-14));

  double worst_trip = 0.0;
  double worst_mono = -kInf;
  for (auto s : {BoundSetting::forward_gan, BoundSetting::forward_gan_zero_approx,
                 BoundSetting::reverse_gan, BoundSetting::reverse_gan_zero_approx,
                 BoundSetting::estimation_lower, BoundSetting::estimation_upper}) {
    BoundInputs probe;
    probe.n = 57;
    probe.m = 311;
    probe.alpha = 0.0;
    probe.beta = 1.0;
    for (double delta : {0.5, 0.05, 1e-6}) {
      probe.epsilon = epsilon_for_confidence(s, probe, delta);
      worst_trip = std::max(worst_trip, std::abs(compute_bound(s, probe).tail_probability - delta));
    }
    double prev = 1.0;
    for (int i = 0; i <= 50; ++i) {
      probe.epsilon = 0.01 * i;
      const double t = compute_bound(s, probe).tail_probability;
      worst_mono = std::max(worst_mono, t - prev);
      prev = t;
    }
  }
  out.push_back(bounded("bounds", "confidence round trip, all settings", worst_trip, 1e-12));
  out.push_back(bounded("bounds", "tails non-increasing in epsilon", worst_mono, 0.0));

  const auto gauss = [](double e) { return std::exp(-e * e); };
  out.push_back(bounded("bounds", "L^q integral (q=1) = sqrt(pi)/2",
                        std::abs(lq_bound(1.0, 0.0, gauss) - std::sqrt(M_PI) / 2), 1e-10));
  out.push_back(bounded("bounds", "L^q integral (q=2) = 1", std::abs(lq_bound(2.0, 0.0, gauss) - 1.0),
                        1e-10));
  return out;
}

std::vector<Check> check_tail_validity(Budget budget, std::uint64_t seed) {
  std::vector<Check> out;
  const std::size_t reps = pick(budget, 500, 5000);
  const std::size_t r_draws = pick(budget, 4000, 20000);
  constexpr std::size_t n = 40;
  constexpr std::size_t m = 40;
  const auto gen = DivergenceGenerator::kl();
  Rng rng = make_rng(seed, 131);
  const auto members = ulln_dictionary(rng);
  const auto dict = BoundedFunctionClass::dictionary(atom_support(4), members, std::pair{0.0, 1.0});

  // Q = P, so the population divergence is 0.
  Vector est(reps);
  parallel_for(reps, [&](std::size_t t) {
    Rng local = make_rng(mix_seed(seed, 132), t);
    const Sample q = atoms(draw_atoms(local, n));
    const Sample p = atoms(draw_atoms(local, m));
    est[t] = estimate_divergence_exact(gen, dict, q, p);
  });

  const double r_q = population_rademacher(members, n, r_draws, mix_seed(seed, 133));
  const double r_p = population_rademacher(members, m, r_draws, mix_seed(seed, 134));
  BoundInputs in;
  in.n = n;
  in.m = m;
  in.alpha = 0.0;
  in.beta = 1.0;
  in.gen = gen;
  in.r = r_q;
  in.k = k_quantity(gen, r_p, m, 0.0, 1.0, true);
  in.r_provenance = Provenance::estimated;
  in.k_provenance = Provenance::estimated;
  for (double eps : {0.05, 0.1, 0.2}) {
    in.epsilon = eps;
    const auto [lower, upper] = estimation_bounds(in);
    std::size_t low_hits = 0;
    std::size_t up_hits = 0;
    for (double d : est) {
      low_hits += -d >= lower.threshold ? 1 : 0;
      up_hits += d >= upper.threshold ? 1 : 0;
    }
    const double tail = lower.tail_probability;
    const double slack = 3.0 * std::sqrt(tail * (1.0 - tail) / static_cast<double>(reps));
    const std::string tag = std::to_string(reps) + " reps, tail " + fmt(tail);
    out.push_back(bounded("bounds", "estimation lower-deviation tail at eps = " + fmt(eps),
                          static_cast<double>(low_hits) / static_cast<double>(reps), tail + slack,
                          tag));
    out.push_back(bounded("bounds", "estimation upper-deviation tail at eps = " + fmt(eps),
                          static_cast<double>(up_hits) / static_cast<double>(reps), tail + slack,
                          tag + ", threshold " + fmt(upper.threshold)));
  }
  return out;
}

// ---------------------------------------------------------------- driver

VerifyReport verify(const std::string& suite, Budget budget, std::uint64_t seed) {
  const auto& names = verify_suites();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw UserError("unknown suite '" + suite +
                    "' (expected generators, cgf, divergence, rademacher, bounds or all)");
  }
  VerifyReport rep;
  const auto add = [&](std::vector<Check> cs) {
    rep.checks.insert(rep.checks.end(), std::make_move_iterator(cs.begin()),
                      std::make_move_iterator(cs.end()));
  };
  const bool all = suite == "all";
  if (all || suite == "generators") add(check_conjugate_identities(budget, seed));
  if (all || suite == "cgf") {
    add(check_kl_closed_form(budget, seed));
    add(check_bracket_equivalence(budget, seed));
    add(check_lipschitz_perturbation(budget, seed));
    add(check_delta_sandwich(budget, seed));
  }
  if (all || suite == "divergence") {
    add(check_divergence_order(budget, seed));
    add(check_gradients(budget, seed));
  }
  if (all || suite == "rademacher") {
    add(check_rademacher_exactness(budget, seed));
    add(check_dudley(budget, seed));
    add(check_ulln(budget, seed));
  }
  if (all || suite == "bounds") {
    add(check_bound_arithmetic(budget, seed));
    if (budget == Budget::full) add(check_tail_validity(budget, seed));
  }
  return rep;
}

}  // namespace fgamma
