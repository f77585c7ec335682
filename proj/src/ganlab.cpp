#include "fgamma/ganlab.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fgamma/bounds.hpp"
#include "fgamma/rademacher.hpp"

namespace fgamma {

// ---------------------------------------------------------------- targets

SyntheticTarget SyntheticTarget::gaussian(double mu, double sigma, std::size_t dim) {
  SyntheticTarget t;
  t.kind = Kind::gaussian;
  t.mu = mu;
  t.sigma = sigma;
  t.dim = dim;
  return t;
}

SyntheticTarget SyntheticTarget::mixture(std::vector<double> weights, std::vector<double> mus,
                                         std::vector<double> sigmas, std::size_t dim) {
  SyntheticTarget t;
  t.kind = Kind::mixture;
  t.weights = std::move(weights);
  t.mus = std::move(mus);
  t.sigmas = std::move(sigmas);
  t.dim = dim;
  return t;
}

SyntheticTarget SyntheticTarget::student_t(double dof, double scale, std::size_t dim) {
  SyntheticTarget t;
  t.kind = Kind::student_t;
  t.dof = dof;
  t.scale = scale;
  t.dim = dim;
  return t;
}

SyntheticTarget SyntheticTarget::uniform(double lo, double hi, std::size_t dim) {
  SyntheticTarget t;
  t.kind = Kind::uniform;
  t.lo = lo;
  t.hi = hi;
  t.dim = dim;
  return t;
}

void SyntheticTarget::validate() const {
  if (dim != 1 && dim != 2) throw UserError("synthetic targets have dimension 1 or 2");
  switch (kind) {
    case Kind::gaussian:
      if (!(sigma > 0) || !std::isfinite(mu)) throw UserError("gaussian target needs sigma > 0");
      break;
    case Kind::mixture: {
      if (weights.empty() || weights.size() != mus.size() || weights.size() != sigmas.size()) {
        throw UserError("mixture weights, means and scales must have equal non-zero length");
      }
      double s = 0.0;
      for (double w : weights) {
        if (!(w >= 0)) throw UserError("mixture weights must be non-negative");
        s += w;
      }
      if (std::abs(s - 1.0) > 1e-9) throw UserError("mixture weights must sum to 1");
      for (double sg : sigmas) {
        if (!(sg > 0)) throw UserError("mixture scales must be positive");
      }
      break;
    }
    case Kind::student_t:
      if (!(dof > 0) || !(scale > 0)) throw UserError("student-t target needs dof > 0, scale > 0");
      break;
    case Kind::uniform:
      if (!(lo < hi)) throw UserError("uniform target needs lo < hi");
      break;
  }
}

bool SyntheticTarget::finite_second_moment() const {
  return kind != Kind::student_t || dof > 2.0;
}

std::string SyntheticTarget::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::gaussian: os << "gaussian(" << format_double(mu) << "," << format_double(sigma) << ")"; break;
    case Kind::mixture: os << "gaussian-mixture(" << weights.size() << " components)"; break;
    case Kind::student_t: os << "student-t(" << format_double(dof) << "," << format_double(scale) << ")"; break;
    case Kind::uniform: os << "uniform(" << format_double(lo) << "," << format_double(hi) << ")"; break;
  }
  os << " dim " << dim;
  return os.str();
}

Sample sample_target(const SyntheticTarget& target, std::size_t n, std::uint64_t seed) {
  target.validate();
  if (n == 0) throw UserError("sample size must be at least 1");
  Rng rng = make_rng(seed, 0);
  Vector data(n * target.dim);
  switch (target.kind) {
    case SyntheticTarget::Kind::gaussian: {
      std::normal_distribution<double> d(target.mu, target.sigma);
      for (auto& x : data) x = d(rng);
      break;
    }
    case SyntheticTarget::Kind::mixture: {
      std::discrete_distribution<std::size_t> pick(target.weights.begin(), target.weights.end());
      std::normal_distribution<double> z(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = pick(rng);
        for (std::size_t j = 0; j < target.dim; ++j) {
          data[i * target.dim + j] = target.mus[c] + target.sigmas[c] * z(rng);
        }
      }
      break;
    }
    case SyntheticTarget::Kind::student_t: {
      std::student_t_distribution<double> d(target.dof);
      for (auto& x : data) x = target.scale * d(rng);
      break;
    }
    case SyntheticTarget::Kind::uniform: {
      std::uniform_real_distribution<double> d(target.lo, target.hi);
      for (auto& x : data) x = std::clamp(d(rng), target.lo, target.hi);
      break;
    }
  }
  return {target.dim, std::move(data)};
}

Sample sample_noise(std::size_t dim, std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::normal_distribution<double> d(0.0, 1.0);
  Vector data(n * dim);
  for (auto& x : data) x = d(rng);
  return {dim, std::move(data)};
}

std::string to_string(Ordering o) { return o == Ordering::forward ? "forward" : "reverse"; }

// ---------------------------------------------------------------- config

AscentConfig TrainConfig::default_eval_ascent() {
  AscentConfig cfg;
  cfg.restarts = 2;
  cfg.max_iterations = 200;
  return cfg;
}

void TrainConfig::validate() const {
  if (n == 0) throw UserError("n must be at least 1");
  if (rounds == 0) throw UserError("rounds must be at least 1");
  if (generator_restarts == 0) throw UserError("generator_restarts must be at least 1");
  if (heldout_factor == 0) throw UserError("heldout_factor must be at least 1");
  if (!disc.differentiable()) throw UserError("GAN training needs a differentiable discriminator");
  if (disc.input_dim() != gmap.output_dim()) {
    throw UserError("discriminator input dimension must equal generator output dimension");
  }
  require_compatible(gen, disc.range_lo(), disc.range_hi());
  const auto ev = evaluation_class();
  if (ev.input_dim() != disc.input_dim()) throw UserError("evaluation class has the wrong input dimension");
  require_compatible(gen, ev.range_lo(), ev.range_hi());
}

BoundedFunctionClass TrainConfig::evaluation_class() const {
  if (eval_class) return *eval_class;
  const std::size_t d = disc.input_dim();
  return BoundedFunctionClass::mlp({d, 16, 16, 1}, std::max(disc.rho(), 5.0), disc.range_lo(),
                                   disc.range_hi());
}

bool TrainTrace::all_finite() const {
  for (const auto& r : rounds) {
    for (double v : {r.objective, r.heldout, r.theta_norm, r.nu_star}) {
      if (!std::isfinite(v)) return false;
    }
  }
  for (double v : theta_star) {
    if (!std::isfinite(v)) return false;
  }
  return std::isfinite(initial_heldout) && std::isfinite(final_heldout) &&
         std::isfinite(eps_opt_proxy);
}

// ---------------------------------------------------------------- objective

double gan_objective(const DivergenceGenerator& gen, const BoundedFunctionClass& disc,
                     std::span<const double> theta_d, const Sample& plain, const Sample& shifted,
                     double* nu_star) {
  return variational_objective(gen, disc, theta_d, plain, shifted, nullptr, nu_star);
}

double generator_objective(const TrainConfig& cfg, std::span<const double> theta_d,
                           std::span<const double> theta_g, const Sample& data,
                           const Sample& noise, Vector* grad, double* nu_star) {
  const Sample fake = cfg.gmap.push(theta_g, noise);
  const bool fwd = cfg.ordering == Ordering::forward;
  BoundedFunctionClass::Cache cache;
  const Vector h_fake = cfg.disc.evaluate(theta_d, fake, grad ? &cache : nullptr);
  const Vector h_data = cfg.disc.evaluate(theta_d, data);
  double nu = 0.0;
  const double value = fwd ? objective_from_values(cfg.gen, h_data, h_fake, &nu)
                           : objective_from_values(cfg.gen, h_fake, h_data, &nu);
  if (nu_star) *nu_star = nu;
  if (grad) {
    const double m = static_cast<double>(fake.size());
    Vector cot(fake.size());
    if (fwd) {
      // d/dtheta_g of -Lambda over the generated sample, nu held at nu*.
      for (std::size_t j = 0; j < fake.size(); ++j) {
        cot[j] = -cfg.gen.f_star_rprime(h_fake[j] - nu) / m;
      }
    } else {
      std::fill(cot.begin(), cot.end(), 1.0 / m);
    }
    Vector gx;
    cfg.disc.gradient(theta_d, fake, cot, &gx, &cache);
    *grad = cfg.gmap.vjp(theta_g, noise, gx);
  }
  return value;
}

namespace {

struct SingleRun {
  std::vector<RoundRecord> rounds;
  Vector theta_g;
  Vector theta_d;
  double initial_heldout = 0.0;
  double final_heldout = 0.0;
  double final_objective = 0.0;
};

double heldout_divergence(const TrainConfig& cfg, const BoundedFunctionClass& eval,
                          std::span<const double> theta_g, const Sample& q_hold,
                          const Sample& z_hold, std::uint64_t seed) {
  const Sample fake = cfg.gmap.push(theta_g, z_hold);
  AscentConfig ac = cfg.eval_ascent;
  ac.seed = seed;
  const auto res = cfg.ordering == Ordering::forward
                       ? estimate_divergence(cfg.gen, eval, q_hold, fake, ac)
                       : estimate_divergence(cfg.gen, eval, fake, q_hold, ac);
  return res.value;
}

SingleRun run_once(const TrainConfig& cfg, const Sample& data, const Sample& noise,
                   const Sample& q_hold, const Sample& z_hold, const BoundedFunctionClass& eval,
                   std::size_t restart) {
  SingleRun out;
  Rng rg = make_rng(cfg.seed, 100 + restart);
  Rng rd = make_rng(cfg.seed, 200 + restart);
  Vector tg = cfg.gmap.random_theta(rg, cfg.gen_init_scale);
  Vector td = cfg.disc.random_theta(rd, cfg.disc_init_scale);
  Adam adam_d(td.size(), cfg.disc_lr);
  Adam adam_g(tg.size(), cfg.gen_lr);
  const bool fwd = cfg.ordering == Ordering::forward;
  const std::uint64_t eval_seed = mix_seed(cfg.seed, 300 + restart);

  out.initial_heldout = heldout_divergence(cfg, eval, tg, q_hold, z_hold, eval_seed);
  double heldout = out.initial_heldout;

  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    const Sample fake = cfg.gmap.push(tg, noise);
    const Sample& plain = fwd ? data : fake;
    const Sample& shifted = fwd ? fake : data;
    Vector grad;
    for (std::size_t s = 0; s < cfg.inner_steps; ++s) {
      variational_objective(cfg.gen, cfg.disc, td, plain, shifted, &grad);
      const Vector step = adam_d.direction(grad);
      for (std::size_t i = 0; i < td.size(); ++i) td[i] += step[i];
      cfg.disc.project(td);
    }
    RoundRecord rec;
    rec.round = round;
    const double progress =
        cfg.rounds > 1 ? static_cast<double>(round - 1) / static_cast<double>(cfg.rounds - 1) : 0.0;
    adam_g.set_learning_rate(cfg.gen_lr * (1.0 - progress * (1.0 - cfg.gen_lr_final)));
    for (std::size_t s = 0; s < std::max<std::size_t>(cfg.outer_steps, 1); ++s) {
      double nu = 0.0;
      Vector gg;
      const double value = generator_objective(cfg, td, tg, data, noise, &gg, &nu);
      if (s == 0) {
        rec.objective = value;
        rec.nu_star = nu;
      }
      const Vector step = adam_g.direction(gg);
      for (std::size_t i = 0; i < tg.size(); ++i) tg[i] -= step[i];
      cfg.gmap.project(tg);
    }
    if (!std::isfinite(rec.objective) || !std::isfinite(rec.nu_star)) {
      throw InvariantError("GAN objective became non-finite at round " + std::to_string(round));
    }
    const bool checkpoint = round == cfg.rounds || (cfg.eval_every > 0 && round % cfg.eval_every == 0);
    if (checkpoint) heldout = heldout_divergence(cfg, eval, tg, q_hold, z_hold, eval_seed);
    rec.heldout = heldout;
    rec.theta_norm = norm2(tg);
    out.rounds.push_back(rec);
  }
  out.final_heldout = heldout;
  out.theta_g = tg;
  out.theta_d = td;
  out.final_objective = out.rounds.back().objective;
  return out;
}

}  // namespace

TrainTrace train_gan(const TrainConfig& cfg, const SyntheticTarget& target) {
  cfg.validate();
  target.validate();
  if (target.dim != cfg.disc.input_dim()) {
    throw UserError("target dimension must equal the discriminator input dimension");
  }
  const std::size_t m = cfg.noise_count();
  const std::size_t hold = cfg.heldout_factor * cfg.n;
  const Sample data = sample_target(target, cfg.n, mix_seed(cfg.seed, 1));
  const Sample noise = sample_noise(cfg.gmap.noise_dim(), m, mix_seed(cfg.seed, 2));
  const Sample q_hold = sample_target(target, hold, mix_seed(cfg.seed, 3));
  const Sample z_hold = sample_noise(cfg.gmap.noise_dim(), hold, mix_seed(cfg.seed, 4));
  const BoundedFunctionClass eval = cfg.evaluation_class();

  std::vector<SingleRun> runs(cfg.generator_restarts);
  parallel_for(runs.size(), [&](std::size_t r) {
    runs[r] = run_once(cfg, data, noise, q_hold, z_hold, eval, r);
  });

  TrainTrace trace;
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const double v = runs[r].final_objective;
    trace.restart_objectives.push_back(v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (v < runs[trace.best_restart].final_objective) trace.best_restart = r;
  }
  trace.eps_opt_proxy = runs.size() == 1 ? 0.0 : hi - lo;
  const SingleRun& best = runs[trace.best_restart];
  trace.rounds = best.rounds;
  trace.initial_heldout = best.initial_heldout;
  trace.final_heldout = best.final_heldout;
  trace.theta_star = best.theta_g;
  trace.disc_theta = best.theta_d;
  if (!trace.all_finite()) throw InvariantError("training trace contains non-finite values");
  return trace;
}

std::vector<ConsistencyRow> consistency_experiment(const TrainConfig& tmpl,
                                                   const SyntheticTarget& target,
                                                   const std::vector<std::size_t>& ns,
                                                   std::size_t reps, std::uint64_t seed) {
  if (reps < 3) throw UserError("consistency experiments need at least 3 replications");
  if (ns.empty()) throw UserError("no sample sizes given");
  tmpl.validate();
  const std::size_t jobs = ns.size() * reps;
  Vector finals(jobs);
  parallel_for(jobs, [&](std::size_t idx) {
    TrainConfig cfg = tmpl;
    cfg.n = ns[idx / reps];
    cfg.m = 10 * cfg.n;
    cfg.seed = mix_seed(seed, idx);
    finals[idx] = train_gan(cfg, target).final_heldout;
  });

  // Reference samples for the second moments of the Lipschitz profiles.
  constexpr std::size_t kReference = 100000;
  const Sample q_ref = sample_target(target, kReference, mix_seed(seed, 0xfeed));
  const Sample z_ref = sample_noise(tmpl.gmap.noise_dim(), kReference, mix_seed(seed, 0xbeef));
  const double el2_disc = tmpl.disc.rho() * estimate_el2_root(tmpl.disc.lipschitz_profile(), q_ref);
  const double rho_joint = std::hypot(tmpl.disc.rho(), tmpl.gmap.rho());
  const double el2_comp =
      rho_joint * estimate_el2_root(composite_profile(tmpl.disc, tmpl.gmap), z_ref);
  const std::size_t k_disc = tmpl.disc.param_dim();
  const std::size_t k_comp = tmpl.disc.param_dim() + tmpl.gmap.param_dim();
  const double alpha = tmpl.disc.range_lo();
  const double beta = tmpl.disc.range_hi();
  const bool fwd = tmpl.ordering == Ordering::forward;

  std::vector<ConsistencyRow> rows;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    ConsistencyRow row;
    row.n = ns[i];
    row.m = 10 * ns[i];
    double s = 0.0;
    for (std::size_t r = 0; r < reps; ++r) s += finals[i * reps + r];
    row.mean = s / static_cast<double>(reps);
    double ss = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double d = finals[i * reps + r] - row.mean;
      ss += d * d;
    }
    row.stderr_mean = std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps));
    // Forward: R over the data with n points, K over the composite with m.
    // Reverse swaps which class and count each column refers to.
    const double r_plain = fwd ? dudley_ball_bound(k_disc, row.n, el2_disc)
                               : dudley_ball_bound(k_comp, row.m, el2_comp);
    const double r_shift = fwd ? dudley_ball_bound(k_comp, row.m, el2_comp)
                               : dudley_ball_bound(k_disc, row.n, el2_disc);
    row.dudley_r_q_n = r_plain;
    row.k_m = k_quantity(tmpl.gen, r_shift, fwd ? row.m : row.n, alpha, beta);
    BoundInputs in;
    in.n = row.n;
    in.m = row.m;
    in.alpha = alpha;
    in.beta = beta;
    in.gen = tmpl.gen;
    in.r = row.dudley_r_q_n;
    in.k = row.k_m;
    const BoundSetting setting = fwd ? BoundSetting::forward_gan : BoundSetting::reverse_gan;
    in.epsilon = epsilon_for_confidence(setting, in, 0.05);
    row.threshold = compute_bound(setting, in).threshold;
    rows.push_back(row);
  }
  return rows;
}

void write_trace_csv(std::ostream& out, const TrainTrace& trace) {
  out << "round,objective,heldout,theta_norm,nu_star\n";
  for (const auto& r : trace.rounds) {
    out << r.round << ',' << format_double(r.objective) << ',' << format_double(r.heldout) << ','
        << format_double(r.theta_norm) << ',' << format_double(r.nu_star) << '\n';
  }
}

void write_consistency_csv(std::ostream& out, const std::vector<ConsistencyRow>& rows) {
  out << "n,m,mean,stderr,dudley_r_q_n,k_m,threshold\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.m << ',' << format_double(r.mean) << ',' << format_double(r.stderr_mean)
        << ',' << format_double(r.dudley_r_q_n) << ',' << format_double(r.k_m) << ','
        << format_double(r.threshold) << '\n';
  }
}

}  // namespace fgamma
