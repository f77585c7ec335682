#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fgamma/discriminators.hpp"
#include "fgamma/divergence.hpp"
#include "fgamma/generators.hpp"
#include "fgamma/optim.hpp"
#include "fgamma/sample.hpp"

namespace fgamma {

/// Synthetic data source. In two dimensions the coordinates are independent
/// copies of the one-dimensional law, except for mixtures where both
/// coordinates share the drawn component.
struct SyntheticTarget {
  enum class Kind { gaussian, mixture, student_t, uniform };

  Kind kind = Kind::gaussian;
  std::size_t dim = 1;
  double mu = 0.0;
  double sigma = 1.0;
  std::vector<double> weights;
  std::vector<double> mus;
  std::vector<double> sigmas;
  double dof = 3.0;
  double scale = 1.0;
  double lo = 0.0;
  double hi = 1.0;

  static SyntheticTarget gaussian(double mu, double sigma, std::size_t dim = 1);
  static SyntheticTarget mixture(std::vector<double> weights, std::vector<double> mus,
                                 std::vector<double> sigmas, std::size_t dim = 1);
  static SyntheticTarget student_t(double dof, double scale, std::size_t dim = 1);
  static SyntheticTarget uniform(double lo, double hi, std::size_t dim = 1);

  /// Throws UserError on invalid parameters.
  void validate() const;
  bool finite_second_moment() const;
  std::string describe() const;
};

Sample sample_target(const SyntheticTarget& target, std::size_t n, std::uint64_t seed);

/// Standard gaussian noise of the given dimension.
Sample sample_noise(std::size_t dim, std::size_t n, std::uint64_t seed);

enum class Ordering { forward, reverse };
std::string to_string(Ordering o);

struct TrainConfig {
  DivergenceGenerator gen = DivergenceGenerator::alpha(2.0);
  BoundedFunctionClass disc = BoundedFunctionClass::mlp({1, 8, 8, 1}, 2.0, 0.0, 1.0);
  GeneratorMap gmap = GeneratorMap::mlp({2, 8, 1}, 10.0);
  std::size_t n = 2000;
  /// 0 selects 10 n.
  std::size_t m = 0;
  std::size_t inner_steps = 20;
  std::size_t outer_steps = 1;
  std::size_t rounds = 200;
  std::uint64_t seed = 0;
  Ordering ordering = Ordering::forward;
  double disc_lr = 0.01;
  double gen_lr = 0.01;
  /// The generator learning rate decays linearly to gen_lr * gen_lr_final
  /// at the last round.
  double gen_lr_final = 0.05;
  double disc_init_scale = 0.1;
  double gen_init_scale = 0.1;
  std::size_t generator_restarts = 1;
  /// Held-out samples have heldout_factor * n points on each side.
  std::size_t heldout_factor = 10;
  /// Held-out checkpoints every this many rounds (0: first and last only).
  std::size_t eval_every = 0;
  /// Evaluation class; defaults to a wider mlp over the same range.
  std::optional<BoundedFunctionClass> eval_class;
  AscentConfig eval_ascent = default_eval_ascent();

  std::size_t noise_count() const { return m == 0 ? 10 * n : m; }
  /// Throws UserError when the pieces do not fit together.
  void validate() const;
  BoundedFunctionClass evaluation_class() const;

  static AscentConfig default_eval_ascent();
};

struct RoundRecord {
  std::size_t round = 0;
  double objective = 0.0;
  /// Latest held-out estimate (carried forward between checkpoints).
  double heldout = 0.0;
  double theta_norm = 0.0;
  double nu_star = 0.0;
};

struct TrainTrace {
  std::vector<RoundRecord> rounds;
  double initial_heldout = 0.0;
  double final_heldout = 0.0;
  Vector theta_star;
  Vector disc_theta;
  /// max - min of the final objectives across generator restarts.
  double eps_opt_proxy = 0.0;
  std::vector<double> restart_objectives;
  std::size_t best_restart = 0;

  bool all_finite() const;
};

/// Objective of one GAN round: the plain mean runs over `plain` and Lambda
/// over `shifted`. Forward ordering passes (data, generated), reverse
/// passes (generated, data).
double gan_objective(const DivergenceGenerator& gen, const BoundedFunctionClass& disc,
                     std::span<const double> theta_d, const Sample& plain, const Sample& shifted,
                     double* nu_star = nullptr);

/// Objective and its generator gradient (envelope in nu) for fixed
/// discriminator parameters.
double generator_objective(const TrainConfig& cfg, std::span<const double> theta_d,
                           std::span<const double> theta_g, const Sample& data,
                           const Sample& noise, Vector* grad, double* nu_star = nullptr);

TrainTrace train_gan(const TrainConfig& cfg, const SyntheticTarget& target);

struct ConsistencyRow {
  std::size_t n = 0;
  std::size_t m = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  double dudley_r_q_n = 0.0;
  double k_m = 0.0;
  double threshold = 0.0;
};

/// For each n (m = 10 n), `reps` independent trainings; the Dudley and K
/// columns use a fixed reference sample so they depend on n only through
/// the closed-form sqrt(k / n) scaling.
std::vector<ConsistencyRow> consistency_experiment(const TrainConfig& tmpl,
                                                   const SyntheticTarget& target,
                                                   const std::vector<std::size_t>& ns,
                                                   std::size_t reps, std::uint64_t seed);

void write_trace_csv(std::ostream& out, const TrainTrace& trace);
void write_consistency_csv(std::ostream& out, const std::vector<ConsistencyRow>& rows);

}  // namespace fgamma
