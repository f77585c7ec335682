#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fgamma/common.hpp"
#include "fgamma/sample.hpp"

namespace fgamma {

/// Fully connected network with tanh hidden layers and a linear output
/// layer. Parameters are laid out layer by layer as W (row-major, out x in)
/// followed by b.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<std::size_t> widths);

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t input_dim() const { return widths_.front(); }
  std::size_t output_dim() const { return widths_.back(); }
  std::size_t param_dim() const { return param_dim_; }
  std::size_t layers() const { return widths_.size() - 1; }

  /// Activations of every layer for every point, kept by forward() so a
  /// following backward() on the same theta and points can skip recomputing.
  struct Tape {
    Vector acts;
  };

  /// Outputs for every point, row-major (points x output_dim).
  Vector forward(std::span<const double> theta, const Sample& pts, Tape* tape = nullptr) const;

  /// Accumulates sum_i cotangent_i . d out(x_i) / d theta into grad_theta and,
  /// when grad_inputs is non-null, writes d(cotangent_i . out(x_i))/d x_i
  /// (points x input_dim).
  void backward(std::span<const double> theta, const Sample& pts,
                std::span<const double> cotangent, std::span<double> grad_theta,
                Vector* grad_inputs, const Tape* tape = nullptr) const;

 private:
  std::size_t tape_stride() const;

  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
  std::size_t param_dim_ = 0;
  std::size_t max_width_ = 0;
};

/// Per-point bound L(y) on the parameter-Lipschitz constant of a class:
/// |h_theta(y) - h_theta'(y)| <= L(y) ||theta - theta'||.
struct LipschitzProfile {
  double a = 0.0;
  double b = 0.0;
  /// Overrides the affine form when set.
  std::function<double(std::span<const double>)> custom;

  double operator()(std::span<const double> y) const;
  bool is_affine() const { return !custom; }
};

enum class ClassKind { finite_dictionary, linear_features, mlp };
enum class FeatureMap { identity, affine };

std::string to_string(ClassKind k);

/// Parameterized discriminator family with certified output range.
///
/// Differentiable kinds pass their final affine output s through
/// s -> alpha + (beta - alpha) (tanh(s) + 1) / 2, so every output lies in
/// [alpha, beta]. Dictionaries are tabulated on explicit support points and
/// their parameter is the member index.
class BoundedFunctionClass {
 public:
  static BoundedFunctionClass dictionary(Sample support, std::vector<Vector> members,
                                         std::optional<std::pair<double, double>> range = {});
  static BoundedFunctionClass linear(std::size_t input_dim, FeatureMap features, double rho,
                                     double alpha, double beta);
  static BoundedFunctionClass mlp(std::vector<std::size_t> widths, double rho, double alpha,
                                  double beta);

  ClassKind kind() const { return kind_; }
  double range_lo() const { return alpha_; }
  double range_hi() const { return beta_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t param_dim() const;
  double rho() const { return rho_; }
  bool differentiable() const { return kind_ != ClassKind::finite_dictionary; }
  FeatureMap features() const { return features_; }
  const std::vector<std::size_t>& widths() const { return net_.widths(); }

  /// Dictionaries: true when some member is constant on the support.
  /// Parameterized kinds always contain the constant at theta = 0.
  bool has_constant() const;

  std::size_t member_count() const { return members_.size(); }
  const Sample& support() const { return support_; }
  const std::vector<Vector>& members() const { return members_; }
  /// Values of dictionary member j at the points (which must lie on the support).
  Vector member_values(std::size_t j, const Sample& pts) const;

  /// Forward state reusable by gradient() for the same theta and points.
  struct Cache {
    Mlp::Tape tape;
    Vector raw;
  };

  Vector evaluate(std::span<const double> theta, const Sample& pts, Cache* cache = nullptr) const;

  /// sum_i cotangent_i d h_theta(x_i)/d theta. With grad_inputs non-null also
  /// returns cotangent_i d h_theta(x_i)/d x_i per point.
  Vector gradient(std::span<const double> theta, const Sample& pts,
                  std::span<const double> cotangent, Vector* grad_inputs = nullptr,
                  const Cache* cache = nullptr) const;

  LipschitzProfile lipschitz_profile() const;

  /// Lipschitz constant of x -> h_theta(x) over the parameter ball.
  double input_lipschitz() const;

  /// Throws UserError when theta is outside the ball or has the wrong length.
  void check_theta(std::span<const double> theta) const;
  void project(Vector& theta) const;
  /// Uniform draw from the ball of radius scale * rho.
  Vector random_theta(Rng& rng, double scale) const;

  double squash(double s) const;
  double squash_slope(double s) const;

  std::string describe() const;

 private:
  std::size_t lookup(std::span<const double> x) const;
  void check_points(const Sample& pts) const;

  ClassKind kind_ = ClassKind::mlp;
  double alpha_ = 0.0;
  double beta_ = 1.0;
  double rho_ = 0.0;
  std::size_t input_dim_ = 0;
  FeatureMap features_ = FeatureMap::identity;
  Mlp net_;
  Sample support_;
  std::vector<Vector> members_;
  std::map<Vector, std::size_t> index_;
};

/// Generator map Phi_theta from noise space to sample space.
class GeneratorMap {
 public:
  static GeneratorMap mlp(std::vector<std::size_t> widths, double rho);

  std::size_t noise_dim() const { return net_.input_dim(); }
  std::size_t output_dim() const { return net_.output_dim(); }
  std::size_t param_dim() const { return net_.param_dim(); }
  double rho() const { return rho_; }
  const std::vector<std::size_t>& widths() const { return net_.widths(); }

  Sample push(std::span<const double> theta, const Sample& noise) const;
  /// sum_j cotangent_j . d Phi_theta(z_j)/d theta, cotangent row-major
  /// (points x output_dim).
  Vector vjp(std::span<const double> theta, const Sample& noise,
             std::span<const double> cotangent) const;

  LipschitzProfile lipschitz_profile() const;
  /// sup over the ball of ||Phi_theta(z)|| as a function of ||z||: c0 + c1 ||z||.
  std::pair<double, double> output_norm_bound() const;

  void check_theta(std::span<const double> theta) const;
  void project(Vector& theta) const;
  Vector random_theta(Rng& rng, double scale) const;

 private:
  Mlp net_;
  double rho_ = 0.0;
};

/// Profile of (theta_d, theta_g) -> h_{theta_d}(Phi_{theta_g}(z)) with respect
/// to the joint Euclidean norm.
LipschitzProfile composite_profile(const BoundedFunctionClass& disc, const GeneratorMap& gmap);

/// Uniform draw from the Euclidean ball of the given radius in R^k.
Vector uniform_ball(Rng& rng, std::size_t k, double radius);

void project_to_ball(Vector& theta, double rho);

}  // namespace fgamma
