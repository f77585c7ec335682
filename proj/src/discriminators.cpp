#include "fgamma/discriminators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fgamma {

// ---------------------------------------------------------------- Mlp

Mlp::Mlp(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw UserError("an mlp needs at least input and output widths");
  for (std::size_t w : widths_) {
    if (w == 0) throw UserError("mlp layer widths must be positive");
  }
  offsets_.push_back(0);
  for (std::size_t l = 1; l < widths_.size(); ++l) {
    param_dim_ += widths_[l] * widths_[l - 1] + widths_[l];
    offsets_.push_back(param_dim_);
  }
  max_width_ = *std::max_element(widths_.begin(), widths_.end());
}

std::size_t Mlp::tape_stride() const {
  std::size_t total = 0;
  for (std::size_t w : widths_) total += w;
  return total;
}

namespace {

// One layer: out = W in + b, then tanh unless it is the output layer.
void dense(const double* W, const double* b, const double* in, double* out, std::size_t n_in,
           std::size_t n_out, bool hidden) {
  for (std::size_t r = 0; r < n_out; ++r) {
    double z = b[r];
    const double* row = W + r * n_in;
    for (std::size_t c = 0; c < n_in; ++c) z += row[c] * in[c];
    out[r] = hidden ? std::tanh(z) : z;
  }
}

}  // namespace

Vector Mlp::forward(std::span<const double> theta, const Sample& pts, Tape* tape) const {
  const std::size_t L = layers();
  const std::size_t stride = tape_stride();
  Vector out(pts.size() * output_dim());
  Vector local(tape ? 0 : stride);
  if (tape) tape->acts.resize(pts.size() * stride);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double* act = tape ? tape->acts.data() + i * stride : local.data();
    const auto x = pts.point(i);
    std::copy(x.begin(), x.end(), act);
    double* prev = act;
    for (std::size_t l = 1; l <= L; ++l) {
      double* cur = prev + widths_[l - 1];
      const double* W = theta.data() + offsets_[l - 1];
      dense(W, W + widths_[l] * widths_[l - 1], prev, cur, widths_[l - 1], widths_[l], l < L);
      prev = cur;
    }
    std::copy(prev, prev + output_dim(), out.begin() + static_cast<std::ptrdiff_t>(i * output_dim()));
  }
  return out;
}

void Mlp::backward(std::span<const double> theta, const Sample& pts,
                   std::span<const double> cotangent, std::span<double> grad_theta,
                   Vector* grad_inputs, const Tape* tape) const {
  const std::size_t L = layers();
  const std::size_t stride = tape_stride();
  if (tape && tape->acts.size() != pts.size() * stride) {
    throw InvariantError("mlp tape does not match the points");
  }
  Vector local(stride);
  Vector delta(max_width_);
  Vector prev(max_width_);
  if (grad_inputs) grad_inputs->assign(pts.size() * input_dim(), 0.0);

  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto g = cotangent.subspan(i * output_dim(), output_dim());
    bool zero = true;
    for (double v : g) zero = zero && v == 0.0;
    if (zero) continue;

    const double* act = nullptr;
    if (tape) {
      act = tape->acts.data() + i * stride;
    } else {
      const auto x = pts.point(i);
      std::copy(x.begin(), x.end(), local.begin());
      double* p = local.data();
      for (std::size_t l = 1; l <= L; ++l) {
        double* cur = p + widths_[l - 1];
        const double* W = theta.data() + offsets_[l - 1];
        dense(W, W + widths_[l] * widths_[l - 1], p, cur, widths_[l - 1], widths_[l], l < L);
        p = cur;
      }
      act = local.data();
    }
    // Start of each layer's activations inside the per-point block.
    std::size_t layer_start = stride - widths_[L];

    std::copy(g.begin(), g.end(), delta.begin());
    for (std::size_t l = L; l >= 1; --l) {
      const std::size_t in = widths_[l - 1];
      const std::size_t o = widths_[l];
      layer_start -= in;
      const double* a_in = act + layer_start;
      const double* W = theta.data() + offsets_[l - 1];
      double* gW = grad_theta.data() + offsets_[l - 1];
      double* gb = gW + o * in;
      std::fill(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(in), 0.0);
      for (std::size_t r = 0; r < o; ++r) {
        const double d = delta[r];
        gb[r] += d;
        const double* row = W + r * in;
        double* grow = gW + r * in;
        for (std::size_t c = 0; c < in; ++c) {
          grow[c] += d * a_in[c];
          prev[c] += row[c] * d;
        }
      }
      if (l > 1) {
        for (std::size_t c = 0; c < in; ++c) delta[c] = prev[c] * (1.0 - a_in[c] * a_in[c]);
      } else if (grad_inputs) {
        std::copy(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(in),
                  grad_inputs->begin() + static_cast<std::ptrdiff_t>(i * in));
      }
    }
  }
}

namespace {

// Affine profile of an mlp in its parameters, scaled by the output slope.
// Perturbing layer l moves its pre-activation by at most
// ||dtheta_l|| * ||(a_{l-1}, 1)||; later layers have operator norm <= rho
// and tanh is 1-Lipschitz. Hidden activations lie in [-1, 1].
LipschitzProfile mlp_profile(const std::vector<std::size_t>& widths, double rho, double slope) {
  if (rho == 0.0) return {};
  const std::size_t L = widths.size() - 1;
  double a = std::pow(rho, static_cast<double>(L - 1));
  const double b = a;
  for (std::size_t l = 2; l <= L; ++l) {
    a += std::pow(rho, static_cast<double>(L - l)) *
         std::sqrt(static_cast<double>(widths[l - 1]) + 1.0);
  }
  return {slope * a, slope * b, {}};
}

// sup of prod ||W_l|| subject to sum ||W_l||^2 <= rho^2.
double product_norm_bound(double rho, std::size_t layers) {
  const double L = static_cast<double>(layers);
  return std::pow(rho * rho / L, L / 2.0);
}

}  // namespace

// ---------------------------------------------------------------- helpers

double LipschitzProfile::operator()(std::span<const double> y) const {
  if (custom) return custom(y);
  return a + b * norm2(y);
}

std::string to_string(ClassKind k) {
  switch (k) {
    case ClassKind::finite_dictionary: return "dictionary";
    case ClassKind::linear_features: return "linear";
    case ClassKind::mlp: return "mlp";
  }
  return "unknown";
}

Vector uniform_ball(Rng& rng, std::size_t k, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector v(k);
  double n = 0.0;
  while (n == 0.0) {
    for (auto& x : v) x = normal(rng);
    n = norm2(v);
  }
  const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(k));
  for (auto& x : v) x *= r / n;
  return v;
}

void project_to_ball(Vector& theta, double rho) {
  const double n = norm2(theta);
  if (n > rho) {
    const double s = n > 0 ? rho / n : 0.0;
    for (auto& x : theta) x *= s;
  }
}

namespace {

void check_ball(std::span<const double> theta, std::size_t dim, double rho) {
  if (theta.size() != dim) {
    throw UserError("parameter vector has length " + std::to_string(theta.size()) +
                    ", expected " + std::to_string(dim));
  }
  if (norm2(theta) > rho * (1.0 + 1e-12) + 1e-300) {
    throw UserError("parameter vector lies outside the ball of radius " + format_double(rho));
  }
}

void check_range(double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !(alpha <= beta)) {
    throw UserError("class range must satisfy alpha <= beta");
  }
}

}  // namespace

// ---------------------------------------------------------------- classes

BoundedFunctionClass BoundedFunctionClass::dictionary(
    Sample support, std::vector<Vector> members, std::optional<std::pair<double, double>> range) {
  if (support.empty()) throw UserError("dictionary support is empty");
  if (members.empty()) throw UserError("dictionary has no members");
  BoundedFunctionClass c;
  c.kind_ = ClassKind::finite_dictionary;
  c.input_dim_ = support.dim();
  double lo = kInf;
  double hi = -kInf;
  for (const auto& m : members) {
    if (m.size() != support.size()) {
      throw UserError("dictionary member is not tabulated on every support point");
    }
    for (double v : m) {
      if (!std::isfinite(v)) throw UserError("dictionary values must be finite");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (range) {
    check_range(range->first, range->second);
    if (lo < range->first || hi > range->second) {
      throw UserError("dictionary values fall outside the declared range");
    }
    lo = range->first;
    hi = range->second;
  }
  c.alpha_ = lo;
  c.beta_ = hi;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto p = support.point(i);
    if (!c.index_.emplace(Vector(p.begin(), p.end()), i).second) {
      throw UserError("dictionary support points must be distinct");
    }
  }
  c.support_ = std::move(support);
  c.members_ = std::move(members);
  return c;
}

BoundedFunctionClass BoundedFunctionClass::linear(std::size_t input_dim, FeatureMap features,
                                                  double rho, double alpha, double beta) {
  if (input_dim == 0) throw UserError("input dimension must be positive");
  if (!(rho >= 0)) throw UserError("ball radius must be non-negative");
  check_range(alpha, beta);
  BoundedFunctionClass c;
  c.kind_ = ClassKind::linear_features;
  c.input_dim_ = input_dim;
  c.features_ = features;
  c.rho_ = rho;
  c.alpha_ = alpha;
  c.beta_ = beta;
  return c;
}

BoundedFunctionClass BoundedFunctionClass::mlp(std::vector<std::size_t> widths, double rho,
                                               double alpha, double beta) {
  if (!(rho >= 0)) throw UserError("ball radius must be non-negative");
  check_range(alpha, beta);
  BoundedFunctionClass c;
  c.kind_ = ClassKind::mlp;
  c.net_ = Mlp(std::move(widths));
  if (c.net_.output_dim() != 1) throw UserError("discriminator mlp must have scalar output");
  c.input_dim_ = c.net_.input_dim();
  c.rho_ = rho;
  c.alpha_ = alpha;
  c.beta_ = beta;
  return c;
}

std::size_t BoundedFunctionClass::param_dim() const {
  switch (kind_) {
    case ClassKind::finite_dictionary: return 1;
    case ClassKind::linear_features:
      return input_dim_ + (features_ == FeatureMap::affine ? 1 : 0);
    case ClassKind::mlp: return net_.param_dim();
  }
  return 0;
}

bool BoundedFunctionClass::has_constant() const {
  if (kind_ != ClassKind::finite_dictionary) return true;
  return std::any_of(members_.begin(), members_.end(), [](const Vector& m) {
    return std::all_of(m.begin(), m.end(), [&](double v) { return v == m.front(); });
  });
}

double BoundedFunctionClass::squash(double s) const {
  const double v = alpha_ + (beta_ - alpha_) * (std::tanh(s) + 1.0) / 2.0;
  return std::clamp(v, alpha_, beta_);
}

double BoundedFunctionClass::squash_slope(double s) const {
  const double t = std::tanh(s);
  return (beta_ - alpha_) * (1.0 - t * t) / 2.0;
}

std::size_t BoundedFunctionClass::lookup(std::span<const double> x) const {
  const auto it = index_.find(Vector(x.begin(), x.end()));
  if (it == index_.end()) throw UserError("point is not on the dictionary support");
  return it->second;
}

void BoundedFunctionClass::check_points(const Sample& pts) const {
  if (!pts.empty() && pts.dim() != input_dim_) {
    throw UserError("point dimension " + std::to_string(pts.dim()) + " does not match class input " +
                    std::to_string(input_dim_));
  }
}

void BoundedFunctionClass::check_theta(std::span<const double> theta) const {
  if (kind_ == ClassKind::finite_dictionary) {
    if (theta.size() != 1 || theta[0] < 0 || theta[0] != std::floor(theta[0]) ||
        theta[0] >= static_cast<double>(members_.size())) {
      throw UserError("dictionary parameter must be a member index");
    }
    return;
  }
  check_ball(theta, param_dim(), rho_);
}

void BoundedFunctionClass::project(Vector& theta) const { project_to_ball(theta, rho_); }

Vector BoundedFunctionClass::random_theta(Rng& rng, double scale) const {
  if (!differentiable()) throw UserError("dictionary classes are enumerated, not sampled");
  return uniform_ball(rng, param_dim(), scale * rho_);
}

Vector BoundedFunctionClass::member_values(std::size_t j, const Sample& pts) const {
  if (kind_ != ClassKind::finite_dictionary) throw UserError("not a dictionary class");
  if (j >= members_.size()) throw UserError("dictionary member index out of range");
  check_points(pts);
  Vector out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = members_[j][lookup(pts.point(i))];
  return out;
}

Vector BoundedFunctionClass::evaluate(std::span<const double> theta, const Sample& pts,
                                      Cache* cache) const {
  check_theta(theta);
  check_points(pts);
  switch (kind_) {
    case ClassKind::finite_dictionary:
      return member_values(static_cast<std::size_t>(theta[0]), pts);
    case ClassKind::linear_features: {
      Vector out(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto x = pts.point(i);
        double s = features_ == FeatureMap::affine ? theta[input_dim_] : 0.0;
        for (std::size_t j = 0; j < input_dim_; ++j) s += theta[j] * x[j];
        out[i] = squash(s);
      }
      return out;
    }
    case ClassKind::mlp: {
      Vector out = net_.forward(theta, pts, cache ? &cache->tape : nullptr);
      if (cache) cache->raw = out;
      for (auto& v : out) v = squash(v);
      return out;
    }
  }
  return {};
}

Vector BoundedFunctionClass::gradient(std::span<const double> theta, const Sample& pts,
                                      std::span<const double> cotangent, Vector* grad_inputs,
                                      const Cache* cache) const {
  if (!differentiable()) {
    throw UserError("dictionary classes are not differentiably parameterized");
  }
  check_theta(theta);
  check_points(pts);
  if (cotangent.size() != pts.size()) throw UserError("cotangent length must match point count");
  Vector grad(param_dim(), 0.0);
  if (kind_ == ClassKind::linear_features) {
    if (grad_inputs) grad_inputs->assign(pts.size() * input_dim_, 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (cotangent[i] == 0.0) continue;
      const auto x = pts.point(i);
      double s = features_ == FeatureMap::affine ? theta[input_dim_] : 0.0;
      for (std::size_t j = 0; j < input_dim_; ++j) s += theta[j] * x[j];
      const double d = cotangent[i] * squash_slope(s);
      for (std::size_t j = 0; j < input_dim_; ++j) {
        grad[j] += d * x[j];
        if (grad_inputs) (*grad_inputs)[i * input_dim_ + j] = d * theta[j];
      }
      if (features_ == FeatureMap::affine) grad[input_dim_] += d;
    }
    return grad;
  }
  // Chain the squash slope into the output cotangent, then run one pass.
  const bool cached = cache && cache->raw.size() == pts.size();
  const Vector raw = cached ? cache->raw : net_.forward(theta, pts);
  Vector g(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) g[i] = cotangent[i] * squash_slope(raw[i]);
  net_.backward(theta, pts, g, grad, grad_inputs, cached ? &cache->tape : nullptr);
  return grad;
}

LipschitzProfile BoundedFunctionClass::lipschitz_profile() const {
  const double slope = (beta_ - alpha_) / 2.0;
  switch (kind_) {
    case ClassKind::finite_dictionary:
      throw UserError("dictionary classes carry no parameter metric");
    case ClassKind::linear_features:
      // |s - s'| <= ||theta - theta'|| ||phi(y)||, ||(y, 1)|| <= ||y|| + 1.
      return {features_ == FeatureMap::affine ? slope : 0.0, slope, {}};
    case ClassKind::mlp:
      return mlp_profile(net_.widths(), rho_, slope);
  }
  return {};
}

double BoundedFunctionClass::input_lipschitz() const {
  const double slope = (beta_ - alpha_) / 2.0;
  switch (kind_) {
    case ClassKind::finite_dictionary:
      throw UserError("dictionary classes carry no input metric");
    case ClassKind::linear_features: return slope * rho_;
    case ClassKind::mlp: return slope * product_norm_bound(rho_, net_.layers());
  }
  return 0.0;
}

std::string BoundedFunctionClass::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (kind_ == ClassKind::mlp) {
    os << "[";
    for (std::size_t i = 0; i < widths().size(); ++i) os << (i ? "," : "") << widths()[i];
    os << "]";
  } else if (kind_ == ClassKind::linear_features) {
    os << (features_ == FeatureMap::affine ? "(affine," : "(identity,") << input_dim_ << ")";
  } else {
    os << "(" << members_.size() << " members on " << support_.size() << " points)";
  }
  os << " range [" << format_double(alpha_) << ", " << format_double(beta_) << "]";
  if (differentiable()) os << " rho " << format_double(rho_);
  return os.str();
}

// ---------------------------------------------------------------- generator map

GeneratorMap GeneratorMap::mlp(std::vector<std::size_t> widths, double rho) {
  if (!(rho >= 0)) throw UserError("ball radius must be non-negative");
  GeneratorMap g;
  g.net_ = Mlp(std::move(widths));
  g.rho_ = rho;
  return g;
}

void GeneratorMap::check_theta(std::span<const double> theta) const {
  check_ball(theta, param_dim(), rho_);
}

void GeneratorMap::project(Vector& theta) const { project_to_ball(theta, rho_); }

Vector GeneratorMap::random_theta(Rng& rng, double scale) const {
  return uniform_ball(rng, param_dim(), scale * rho_);
}

Sample GeneratorMap::push(std::span<const double> theta, const Sample& noise) const {
  check_theta(theta);
  if (noise.dim() != noise_dim()) throw UserError("noise dimension does not match generator input");
  return {output_dim(), net_.forward(theta, noise)};
}

Vector GeneratorMap::vjp(std::span<const double> theta, const Sample& noise,
                         std::span<const double> cotangent) const {
  check_theta(theta);
  if (noise.dim() != noise_dim()) throw UserError("noise dimension does not match generator input");
  if (cotangent.size() != noise.size() * output_dim()) {
    throw UserError("cotangent length must be points x output dimension");
  }
  Vector grad(param_dim(), 0.0);
  net_.backward(theta, noise, cotangent, grad, nullptr);
  return grad;
}

LipschitzProfile GeneratorMap::lipschitz_profile() const {
  return mlp_profile(net_.widths(), rho_, 1.0);
}

std::pair<double, double> GeneratorMap::output_norm_bound() const {
  if (net_.layers() == 1) return {rho_, rho_};
  const double w = static_cast<double>(net_.widths()[net_.widths().size() - 2]);
  return {rho_ * std::sqrt(w + 1.0), 0.0};
}

LipschitzProfile composite_profile(const BoundedFunctionClass& disc, const GeneratorMap& gmap) {
  const LipschitzProfile pd = disc.lipschitz_profile();
  const LipschitzProfile pg = gmap.lipschitz_profile();
  const auto [c0, c1] = gmap.output_norm_bound();
  const double lx = disc.input_lipschitz();
  LipschitzProfile out;
  out.custom = [pd, pg, c0 = c0, c1 = c1, lx](std::span<const double> z) {
    const double nz = norm2(z);
    const double a = pd.a + pd.b * (c0 + c1 * nz);
    const double b = lx * pg(z);
    return std::sqrt(a * a + b * b);
  };
  return out;
}

}  // namespace fgamma
