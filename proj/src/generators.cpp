#include "fgamma/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fgamma/golden.hpp"

namespace fgamma {

namespace {

const double kLog2 = std::log(2.0);

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Probe grid for the conjugate identities: 201 points on z0 +/- 5, cut back
// to stay strictly below the finiteness edge of f*.
std::vector<double> conjugate_probe_grid(const DivergenceGenerator& gen) {
  const double lo = gen.z0() - 5.0;
  double hi = gen.z0() + 5.0;
  if (std::isfinite(gen.fstar_finite_sup())) {
    hi = std::min(hi, gen.fstar_finite_sup() - 1e-3);
  }
  std::vector<double> grid;
  constexpr int kPoints = 201;
  grid.reserve(kPoints);
  for (int i = 0; i < kPoints; ++i) grid.push_back(lo + (hi - lo) * i / (kPoints - 1));
  return grid;
}

std::vector<double> primal_probe_grid(const DivergenceGenerator& gen) {
  double lo = std::max(gen.domain_lo(), 0.0) + 0.05;
  double hi = std::isfinite(gen.domain_hi()) ? gen.domain_hi() - 0.05 : 5.0;
  std::vector<double> grid;
  constexpr int kPoints = 100;
  for (int i = 0; i < kPoints; ++i) grid.push_back(lo + (hi - lo) * i / (kPoints - 1));
  return grid;
}

ValidationReport run_validation(const DivergenceGenerator& gen) {
  ValidationReport report;

  {
    const double v = gen.f(1.0);
    report.checks.push_back({"f(1) = 0", std::abs(v) <= 1e-12, std::abs(v), ""});
  }

  const auto zs = conjugate_probe_grid(gen);
  {
    double worst = 0.0;
    for (double z : zs) worst = std::max(worst, z - gen.f_star(z));
    report.checks.push_back({"f*(z) >= z", worst <= 1e-12, std::max(worst, 0.0), ""});
  }
  {
    double worst = 0.0;
    for (std::size_t i = 1; i < zs.size(); ++i) {
      worst = std::max(worst, gen.f_star(zs[i - 1]) - gen.f_star(zs[i]));
    }
    report.checks.push_back({"f* non-decreasing", worst <= 1e-12, std::max(worst, 0.0), ""});
  }
  {
    double worst = 0.0;
    bool ok = true;
    for (std::size_t i = 1; i < zs.size(); ++i) {
      if (!gen.fstar_finite_at(zs[i])) break;
      const double d = gen.f_star_rprime(zs[i - 1]) - gen.f_star_rprime(zs[i]);
      worst = std::max(worst, d);
    }
    ok = worst <= 1e-12;
    report.checks.push_back({"(f*)'+ non-decreasing", ok, std::max(worst, 0.0), ""});
  }
  {
    const double z0 = gen.z0();
    const double d1 = std::abs(gen.f_star(z0) - z0);
    report.checks.push_back({"f*(z0) = z0", d1 <= 1e-9, d1, ""});
    double d2 = kInf;
    if (gen.fstar_finite_at(z0)) d2 = std::abs(gen.f_star_rprime(z0) - 1.0);
    report.checks.push_back({"(f*)'+(z0) = 1", d2 <= 1e-9, d2, ""});
  }
  {
    double worst = 0.0;
    for (double t : primal_probe_grid(gen)) {
      worst = std::max(worst, std::abs(legendre_of_conjugate(gen, t) - gen.f(t)));
    }
    report.checks.push_back({"Legendre round trip", worst <= 1e-6, worst, "100 interior points"});
  }
  {
    // Strict midpoint convexity on [0.9, 1.1]; only a local probe.
    double worst = -kInf;
    for (int i = 0; i < 20; ++i) {
      const double s = 0.9 + 0.01 * i;
      const double t = s + 0.01;
      const double gap = 0.5 * (gen.f(s) + gen.f(t)) - gen.f(0.5 * (s + t));
      worst = i == 0 ? gap : std::min(worst, gap);
    }
    report.checks.push_back({"strictly convex on [0.9, 1.1]", worst > 0.0, worst,
                             "probed locally; global strict convexity is not certified"});
  }
  return report;
}

}  // namespace

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (!first) os << "; ";
    os << c.name << " violated by " << c.margin;
    first = false;
  }
  return first ? std::string("ok") : os.str();
}

DivergenceGenerator DivergenceGenerator::kl() {
  DivergenceGenerator g;
  g.family_ = Family::kl;
  g.name_ = "kl";
  g.z0_ = 1.0;
  return g;
}

DivergenceGenerator DivergenceGenerator::js() {
  DivergenceGenerator g;
  g.family_ = Family::js;
  g.name_ = "js";
  g.z0_ = 0.0;
  g.fstar_sup_ = kLog2;
  g.recession_ = kLog2;
  return g;
}

DivergenceGenerator DivergenceGenerator::alpha(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw UserError("alpha-divergence requires alpha > 1, got " + format_double(alpha));
  }
  DivergenceGenerator g;
  g.family_ = Family::alpha;
  g.name_ = "alpha";
  g.alpha_ = alpha;
  g.z0_ = 1.0 / (alpha - 1.0);
  g.alpha_power_ = alpha / (alpha - 1.0);
  g.alpha_coef_ = std::pow(alpha - 1.0, g.alpha_power_) / alpha;
  g.alpha_offset_ = 1.0 / (alpha * (alpha - 1.0));
  return g;
}

DivergenceGenerator DivergenceGenerator::custom(CustomGeneratorSpec spec) {
  if (!spec.f || !spec.f_star || !spec.f_star_rprime) {
    throw UserError("custom generator needs f, f* and (f*)'+ closures");
  }
  if (!(spec.domain_lo >= 0.0) || !(spec.domain_lo < 1.0) || !(spec.domain_hi > 1.0)) {
    throw UserError("custom generator domain must satisfy 0 <= a < 1 < b");
  }
  if (!(spec.z0 < spec.fstar_finite_sup)) {
    throw UserError("custom generator: z0 must lie inside {f* < inf}");
  }
  DivergenceGenerator g;
  g.family_ = Family::custom;
  g.name_ = spec.name;
  g.z0_ = spec.z0;
  g.fstar_sup_ = spec.fstar_finite_sup;
  g.domain_lo_ = spec.domain_lo;
  g.domain_hi_ = spec.domain_hi;
  g.recession_ = spec.recession_slope;
  g.custom_ = std::make_shared<const CustomGeneratorSpec>(std::move(spec));
  auto report = std::make_shared<const ValidationReport>(run_validation(g));
  if (!report->ok()) {
    throw UserError("custom generator '" + g.name_ + "' failed validation: " + report->summary());
  }
  g.report_ = std::move(report);
  return g;
}

DivergenceGenerator DivergenceGenerator::parse(std::string_view spec) {
  if (spec == "kl") return kl();
  if (spec == "js") return js();
  if (spec.starts_with("alpha:")) {
    const auto tail = spec.substr(6);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), value);
    if (ec != std::errc() || ptr != tail.data() + tail.size()) {
      throw UserError("malformed alpha value in generator spec '" + std::string(spec) + "'");
    }
    return alpha(value);
  }
  throw UserError("unknown generator '" + std::string(spec) + "' (expected kl, js or alpha:<a>)");
}

std::string DivergenceGenerator::spec() const {
  if (family_ == Family::alpha) {
    std::ostringstream os;
    os << "alpha:" << alpha_;
    return os.str();
  }
  return name_;
}

std::optional<double> DivergenceGenerator::alpha_param() const {
  if (family_ == Family::alpha) return alpha_;
  return std::nullopt;
}

double DivergenceGenerator::f(double t) const {
  if (t < domain_lo_ || t > domain_hi_ || std::isnan(t)) return kInf;
  switch (family_) {
    case Family::kl:
      return t == 0.0 ? 0.0 : t * std::log(t);
    case Family::js: {
      const double head = t == 0.0 ? 0.0 : t * std::log(t);
      return head - (t + 1.0) * std::log((1.0 + t) / 2.0);
    }
    case Family::alpha:
      return (std::pow(t, alpha_) - 1.0) / (alpha_ * (alpha_ - 1.0));
    case Family::custom:
      return custom_->f(t);
  }
  return kInf;
}

double DivergenceGenerator::f_star(double z) const {
  switch (family_) {
    case Family::kl:
      return std::exp(z - 1.0);
    case Family::js:
      if (z >= kLog2) return kInf;
      return -std::log(2.0 - std::exp(z));
    case Family::alpha: {
      const double zp = std::max(z, 0.0);
      const double powered = alpha_power_ == 2.0 ? zp * zp : std::pow(zp, alpha_power_);
      return alpha_coef_ * powered + alpha_offset_;
    }
    case Family::custom:
      if (z >= fstar_sup_) return kInf;
      return custom_->f_star(z);
  }
  return kInf;
}

double DivergenceGenerator::f_star_rprime(double z) const {
  if (!(z < fstar_sup_)) {
    throw UserError("(f*)'+ evaluated at z = " + format_double(z) +
                    " outside the open finiteness domain (-inf, " + format_double(fstar_sup_) +
                    ") of " + spec());
  }
  switch (family_) {
    case Family::kl:
      return std::exp(z - 1.0);
    case Family::js: {
      const double e = std::exp(z);
      return e / (2.0 - e);
    }
    case Family::alpha:
      if (alpha_ == 2.0) return std::max(z, 0.0);
      return std::pow((alpha_ - 1.0) * std::max(z, 0.0), 1.0 / (alpha_ - 1.0));
    case Family::custom:
      return custom_->f_star_rprime(z);
  }
  return kInf;
}

bool DivergenceGenerator::strictly_convex_near_one() const {
  if (!report_) return true;
  for (const auto& c : report_->checks) {
    if (c.name.starts_with("strictly convex")) return c.passed;
  }
  return true;
}

ValidationReport DivergenceGenerator::validate() const {
  if (report_) return *report_;
  return run_validation(*this);
}

double legendre_of_conjugate(const DivergenceGenerator& gen, double t) {
  // The maximizer of z t - f*(z) is where (f*)'+ crosses t; bracket it by
  // walking away from z0, then polish with golden section.
  const double edge = gen.fstar_finite_sup();
  double lo = gen.z0() - 1.0;
  for (int i = 0; i < 200 && gen.f_star_rprime(lo) > t; ++i) lo -= std::ldexp(1.0, i);
  double hi = gen.z0() + 1.0;
  if (std::isfinite(edge)) {
    double gap = edge - gen.z0();
    hi = gen.z0() + 0.5 * gap;
    for (int i = 0; i < 1000 && gen.f_star_rprime(hi) < t; ++i) {
      gap *= 0.5;
      hi = edge - gap;
      if (gap < 1e-300) break;
    }
  } else {
    for (int i = 0; i < 200 && gen.f_star_rprime(hi) < t; ++i) hi += std::ldexp(1.0, i);
  }
  const auto best = golden_section_minimize(
      [&](double z) {
        const double fs = gen.f_star(z);
        return std::isinf(fs) ? kInf : fs - z * t;
      },
      lo, hi, 1e-13 * std::max(1.0, hi - lo), 1000);
  return -best.value;
}

std::optional<double> rprime_lipschitz(const DivergenceGenerator& gen, double alpha, double beta) {
  if (!(alpha <= beta)) throw UserError("rprime_lipschitz requires alpha <= beta");
  const double width = beta - alpha;
  const double lo = gen.z0() - width;
  const double hi = gen.z0() + width;
  if (!gen.fstar_finite_at(hi)) {
    throw UserError("interval [z0 - (beta - alpha), z0 + beta - alpha] = [" + format_double(lo) +
                    ", " + format_double(hi) + "] leaves {f* < inf} for " + gen.spec());
  }
  if (width == 0.0) return 0.0;

  switch (gen.family()) {
    case DivergenceGenerator::Family::kl:
      // (f*)'' = e^{z-1}, increasing.
      return std::exp(hi - 1.0);
    case DivergenceGenerator::Family::js: {
      // (f*)'' = 2 e^z / (2 - e^z)^2, increasing on the finiteness domain.
      const double e = std::exp(hi);
      return 2.0 * e / ((2.0 - e) * (2.0 - e));
    }
    case DivergenceGenerator::Family::alpha: {
      const double a = *gen.alpha_param();
      const double q = 1.0 / (a - 1.0);
      // (f*)'' = q (a-1)^q z^{q-1} on z > 0, zero on z < 0.
      auto second = [&](double z) { return q * std::pow(a - 1.0, q) * std::pow(z, q - 1.0); };
      if (hi <= 0.0) return 0.0;
      if (a < 2.0) return second(hi);
      if (a == 2.0) return 1.0;
      if (lo <= 0.0) return std::nullopt;  // (f*)'' blows up at 0+
      return second(lo);
    }
    case DivergenceGenerator::Family::custom: {
      constexpr int kPoints = 10000;
      double worst = 0.0;
      double prev = gen.f_star_rprime(lo);
      for (int i = 1; i < kPoints; ++i) {
        const double z = lo + (hi - lo) * i / (kPoints - 1);
        const double cur = gen.f_star_rprime(z);
        worst = std::max(worst, std::abs(cur - prev) / ((hi - lo) / (kPoints - 1)));
        prev = cur;
      }
      return 1.05 * worst;
    }
  }
  return std::nullopt;
}

Compatibility check_compatibility(const DivergenceGenerator& gen, double alpha, double beta) {
  Compatibility out;
  if (!(alpha <= beta)) {
    out.ok = false;
    out.violation = "range requires alpha <= beta, got alpha = " + format_double(alpha) +
                    ", beta = " + format_double(beta);
    return out;
  }
  const double edge = gen.z0() + beta - alpha;
  if (!gen.fstar_finite_at(edge)) {
    out.ok = false;
    out.violation = "z0 + beta - alpha = " + format_double(edge) +
                    " is not inside {f* < inf} = (-inf, " + format_double(gen.fstar_finite_sup()) +
                    ") for generator " + gen.spec();
    if (gen.family() == DivergenceGenerator::Family::js) out.violation += " (log 2 = 0.693147)";
    return out;
  }
  if (!gen.strictly_convex_near_one()) {
    out.ok = false;
    out.violation = "f is not strictly convex near 1 for generator " + gen.spec();
  }
  return out;
}

void require_compatible(const DivergenceGenerator& gen, double alpha, double beta) {
  if (auto c = check_compatibility(gen, alpha, beta); !c) throw UserError(c.violation);
}

}  // namespace fgamma
