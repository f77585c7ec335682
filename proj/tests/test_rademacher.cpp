#include <doctest.h>

#include <cmath>

#include "fgamma/rademacher.hpp"
#include "oracles.hpp"

using fgamma::BoundedFunctionClass;
using fgamma::DivergenceGenerator;
using fgamma::Sample;
using fgamma::Vector;

namespace {

Sample first_points(std::size_t n) {
  Vector xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<double>(i);
  return Sample::from_scalars(xs);
}

// Constants on a grid over [alpha, beta], tabulated on n points.
BoundedFunctionClass interval_constants(std::size_t n, double alpha, double beta) {
  std::vector<Vector> members;
  for (int i = 0; i <= 100; ++i) members.emplace_back(n, alpha + (beta - alpha) * i / 100.0);
  return BoundedFunctionClass::dictionary(first_points(n), members);
}

}  // namespace

TEST_SUITE("rademacher") {
  TEST_CASE("constant interval closed form") {
    CHECK(fgamma::rademacher_constant_interval(1, 0, 1) == doctest::Approx(0.5));
    CHECK(fgamma::rademacher_constant_interval(2, 0, 1) == doctest::Approx(0.25));
    CHECK(fgamma::rademacher_constant_interval(5, 0.3, 0.3) == 0.0);
    CHECK_THROWS_AS(fgamma::rademacher_constant_interval(31, 0, 1), fgamma::UserError);
    for (int n = 1; n <= 12; ++n) {
      CHECK(fgamma::rademacher_constant_interval(n, -1, 2) ==
            doctest::Approx(3.0 / (2 * n) * oracle::expected_abs_rademacher_sum(n)).epsilon(1e-13));
    }
  }

  TEST_CASE("enumeration reproduces the constant interval values") {
    for (std::size_t n : {1u, 2u, 5u}) {
      const auto cls = interval_constants(n, 0.0, 1.0);
      const double exact = fgamma::rademacher_enumerate(cls, first_points(n));
      CHECK(exact == doctest::Approx(fgamma::rademacher_constant_interval(n, 0, 1)).epsilon(1e-12));
    }
    CHECK(fgamma::rademacher_enumerate(interval_constants(1, 0, 1), first_points(1)) ==
          doctest::Approx(0.5));
    CHECK(fgamma::rademacher_enumerate(interval_constants(2, 0, 1), first_points(2)) ==
          doctest::Approx(0.25));
  }

  TEST_CASE("singleton class has complexity zero") {
    const auto single = BoundedFunctionClass::dictionary(first_points(6), {{0.1, 0.5, 0.2, 0.9, 0.4, 0.7}});
    CHECK(std::abs(fgamma::rademacher_enumerate(single, first_points(6))) <= 1e-15);
    const auto est = fgamma::empirical_rademacher(single, first_points(6), 4000, 3);
    CHECK(std::abs(est.mean) <= 3 * est.std_error);
    CHECK(est.mode() == "exact");
  }

  TEST_CASE("Monte Carlo within 3 stderr of enumeration for n <= 8") {
    fgamma::Rng rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t n = 1; n <= 8; ++n) {
      std::vector<Vector> members(5, Vector(n));
      for (auto& m : members) {
        for (auto& v : m) v = u(rng);
      }
      const auto dict = BoundedFunctionClass::dictionary(first_points(n), members);
      const double exact = fgamma::rademacher_enumerate(dict, first_points(n));
      CHECK(exact == doctest::Approx(oracle::enumerate_rademacher(members)).epsilon(1e-12));
      const auto est = fgamma::empirical_rademacher(dict, first_points(n), 4000, 100 + n);
      CHECK(std::abs(est.mean - exact) <= 3 * est.std_error + 1e-12);
    }
  }

  TEST_CASE("Dudley ball bound examples") {
    CHECK(fgamma::dudley_ball_bound(4, 100, 1) == doctest::Approx(9.6));
    CHECK(fgamma::dudley_ball_bound(7, 13, 0) == 0.0);
    CHECK(fgamma::dudley_ball_bound(1, 1, 1) == 48.0);
  }

  TEST_CASE("Dudley integral bound") {
    CHECK(fgamma::dudley_integral_bound(3, 10, 1, 0) == 0.0);
    const double k1 = fgamma::dudley_integral_bound(1, 100, 1, 2);
    CHECK(k1 <= 4.8);
    CHECK(k1 > 0.0);
    const double k4 = fgamma::dudley_integral_bound(4, 100, 1, 2);
    CHECK(k4 <= 9.6);
    CHECK(k4 >= k1);
    // sqrt(k) scaling of the integrand is exact.
    CHECK(k4 == doctest::Approx(2 * k1).epsilon(1e-10));
    for (std::size_t k = 1; k <= 16; ++k) {
      CHECK(fgamma::dudley_integral_bound(k, 50, 1.3, 2) <=
            12.0 / std::sqrt(50.0) * 1.3 * 4.0 * std::sqrt(static_cast<double>(k)));
    }
    // Independent midpoint-rule value of int_0^2 sqrt(log(1 + 2/e)) de.
    double ref = 0;
    const int steps = 2000000;
    for (int i = 0; i < steps; ++i) {
      const double e = (i + 0.5) * 2.0 / steps;
      ref += std::sqrt(std::log1p(2.0 / e)) * 2.0 / steps;
    }
    // The head term near eps = 0 is bounded analytically, so a small excess.
    CHECK(k1 / 1.2 == doctest::Approx(ref).epsilon(3e-3));
    CHECK(k1 / 1.2 >= ref);
  }

  TEST_CASE("el2 root") {
    fgamma::LipschitzProfile zero;
    CHECK(fgamma::estimate_el2_root(zero, first_points(4)) == 0.0);
    fgamma::LipschitzProfile norm{0.0, 1.0, {}};
    CHECK(fgamma::estimate_el2_root(norm, Sample::from_rows({{3.0, 4.0}})) == doctest::Approx(5.0));
    fgamma::LipschitzProfile one{1.0, 0.0, {}};
    CHECK(fgamma::estimate_el2_root(one, first_points(9)) == 1.0);
  }

  TEST_CASE("k_quantity") {
    const auto kl = DivergenceGenerator::kl();
    const double e = std::exp(1.0);
    // (f*)'_+(z0 + 1) = e for kl on [0, 1].
    const double expect = std::min((1 + 2 * e) * 0.1 + e / 20, e * (0.1 + 0.05));
    CHECK(fgamma::k_quantity(kl, 0.1, 100, 0, 1) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(fgamma::k_quantity(kl, 0.1, 100, 0, 1, false) == doctest::Approx(e * 0.15));
    CHECK(fgamma::k_quantity(kl, 0.0, 100000000, 0, 1) < 1e-3);
    CHECK(fgamma::k_quantity(kl, 0.2, 10, 0.5, 0.5) == doctest::Approx(0.2));
    // alpha(3) on a width-1 interval has no Lipschitz constant: plain form.
    const auto a3 = DivergenceGenerator::alpha(3.0);
    CHECK(fgamma::k_quantity(a3, 0.1, 100, 0, 1) ==
          doctest::Approx(a3.f_star_rprime(1.5) * 0.15).epsilon(1e-14));
    CHECK_THROWS_AS(fgamma::k_quantity(DivergenceGenerator::js(), 0.1, 10, 0, 1), fgamma::UserError);
    // Monotone in r and in the width.
    double prev = 0;
    for (int i = 0; i <= 20; ++i) {
      const double v = fgamma::k_quantity(kl, 0.01 * i, 50, 0, 1);
      CHECK(v >= prev);
      prev = v;
    }
    prev = 0;
    for (int i = 0; i <= 20; ++i) {
      const double v = fgamma::k_quantity(kl, 0.05, 50, 0, 0.1 * i);
      CHECK(v >= prev);
      prev = v;
    }
  }

  TEST_CASE("ascent estimate for an mlp stays under the Dudley certificate") {
    fgamma::Rng rng(5);
    std::normal_distribution<double> d;
    Vector xs(20);
    for (auto& x : xs) x = d(rng);
    const Sample pts = Sample::from_scalars(xs);
    const auto net = BoundedFunctionClass::mlp({1, 3, 1}, 1.0, 0.0, 1.0);
    auto cfg = fgamma::rademacher_ascent_defaults();
    cfg.max_iterations = 60;
    const auto est = fgamma::empirical_rademacher(net, pts, 30, 9, cfg);
    CHECK(est.mode() == "ascent-lower-bound");
    const double cert = fgamma::dudley_certificate(net.param_dim(), net.rho(),
                                                   net.lipschitz_profile(), pts);
    CHECK(est.mean <= cert + 3 * est.std_error);
    CHECK(est.mean >= 0.0);
  }

  TEST_CASE("determinism across thread counts") {
    const auto dict = interval_constants(8, 0, 1);
    const auto before = fgamma::thread_count();
    fgamma::set_thread_count(1);
    const auto a = fgamma::empirical_rademacher(dict, first_points(8), 500, 77);
    fgamma::set_thread_count(4);
    const auto b = fgamma::empirical_rademacher(dict, first_points(8), 500, 77);
    fgamma::set_thread_count(before);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
  }
}
