#include <doctest.h>

#include <cmath>
#include <random>

#include "fgamma/cgf.hpp"
#include "oracles.hpp"

using fgamma::DivergenceGenerator;

namespace {

std::function<double(double)> fstar_of(const DivergenceGenerator& g) {
  return [g](double z) { return g.f_star(z); };
}

struct Case {
  DivergenceGenerator gen;
  double alpha;
  double beta;
};

std::vector<Case> cases() {
  return {{DivergenceGenerator::kl(), 0.0, 1.0},
          {DivergenceGenerator::js(), 0.0, 0.5},
          {DivergenceGenerator::alpha(2.0), 0.0, 1.0},
          {DivergenceGenerator::alpha(3.0), -0.5, 1.5}};
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_SUITE("cgf") {
  TEST_CASE("constant vector returns the constant") {
    const std::vector<double> xs(7, 0.37);
    const auto r = fgamma::lambda_empirical(xs, DivergenceGenerator::kl());
    CHECK(r.value == 0.37);
  }

  TEST_CASE("KL two-point value is log 2") {
    const std::vector<double> xs{0.0, std::log(3.0)};
    const auto r = fgamma::lambda_empirical(xs, DivergenceGenerator::kl());
    CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(r.bracket_lo == doctest::Approx(-1.0));
    CHECK(r.bracket_hi == doctest::Approx(std::log(3.0) - 1.0));
  }

  TEST_CASE("alpha(2) on (0, 2): grid oracle") {
    const auto g = DivergenceGenerator::alpha(2.0);
    const std::vector<double> xs{0.0, 2.0};
    const double oracle_value = oracle::grid_min(
        [&](double nu) { return oracle::cgf_objective(xs, fstar_of(g), nu); }, -2.0, 2.0, 400001);
    CHECK(oracle_value == doctest::Approx(1.5).epsilon(1e-9));
    const auto r = fgamma::lambda_empirical(xs, g);
    CHECK(r.value == doctest::Approx(oracle_value).epsilon(1e-9));
    CHECK(r.nu_star == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  }

  TEST_CASE("errors") {
    const std::vector<double> empty;
    CHECK_THROWS_AS(fgamma::lambda_empirical(empty, DivergenceGenerator::kl()), fgamma::UserError);
    const std::vector<double> wide{0.0, 1.0};
    CHECK_THROWS_AS(fgamma::lambda_empirical(wide, DivergenceGenerator::js()), fgamma::UserError);
  }

  TEST_CASE("value and shift stay inside the bracket bounds") {
    std::mt19937_64 rng(3);
    for (const auto& c : cases()) {
      for (int rep = 0; rep < 200; ++rep) {
        const auto xs = random_vector(rng, 1 + rep % 17, c.alpha, c.beta);
        const auto r = fgamma::lambda_empirical(xs, c.gen);
        const double lo = *std::min_element(xs.begin(), xs.end());
        const double hi = *std::max_element(xs.begin(), xs.end());
        CHECK(r.value >= lo);
        CHECK(r.value <= hi);
        CHECK(r.nu_star >= lo - c.gen.z0());
        CHECK(r.nu_star <= hi - c.gen.z0());
      }
    }
  }

  TEST_CASE("KL matches log-mean-exp") {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int rep = 0; rep < 300; ++rep) {
      const auto xs = random_vector(rng, 1 + rep % 64, 0.0, 1.0);
      const auto r = fgamma::lambda_empirical(xs, DivergenceGenerator::kl());
      worst = std::max(worst, std::abs(r.value - oracle::log_mean_exp(xs)));
    }
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("shift equivariance") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> shift(-3.0, 3.0);
    for (const auto& c : cases()) {
      for (int rep = 0; rep < 100; ++rep) {
        auto xs = random_vector(rng, 10, c.alpha, c.beta);
        const double base = fgamma::lambda_empirical(xs, c.gen).value;
        const double s = shift(rng);
        for (auto& x : xs) x += s;
        CHECK(fgamma::lambda_empirical(xs, c.gen).value == doctest::Approx(base + s).epsilon(1e-9).scale(1.0));
      }
    }
  }

  TEST_CASE("monotone in each coordinate") {
    std::mt19937_64 rng(13);
    for (const auto& c : cases()) {
      for (int rep = 0; rep < 100; ++rep) {
        const auto xs = random_vector(rng, 8, c.alpha, c.beta);
        auto ys = xs;
        std::uniform_real_distribution<double> up(0.0, 1.0);
        for (auto& y : ys) y = y + (c.beta - y) * up(rng);
        CHECK(fgamma::lambda_empirical(xs, c.gen).value <=
              fgamma::lambda_empirical(ys, c.gen).value + 1e-12);
      }
    }
  }

  TEST_CASE("compact bracket agrees with wide grid") {
    std::mt19937_64 rng(17);
    for (const auto& c : cases()) {
      CAPTURE(c.gen.spec());
      for (int rep = 0; rep < 10; ++rep) {
        const auto xs = random_vector(rng, 6, c.alpha, c.beta);
        const double wide = oracle::wide_grid_lambda(xs, fstar_of(c.gen), c.gen.z0());
        CHECK(std::abs(fgamma::lambda_empirical(xs, c.gen).value - wide) <= 1e-6);
      }
    }
  }

  TEST_CASE("lambda_lipschitz_const") {
    CHECK(fgamma::lambda_lipschitz_const(DivergenceGenerator::kl(), 0, 1) ==
          doctest::Approx(std::exp(1.0)));
    CHECK(fgamma::lambda_lipschitz_const(DivergenceGenerator::alpha(2.0), 0, 1) ==
          doctest::Approx(2.0));
    CHECK(fgamma::lambda_lipschitz_const(DivergenceGenerator::kl(), 0, 0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(fgamma::lambda_lipschitz_const(DivergenceGenerator::js(), 0, 1),
                    fgamma::UserError);
  }

  TEST_CASE("delta_f examples") {
    const auto kl = DivergenceGenerator::kl();
    CHECK(fgamma::delta_f(kl, 1, 0, 1).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fgamma::delta_f(kl, 17, 0.3, 0.3).value == 0.0);
    CHECK(fgamma::delta_f(DivergenceGenerator::js(), 5, 0.2, 0.2).value == 0.0);

    // n = 10: grid search over z in [z0 - 1, z0] with 10^5 points.
    const double n = 10;
    const double grid = oracle::grid_min(
        [&](double z) { return -n * z + (n - 1) * kl.f_star(z) + kl.f_star(1.0 + z); }, 0.0, 1.0,
        100000);
    const auto d = fgamma::delta_f(kl, 10, 0, 1);
    CHECK(d.value >= 1.0);
    CHECK(d.value <= std::exp(1.0) - 1.0);
    CHECK(std::abs(d.value - grid) <= 1e-6);
    CHECK_FALSE(d.clamped());
  }

  TEST_CASE("delta sandwich for n = 1..100") {
    for (const auto& c : cases()) {
      const double w = c.beta - c.alpha;
      const double upper = c.gen.f_star(w + c.gen.z0()) - c.gen.z0();
      const double loose = c.gen.f_star_rprime(w + c.gen.z0()) * w;
      for (std::size_t n = 1; n <= 100; ++n) {
        const double d = fgamma::delta_f(c.gen, n, c.alpha, c.beta).value;
        CHECK(w <= d);
        CHECK(d <= upper);
        CHECK(upper <= loose + 1e-12);
      }
    }
  }

  TEST_CASE("perturbation extremal gap equals delta / n") {
    CHECK(fgamma::perturbation_extremal_gap(DivergenceGenerator::kl(), 1, 0, 1) ==
          doctest::Approx(1.0).epsilon(1e-9));
    const auto a2 = DivergenceGenerator::alpha(2.0);
    CHECK(std::abs(fgamma::perturbation_extremal_gap(a2, 4, 0, 1) -
                   fgamma::delta_f(a2, 4, 0, 1).value / 4) <= 1e-6);
    CHECK(fgamma::perturbation_extremal_gap(DivergenceGenerator::kl(), 6, 0.4, 0.4) == 0.0);
  }

  TEST_CASE("Lipschitz and single-coordinate bounds on random pairs") {
    std::mt19937_64 rng(23);
    for (const auto& c : cases()) {
      const double L = fgamma::lambda_lipschitz_const(c.gen, c.alpha, c.beta);
      for (std::size_t n : {1u, 3u, 12u}) {
        const double delta_over_n = fgamma::delta_f(c.gen, n, c.alpha, c.beta).value / n;
        for (int rep = 0; rep < 200; ++rep) {
          const auto x = random_vector(rng, n, c.alpha, c.beta);
          const auto y = random_vector(rng, n, c.alpha, c.beta);
          double l1 = 0;
          for (std::size_t i = 0; i < n; ++i) l1 += std::abs(x[i] - y[i]);
          const double gap = std::abs(fgamma::lambda_empirical(x, c.gen).value -
                                      fgamma::lambda_empirical(y, c.gen).value);
          CHECK(gap <= L * l1 / n + 1e-9);

          auto z = x;
          z[rep % n] = y[rep % n];
          const double single = fgamma::lambda_empirical(z, c.gen).value -
                                fgamma::lambda_empirical(x, c.gen).value;
          CHECK(single <= delta_over_n + 1e-9);
        }
      }
    }
  }
}
