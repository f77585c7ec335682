#include <doctest.h>

#include <cmath>

#include "fgamma/discriminators.hpp"
#include "oracles.hpp"

using fgamma::BoundedFunctionClass;
using fgamma::FeatureMap;
using fgamma::GeneratorMap;
using fgamma::Sample;
using fgamma::Vector;

namespace {

Sample random_points(fgamma::Rng& rng, std::size_t n, std::size_t dim, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  Vector v(n * dim);
  for (auto& x : v) x = d(rng);
  return {dim, v};
}

std::vector<BoundedFunctionClass> architecture_matrix() {
  return {BoundedFunctionClass::linear(1, FeatureMap::identity, 2.0, 0.0, 1.0),
          BoundedFunctionClass::linear(2, FeatureMap::affine, 2.0, -1.0, 1.0),
          BoundedFunctionClass::mlp({1, 4, 1}, 3.0, 0.0, 1.0),
          BoundedFunctionClass::mlp({2, 5, 3, 1}, 3.0, 0.0, 2.0),
          BoundedFunctionClass::mlp({1, 8, 8, 1}, 5.0, -0.5, 0.5)};
}

}  // namespace

TEST_SUITE("discriminators") {
  TEST_CASE("evaluate examples") {
    const Sample support = Sample::from_scalars(Vector{0.0, 1.0, 2.0});
    const auto dict = BoundedFunctionClass::dictionary(support, {{0.3, 0.3, 0.3}, {0.0, 1.0, 0.5}});
    CHECK(dict.has_constant());
    const Vector idx{0.0};
    const auto vals = dict.evaluate(idx, Sample::from_scalars(Vector{2.0, 0.0}));
    CHECK(vals == Vector{0.3, 0.3});

    const auto net = BoundedFunctionClass::mlp({2, 4, 1}, 1.0, 0.0, 1.0);
    const Vector zero(net.param_dim(), 0.0);
    for (double v : net.evaluate(zero, Sample::from_rows({{1.0, 2.0}, {-3.0, 0.5}}))) {
      CHECK(v == 0.5);
    }

    const auto lin = BoundedFunctionClass::linear(1, FeatureMap::identity, 1.0, 0.0, 1.0);
    const Vector one{1.0};
    CHECK(lin.evaluate(one, Sample::from_scalars(Vector{0.0}))[0] == lin.squash(0.0));
    CHECK(lin.squash(0.0) == 0.5);
  }

  TEST_CASE("evaluate errors") {
    const auto net = BoundedFunctionClass::mlp({1, 3, 1}, 1.0, 0.0, 1.0);
    const Vector big(net.param_dim(), 1.0);
    CHECK_THROWS_AS(net.evaluate(big, Sample::from_scalars(Vector{0.0})), fgamma::UserError);
    const Vector zero(net.param_dim(), 0.0);
    CHECK_THROWS_AS(net.evaluate(zero, Sample::from_rows({{0.0, 1.0}})), fgamma::UserError);
    const auto dict =
        BoundedFunctionClass::dictionary(Sample::from_scalars(Vector{0.0}), {{1.0}});
    const Vector idx{0.0};
    CHECK_THROWS_AS(dict.evaluate(idx, Sample::from_scalars(Vector{0.5})), fgamma::UserError);
    const Vector cot{1.0};
    CHECK_THROWS_AS(dict.gradient(idx, Sample::from_scalars(Vector{0.0}), cot), fgamma::UserError);
    CHECK_THROWS_AS(dict.lipschitz_profile(), fgamma::UserError);
  }

  TEST_CASE("range certification over random probes") {
    fgamma::Rng rng(1);
    std::size_t outside = 0;
    std::size_t probes = 0;
    for (const auto& cls : architecture_matrix()) {
      for (int rep = 0; rep < 200; ++rep) {
        // Points up to 10^3 in scale so saturation is exercised.
        const Sample pts = random_points(rng, 100, cls.input_dim(), rep % 2 ? 1.0 : 1000.0);
        const Vector theta = fgamma::uniform_ball(rng, cls.param_dim(), cls.rho());
        for (double v : cls.evaluate(theta, pts)) {
          ++probes;
          outside += (v < cls.range_lo() || v > cls.range_hi()) ? 1 : 0;
        }
      }
    }
    CHECK(probes == 100000);
    CHECK(outside == 0);
  }

  TEST_CASE("reverse-mode gradient matches central differences") {
    fgamma::Rng rng(2);
    for (const auto& cls : architecture_matrix()) {
      CAPTURE(cls.describe());
      for (int rep = 0; rep < 5; ++rep) {
        const Sample pts = random_points(rng, 8, cls.input_dim(), 1.0);
        const Vector theta = fgamma::uniform_ball(rng, cls.param_dim(), 0.5 * cls.rho());
        Vector cot(8);
        std::normal_distribution<double> d;
        for (auto& c : cot) c = d(rng);
        const Vector grad = cls.gradient(theta, pts, cot);
        const auto fd = oracle::central_gradient(
            [&](const Vector& t) {
              const Vector h = cls.evaluate(t, pts);
              double s = 0;
              for (std::size_t i = 0; i < h.size(); ++i) s += cot[i] * h[i];
              return s;
            },
            theta);
        CHECK(oracle::relative_error(grad, fd) <= 1e-5);
      }
    }
  }

  TEST_CASE("input gradient matches central differences") {
    fgamma::Rng rng(3);
    for (const auto& cls : architecture_matrix()) {
      const Sample pts = random_points(rng, 4, cls.input_dim(), 1.0);
      const Vector theta = fgamma::uniform_ball(rng, cls.param_dim(), 0.5 * cls.rho());
      const Vector cot{0.3, -1.2, 0.7, 2.0};
      Vector gx;
      cls.gradient(theta, pts, cot, &gx);
      const auto fd = oracle::central_gradient(
          [&](const Vector& x) {
            const Vector h = cls.evaluate(theta, Sample(cls.input_dim(), x));
            double s = 0;
            for (std::size_t i = 0; i < h.size(); ++i) s += cot[i] * h[i];
            return s;
          },
          pts.data());
      CHECK(oracle::relative_error(gx, fd) <= 1e-5);
    }
  }

  TEST_CASE("zero cotangent gives zero gradient") {
    for (const auto& cls : architecture_matrix()) {
      fgamma::Rng rng(4);
      const Sample pts = random_points(rng, 5, cls.input_dim(), 1.0);
      const Vector theta = fgamma::uniform_ball(rng, cls.param_dim(), cls.rho());
      const Vector cot(5, 0.0);
      for (double g : cls.gradient(theta, pts, cot)) CHECK(g == 0.0);
    }
  }

  TEST_CASE("generator map vjp matches central differences") {
    fgamma::Rng rng(5);
    for (const auto& gm : {GeneratorMap::mlp({2, 6, 1}, 4.0), GeneratorMap::mlp({2, 5, 4, 2}, 4.0),
                           GeneratorMap::mlp({3, 2}, 2.0)}) {
      const Sample z = random_points(rng, 6, gm.noise_dim(), 1.0);
      const Vector theta = fgamma::uniform_ball(rng, gm.param_dim(), 0.5 * gm.rho());
      Vector cot(6 * gm.output_dim());
      std::normal_distribution<double> d;
      for (auto& c : cot) c = d(rng);
      const Vector grad = gm.vjp(theta, z, cot);
      const auto fd = oracle::central_gradient(
          [&](const Vector& t) {
            const Sample out = gm.push(t, z);
            double s = 0;
            for (std::size_t i = 0; i < cot.size(); ++i) s += cot[i] * out.data()[i];
            return s;
          },
          theta);
      CHECK(oracle::relative_error(grad, fd) <= 1e-5);
    }
  }

  TEST_CASE("lipschitz profile examples") {
    const auto lin = BoundedFunctionClass::linear(2, FeatureMap::identity, 3.0, 0.0, 1.0);
    const auto p = lin.lipschitz_profile();
    CHECK(p.a == 0.0);
    CHECK(p.b == 0.5);
    const Vector y{3.0, 4.0};
    CHECK(p(y) == doctest::Approx(2.5));
    const auto aff = BoundedFunctionClass::linear(2, FeatureMap::affine, 3.0, 0.0, 1.0);
    CHECK(aff.lipschitz_profile().a == 0.5);

    const auto frozen = BoundedFunctionClass::mlp({1, 4, 4, 1}, 0.0, 0.0, 1.0);
    const auto z = frozen.lipschitz_profile();
    CHECK(z(y) == 0.0);
    const Vector y1{1.0};
    CHECK(z(y1) == 0.0);
  }

  TEST_CASE("lipschitz profile soundness") {
    fgamma::Rng rng(6);
    std::vector<BoundedFunctionClass> classes = architecture_matrix();
    classes.push_back(BoundedFunctionClass::mlp({1, 6, 1}, 1.0, 0.0, 1.0));
    for (const auto& cls : classes) {
      CAPTURE(cls.describe());
      const auto prof = cls.lipschitz_profile();
      std::size_t violations = 0;
      for (int yi = 0; yi < 100; ++yi) {
        const Sample y = random_points(rng, 1, cls.input_dim(), yi < 50 ? 1.0 : 5.0);
        const double bound = prof(y.point(0));
        for (int t = 0; t < 10; ++t) {
          const Vector a = fgamma::uniform_ball(rng, cls.param_dim(), cls.rho());
          const Vector b = fgamma::uniform_ball(rng, cls.param_dim(), cls.rho());
          Vector diff(a.size());
          for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
          const double q = std::abs(cls.evaluate(a, y)[0] - cls.evaluate(b, y)[0]) /
                           fgamma::norm2(diff);
          violations += q > bound * (1 + 1e-12) ? 1 : 0;
        }
      }
      CHECK(violations == 0);
    }
  }

  TEST_CASE("composite profile soundness") {
    fgamma::Rng rng(7);
    const auto disc = BoundedFunctionClass::mlp({1, 4, 1}, 2.0, 0.0, 1.0);
    const auto gm = GeneratorMap::mlp({2, 4, 1}, 2.0);
    const auto prof = fgamma::composite_profile(disc, gm);
    std::size_t violations = 0;
    for (int zi = 0; zi < 50; ++zi) {
      const Sample z = random_points(rng, 1, 2, 2.0);
      for (int t = 0; t < 20; ++t) {
        const Vector da = fgamma::uniform_ball(rng, disc.param_dim(), disc.rho());
        const Vector db = fgamma::uniform_ball(rng, disc.param_dim(), disc.rho());
        const Vector ga = fgamma::uniform_ball(rng, gm.param_dim(), gm.rho());
        const Vector gb = fgamma::uniform_ball(rng, gm.param_dim(), gm.rho());
        const double ha = disc.evaluate(da, gm.push(ga, z))[0];
        const double hb = disc.evaluate(db, gm.push(gb, z))[0];
        double d2 = 0;
        for (std::size_t i = 0; i < da.size(); ++i) d2 += (da[i] - db[i]) * (da[i] - db[i]);
        for (std::size_t i = 0; i < ga.size(); ++i) d2 += (ga[i] - gb[i]) * (ga[i] - gb[i]);
        violations += std::abs(ha - hb) > prof(z.point(0)) * std::sqrt(d2) * (1 + 1e-12) ? 1 : 0;
      }
    }
    CHECK(violations == 0);
  }

  TEST_CASE("ball projection and sampling") {
    fgamma::Rng rng(8);
    for (int i = 0; i < 100; ++i) {
      const Vector v = fgamma::uniform_ball(rng, 7, 2.5);
      CHECK(fgamma::norm2(v) <= 2.5 + 1e-12);
    }
    Vector big{3.0, 4.0};
    fgamma::project_to_ball(big, 1.0);
    CHECK(fgamma::norm2(big) == doctest::Approx(1.0));
    CHECK(big[0] == doctest::Approx(0.6));
  }

  TEST_CASE("dictionary validation") {
    const Sample support = Sample::from_scalars(Vector{0.0, 1.0});
    CHECK_THROWS_AS(BoundedFunctionClass::dictionary(support, {{1.0}}), fgamma::UserError);
    CHECK_THROWS_AS(BoundedFunctionClass::dictionary(Sample::from_scalars(Vector{0.0, 0.0}),
                                                     {{1.0, 2.0}}),
                    fgamma::UserError);
    CHECK_THROWS_AS(
        BoundedFunctionClass::dictionary(support, {{0.0, 2.0}}, std::pair{0.0, 1.0}),
        fgamma::UserError);
    const auto d = BoundedFunctionClass::dictionary(support, {{0.0, 1.0}});
    CHECK_FALSE(d.has_constant());
    CHECK(d.range_lo() == 0.0);
    CHECK(d.range_hi() == 1.0);
  }
}
