#include <doctest.h>

#include <cmath>

#include "hylyap/errors.hpp"
#include "hylyap/presets.hpp"
#include "hylyap/rng.hpp"
#include "hylyap/setvalued.hpp"

using namespace hylyap;

TEST_CASE("flow map evaluation") {
  const FlowMap rot = FlowMap::linear(presets::clegg_a_f());
  CHECK(rot.eval(Vec{1.0, 0.0}) == Vec{0.0, -1.0});

  const FlowMap circle = presets::circle_system().flow;
  CHECK(circle.eval(Vec{0.0, 0.0}) == Vec{0.0, 0.0});

  const FlowMap flower = presets::flower_system().flow;
  CHECK(flower.switching(Vec{2.0, 1.0}) == doctest::Approx(3.0));
  const Vec f = flower.eval(Vec{2.0, 1.0});
  CHECK(f[0] == doctest::Approx(-1.6));
  CHECK(f[1] == doctest::Approx(9.7));
  CHECK_THROWS_AS(static_cast<void>(flower.eval(Vec{1.0, 1.0})), UsageError);
  CHECK(flower.selections(Vec{1.0, 1.0}).size() == 2);
  CHECK(flower.selections(Vec{2.0, 1.0}).size() == 1);
  CHECK(rot.is_continuous());
  CHECK_FALSE(flower.is_continuous());
}

TEST_CASE("attractive sliding on the diagonal") {
  const FlowMap flower = presets::flower_system().flow;
  const SlidingInfo s = sliding_resolve(flower, Vec{1.0, 1.0});
  CHECK(s.on_surface);
  CHECK(s.lambda == doctest::Approx(0.5));
  CHECK(s.field[0] == doctest::Approx(1.7));
  CHECK(s.field[1] == doctest::Approx(1.7));
  CHECK(s.surface_normal == Vec{2.0, -2.0});

  const SlidingInfo m = sliding_resolve(flower, Vec{-1.0, -1.0});
  CHECK(m.on_surface);
  CHECK(m.lambda == doctest::Approx(0.5));
  CHECK(m.field[0] == doctest::Approx(-1.7));
  CHECK(m.field[1] == doctest::Approx(-1.7));
}

TEST_CASE("repulsive, singular and off-locus points") {
  const FlowMap flower = presets::flower_system().flow;
  CHECK_THROWS_AS(sliding_resolve(flower, Vec{1.0, -1.0}), AmbiguousSliding);
  CHECK_THROWS_AS(sliding_resolve(flower, Vec{0.0, 0.0}), SingularPoint);
  CHECK_THROWS_AS(sliding_resolve(flower, Vec{2.0, 1.0}), UsageError);
  CHECK_THROWS_AS(sliding_resolve(FlowMap::linear(presets::clegg_a_f()), Vec{1.0, 1.0}), UsageError);
}

TEST_CASE("identical modes cross without sliding") {
  const Matrix a = Matrix::from_rows({{-1.0, 2.0}, {-2.0, -1.0}});
  const FlowMap f = FlowMap::filippov2(a, a, presets::flower_q());
  const SlidingInfo s = sliding_resolve(f, Vec{1.0, 1.0});
  CHECK_FALSE(s.on_surface);
  CHECK(max_abs_diff(s.field, a * Vec{1.0, 1.0}) <= 1e-15);
  CHECK((s.lambda == 0.0 || s.lambda == 1.0));
}

TEST_CASE("property: sliding tangency and hull membership") {
  const FlowMap flower = presets::flower_system().flow;
  Rng rng(31);
  for (int k = 0; k < 1000; ++k) {
    const double r = std::exp(rng.uniform(-4.0, 4.0));
    const double sgn = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const Vec x{sgn * r, sgn * r};
    const SlidingInfo s = sliding_resolve(flower, x);
    REQUIRE(s.on_surface);
    CHECK(std::abs(dot(s.surface_normal, s.field)) <= 1e-10 * x.squared_norm());
    CHECK(s.lambda >= 0.0);
    CHECK(s.lambda <= 1.0);
    const Vec hull = s.lambda * flower.mode_field(1, x) + (1.0 - s.lambda) * flower.mode_field(2, x);
    CHECK(max_abs_diff(hull, s.field) <= 1e-12 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("property: linear and Filippov fields are degree-1 homogeneous") {
  const FlowMap flower = presets::flower_system().flow;
  const FlowMap rot = FlowMap::linear(presets::clegg_a_f());
  Rng rng(32);
  for (int k = 0; k < 1000; ++k) {
    const Vec x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double l = rng.uniform(0.01, 10.0);
    CHECK(max_abs_diff(rot.eval(l * x), l * rot.eval(x)) <= 1e-12 * (1.0 + l * x.norm()));
    if (std::abs(flower.switching(x)) > 1e-6 * x.squared_norm()) {
      CHECK(max_abs_diff(flower.eval(l * x), l * flower.eval(x)) <= 1e-12 * (1.0 + l * x.norm()));
    }
    const Vec d{x[0], x[0]};
    if (std::abs(x[0]) > 1e-3) {
      CHECK(max_abs_diff(sliding_resolve(flower, l * d).field, l * sliding_resolve(flower, d).field) <=
            1e-12 * (1.0 + l * d.norm()));
    }
  }
}

TEST_CASE("property: the norm-scaled field is tangent to the arc") {
  const FlowMap f = presets::circle_system().flow;
  const CurveArc arc = presets::circle_arc();
  for (int k = 0; k <= 1000; ++k) {
    const double t = arc.t_min() + (arc.t_max() - arc.t_min()) * k / 1000.0;
    const Vec x = arc.point(t);
    CHECK(std::abs(dot(x - arc.center(), f.eval(x))) <= 1e-10);
  }
}

TEST_CASE("locus projection") {
  const FlowMap flower = presets::flower_system().flow;
  const Vec y = project_to_locus(flower, Vec{1.0, 1.001});
  CHECK(std::abs(flower.switching(y)) <= 1e-12);
  const Vec sf = sliding_field(flower, Vec{1.0, 1.0});
  CHECK(sf[0] == doctest::Approx(1.7));
}
