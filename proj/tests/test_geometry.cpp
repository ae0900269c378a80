#include <doctest.h>

#include <cmath>

#include "hylyap/errors.hpp"
#include "hylyap/geometry.hpp"
#include "hylyap/rng.hpp"
#include "oracles.hpp"

using namespace hylyap;

namespace {

SymMatrix random_sym(Rng& rng, std::size_t n) {
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) s.set(i, j, rng.uniform(-3.0, 3.0));
  }
  return s;
}

Vec random_vec(Rng& rng, std::size_t n, double scale = 2.0) {
  Vec v(n);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

}  // namespace

TEST_CASE("quadratic form values") {
  const QuadraticForm p2(SymMatrix::from_rows({{2.5, 1.4}, {1.4, 0.5}}));
  CHECK(p2.value(Vec{1.0, 0.0}) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(p2.value(Vec{0.0, 0.0}) == 0.0);
  CHECK(QuadraticForm(SymMatrix::identity(2)).value(Vec{3.0, 4.0}) == doctest::Approx(25.0));
  CHECK_THROWS_AS(static_cast<void>(p2.value(Vec{1.0, 2.0, 3.0})), UsageError);
}

TEST_CASE("quadratic form gradients") {
  const QuadraticForm p1(SymMatrix::from_rows({{1.0, -0.1}, {-0.1, 0.5}}));
  const Vec g = p1.grad(Vec{0.0, 1.0});
  CHECK(g[0] == doctest::Approx(-0.2));
  CHECK(g[1] == doctest::Approx(1.0));
  CHECK(p1.grad(Vec{0.0, 0.0}) == Vec{0.0, 0.0});
  CHECK(QuadraticForm(SymMatrix::identity(2)).grad(Vec{1.0, 2.0}) == Vec{2.0, 4.0});
  CHECK_THROWS_AS(static_cast<void>(p1.grad(Vec{1.0})), UsageError);
}

TEST_CASE("eigen extremes") {
  SUBCASE("flower mode 1 symmetric part") {
    const Matrix a1 = Matrix::from_rows({{-0.3, -1.0}, {5.0, -0.3}});
    const SymMatrix p1 = SymMatrix::diagonal({5.0, 1.0});
    const SymMatrix s = SymMatrix::symmetric_part(p1.to_matrix() * a1);
    CHECK(s(0, 0) == doctest::Approx(-1.5));
    CHECK(s(0, 1) == doctest::Approx(0.0));
    CHECK(s(1, 1) == doctest::Approx(-0.3));
    // x -> 2 x^T P A x has matrix P A + A^T P = 2 sym(P A).
    const EigenExtremes e = eigen_extremes(lyapunov_sum(p1, a1));
    CHECK(e.min == doctest::Approx(-3.0));
    CHECK(e.max == doctest::Approx(-0.6));
  }
  SUBCASE("trivial") {
    const EigenExtremes id = eigen_extremes(SymMatrix::identity(2));
    CHECK(id.min == 1.0);
    CHECK(id.max == 1.0);
    const EigenExtremes d = eigen_extremes(SymMatrix::diagonal({1.0, -1.0}));
    CHECK(d.min == -1.0);
    CHECK(d.max == 1.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(eigen_extremes(SymMatrix(0)), UsageError);
    CHECK_THROWS_AS(eigen_extremes(SymMatrix(9)), UsageError);
  }
}

TEST_CASE("eigen routine agrees with the characteristic polynomial oracle") {
  Rng rng(11);
  for (int k = 0; k < 500; ++k) {
    const SymMatrix s = random_sym(rng, 2);
    const oracle::M2 m{{{s(0, 0), s(0, 1)}, {s(1, 0), s(1, 1)}}};
    const auto ref = oracle::eig2(m);
    const EigenExtremes e = eigen_extremes(s);
    CHECK(e.min == doctest::Approx(ref[0]).epsilon(1e-12).scale(1.0));
    CHECK(e.max == doctest::Approx(ref[1]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("Jacobi eigenvalues: trace, Rayleigh bounds and diagonal cases") {
  Rng rng(12);
  for (std::size_t n = 3; n <= kMaxDim; ++n) {
    for (int k = 0; k < 20; ++k) {
      const SymMatrix s = random_sym(rng, n);
      const std::vector<double> ev = eigenvalues(s);
      REQUIRE(ev.size() == n);
      double trace = 0.0;
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) trace += s(i, i);
      for (double l : ev) sum += l;
      CHECK(sum == doctest::Approx(trace).scale(1.0).epsilon(1e-10));
      CHECK(std::is_sorted(ev.begin(), ev.end()));
      for (int r = 0; r < 20; ++r) {
        const Vec x = random_vec(rng, n);
        const double rq = QuadraticForm(s).value(x) / x.squared_norm();
        CHECK(rq >= ev.front() - 1e-10);
        CHECK(rq <= ev.back() + 1e-10);
      }
    }
  }
  const std::vector<double> d = eigenvalues(SymMatrix::diagonal({3.0, -1.0, 2.0}));
  CHECK(d[0] == doctest::Approx(-1.0));
  CHECK(d[1] == doctest::Approx(2.0));
  CHECK(d[2] == doctest::Approx(3.0));
}

TEST_CASE("symmetric storage") {
  CHECK_THROWS_AS(SymMatrix::from_rows({{1.0, 2.0}, {2.0000001, 1.0}}), UsageError);
  CHECK_THROWS_AS(SymMatrix::from_rows({{1.0, 2.0}}), UsageError);
  SymMatrix s(2);
  s.set(0, 1, 4.0);
  CHECK(s(1, 0) == 4.0);
  CHECK(SymMatrix::outer(Vec{1.0, 2.0}) == SymMatrix::from_rows({{1.0, 2.0}, {2.0, 4.0}}));
}

TEST_CASE("property: bilinear symmetry") {
  Rng rng(13);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 2 + k % 4;
    const SymMatrix s = random_sym(rng, n);
    const Vec x = random_vec(rng, n);
    const Vec y = random_vec(rng, n);
    CHECK(std::abs(s.bilinear(x, y) - s.bilinear(y, x)) <= 1e-12);
  }
}

TEST_CASE("property: homogeneity of quadratic forms") {
  Rng rng(14);
  for (int k = 0; k < 1000; ++k) {
    const QuadraticForm q(random_sym(rng, 2));
    const Vec x = random_vec(rng, 2);
    const double l = rng.uniform(-10.0, 10.0);
    const double lhs = q.value(l * x);
    const double rhs = l * l * q.value(x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("property: gradient matches central differences") {
  Rng rng(15);
  for (int k = 0; k < 500; ++k) {
    const QuadraticForm q(random_sym(rng, 2));
    const oracle::V2 x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const auto fd = oracle::fd_grad([&](const oracle::V2& y) { return q.value(Vec{y[0], y[1]}); }, x);
    const Vec g = q.grad(Vec{x[0], x[1]});
    CHECK(std::abs(g[0] - fd[0]) <= 1e-6);
    CHECK(std::abs(g[1] - fd[1]) <= 1e-6);
  }
}

TEST_CASE("region membership") {
  const SymMatrix q = SymMatrix::from_rows({{1.0, -5.0}, {-5.0, 0.0}});
  const Region c = Region::single(q, Sense::geq);
  CHECK(region_member(c, Vec{1.0, -1.0}, false));
  CHECK(region_member(c, Vec{1.0, -1.0}, true));
  CHECK(region_member(c, Vec{0.0, 1.0}, false));
  CHECK_FALSE(region_member(c, Vec{0.0, 1.0}, true));
  CHECK(region_member(Region::everything(), Vec{7.0, -3.0}, true));
  CHECK(region_member(Region::everything(), Vec{7.0, -3.0}, false));
}

TEST_CASE("property: conic membership is scale invariant") {
  Rng rng(16);
  for (int k = 0; k < 200; ++k) {
    std::vector<Constraint> cs;
    for (int m = 0; m < 1 + k % 3; ++m) cs.emplace_back(random_sym(rng, 2), k % 2 ? Sense::geq : Sense::leq);
    const Region r(cs);
    for (int p = 0; p < 20; ++p) {
      const Vec x = random_vec(rng, 2);
      const double l = std::exp(rng.uniform(-5.0, 5.0));
      CHECK(r.contains(x) == r.contains(l * x));
      CHECK(r.contains(x, true) == r.contains(l * x, true));
    }
  }
}

TEST_CASE("membership is the conjunction of the constraint tests") {
  Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    const Constraint a(random_sym(rng, 2), Sense::geq);
    const Constraint b = Constraint::affine(random_vec(rng, 2), rng.uniform(-1, 1), Sense::leq);
    const Region r({a, b});
    const Vec x = random_vec(rng, 2);
    CHECK(r.contains(x) == (a.holds(x, false) && b.holds(x, false)));
    CHECK(r.contains(x, true) == (a.holds(x, true) && b.holds(x, true)));
  }
}

TEST_CASE("regular-closed proxy") {
  const SymMatrix q = SymMatrix::from_rows({{1.0, -5.0}, {-5.0, 0.0}});
  CHECK(regular_closed_proxy(Region::single(q, Sense::geq)));
  CHECK_FALSE(regular_closed_proxy(Region::single(-SymMatrix::identity(2), Sense::geq)));
  CHECK(regular_closed_proxy(Region::single(SymMatrix::identity(2), Sense::geq)));
  CHECK_THROWS_AS(regular_closed_proxy(Region::single(q, Sense::gt)), UsageError);
}

TEST_CASE("sense parsing and affine constraints") {
  CHECK(parse_sense(">=") == Sense::geq);
  CHECK(parse_sense("lt") == Sense::lt);
  CHECK_THROWS_AS(parse_sense("=="), UsageError);
  const Constraint h = Constraint::affine(Vec{1.0, 0.0}, -2.0, Sense::geq);
  CHECK_FALSE(h.is_conic());
  CHECK(h.holds(Vec{2.5, 0.0}, true));
  CHECK(h.holds(Vec{2.0, 0.0}, false));
  CHECK_FALSE(h.holds(Vec{2.0, 0.0}, true));
}

TEST_CASE("circle arcs") {
  const CurveArc arc(Vec{1.0, 1.0}, std::sqrt(2.0), -M_PI / 4, 5 * M_PI / 4);
  const Vec p = arc.point(M_PI / 2);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(1.0 + std::sqrt(2.0)));
  CHECK(arc.relative_distance(Vec{2.0, 2.0}) == doctest::Approx(0.0).scale(1.0));
  CHECK(arc.parameter(Vec{2.0, 0.0}) == doctest::Approx(-M_PI / 4));
  const Region on({}, arc);
  CHECK(on.contains(Vec{2.0, 2.0}));
  CHECK(on.contains(Vec{0.0, 0.0}));
  CHECK_FALSE(on.contains(Vec{0.0, 0.0}, true));
  CHECK_FALSE(on.contains(Vec{1.0, 1.0 - std::sqrt(2.0)}));
}

TEST_CASE("set distance to the origin") {
  Rng rng(18);
  const SetDistance d;
  CHECK(d.is_origin());
  CHECK(d(Vec{0.0, 0.0}) == 0.0);
  for (int k = 0; k < 100; ++k) {
    const Vec x = random_vec(rng, 2);
    CHECK(d(x) >= 0.0);
    CHECK(d(x) == doctest::Approx(x.norm()));
  }
}
