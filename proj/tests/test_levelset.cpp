#include <doctest.h>

#include <cmath>

#include "hylyap/errors.hpp"
#include "hylyap/levelset.hpp"
#include "hylyap/presets.hpp"

using namespace hylyap;

namespace {

ProperPiecewiseFn identity_v() { return ProperPiecewiseFn::single(SmoothPiece::quadratic(SymMatrix::identity(2))); }

}  // namespace

TEST_CASE("unit circle as the level 1 set of |x|^2") {
  const BBox box{-2, -2, 2, 2};
  const auto lines = marching_squares(grid_function(identity_v()), 1.0, box, 200);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].closed);
  const double cell = 4.0 / 200;
  for (const auto& p : lines[0].points) {
    CHECK(std::abs(std::hypot(p[0], p[1]) - 1.0) <= cell * cell);
  }
}

TEST_CASE("empty, open and masked contours") {
  const BBox box{-1, -1, 1, 1};
  CHECK(marching_squares(grid_function(identity_v()), 100.0, box, 50).empty());
  // The level-1 circle of radius 1 leaves a box of half-width 0.8 through its sides.
  const auto open = marching_squares(grid_function(identity_v()), 1.0, BBox{-0.8, -0.8, 0.8, 0.8}, 80);
  REQUIRE_FALSE(open.empty());
  for (const auto& l : open) CHECK_FALSE(l.closed);
  // Outside the domain of V the grid is NaN and no segment is produced there.
  const ProperPiecewiseFn half({{Region({Constraint::affine(Vec{1.0, 0.0}, 0.0, Sense::geq)}),
                                 SmoothPiece::quadratic(SymMatrix::identity(2))}});
  for (const auto& l : marching_squares(grid_function(half), 1.0, BBox{-2, -2, 2, 2}, 100)) {
    for (const auto& p : l.points) CHECK(p[0] >= -1e-12);
  }
  CHECK_THROWS_AS(marching_squares(grid_function(identity_v()), 1.0, box, 0), UsageError);
}

TEST_CASE("SVG output is deterministic") {
  const ProperPiecewiseFn vm = presets::clegg_vm();
  const BBox box;
  auto render = [&] {
    return render_svg({{1.0, marching_squares(grid_function(vm), 1.0, box, 120)}}, box,
                      {Overlay{{{0.0, 0.0}, {1.0, 1.0}}}});
  };
  const std::string a = render();
  CHECK(a == render());
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("<polygon") != std::string::npos);
  CHECK(a.find("<polyline") != std::string::npos);
}

TEST_CASE("midpoint convexity of level sets") {
  const ConvexityReport circle = midpoint_convexity(identity_v(), 1.0);
  CHECK(circle.convex);
  CHECK(circle.worst_value <= 1.0 + 1e-9);

  const ConvexityReport vm = midpoint_convexity(presets::clegg_vm(), 1.0);
  CHECK_FALSE(vm.convex);
  CHECK(vm.worst_value > 1.0);
  CHECK(presets::clegg_vm()(0.5 * (vm.worst_a + vm.worst_b)) == doctest::Approx(vm.worst_value));

  CHECK_FALSE(midpoint_convexity(presets::clegg_vmid(), 1.0).convex);

  const ConvexityReport conv = midpoint_convexity(presets::clegg_vconv(presets::clegg_w_derived()), 1.0);
  CHECK(conv.convex);
  CHECK(conv.chords > 0);

  // Unbounded sublevel sets are rejected.
  const ProperPiecewiseFn flat = ProperPiecewiseFn::single(SmoothPiece::squared_linear(Vec{1.0, 0.0}));
  CHECK_THROWS_AS(midpoint_convexity(flat, 1.0), DomainError);
}
