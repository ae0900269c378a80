#pragma once

// Level-set extraction by marching squares, SVG rendering and a
// midpoint-convexity test for sublevel sets of planar functions.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "hylyap/geometry.hpp"
#include "hylyap/piecewise.hpp"

namespace hylyap {

struct BBox {
  double x0 = -3.0;
  double y0 = -3.0;
  double x1 = 3.0;
  double y1 = 3.0;
};

struct Polyline {
  std::vector<std::array<double, 2>> points;
  bool closed = false;
};

/// Contours {f = level} of a planar function sampled on res x res cells.
/// Grid values that are not finite (e.g. outside the domain) mask their cells.
/// Saddle cells are resolved with the cell-center average. Output order is
/// canonical: polylines start at their first edge in row-major cell order.
std::vector<Polyline> marching_squares(const std::function<double(double, double)>& f, double level,
                                       const BBox& box, std::size_t res);

/// Planar V as a grid function, NaN where V is undefined.
std::function<double(double, double)> grid_function(const ProperPiecewiseFn& v);

struct ContourSet {
  double level = 0.0;
  std::vector<Polyline> lines;
};

struct Overlay {
  std::vector<std::array<double, 2>> points;
};

/// Deterministic SVG with one group per level and optional trajectory overlays.
std::string render_svg(const std::vector<ContourSet>& contours, const BBox& box,
                       const std::vector<Overlay>& overlays = {}, int size_px = 600);

struct ConvexityReport {
  double worst_value = 0.0;  ///< largest V at a chord midpoint
  bool convex = true;        ///< worst_value <= level (1 + tol)
  Vec worst_a;
  Vec worst_b;
  std::size_t chords = 0;
};

/// Places `directions` points on the boundary of {V <= level} (radial search)
/// and evaluates V at the midpoint of every chord between them. V must be
/// below the level at the origin and reach it within r_max along every ray;
/// otherwise throws DomainError.
ConvexityReport midpoint_convexity(const ProperPiecewiseFn& v, double level,
                                   std::size_t directions = 360, double r_max = 1e3,
                                   double tol = 1e-9);

}  // namespace hylyap
