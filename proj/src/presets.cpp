#include "hylyap/presets.hpp"

#include <cmath>
#include <numbers>

#include "hylyap/errors.hpp"

namespace hylyap::presets {

namespace {

constexpr double kPi = std::numbers::pi;

LatticeExpr quad_leaf(const SymMatrix& p) { return LatticeExpr::leaf(SmoothPiece::quadratic(p)); }

}  // namespace

// ---------------------------------------------------------------------------
// Flower. Mode 1 where x^T Q x > 0, mode 2 where x^T Q x < 0; both modes are
// stable foci but the Filippov hull slides outwards along x1 = x2.

Matrix flower_a1() { return Matrix::from_rows({{-0.3, -1.0}, {5.0, -0.3}}); }
Matrix flower_a2() { return Matrix::from_rows({{-0.3, 5.0}, {-1.0, -0.3}}); }
SymMatrix flower_q() { return SymMatrix::diagonal({1.0, -1.0}); }
/// Candidate pieces: x^T P1 x > x^T P2 x exactly where x^T Q x > 0.
SymMatrix flower_p1() { return SymMatrix::diagonal({5.0, 1.0}); }
SymMatrix flower_p2() { return SymMatrix::diagonal({1.0, 5.0}); }

HybridSystem flower_system() {
  return HybridSystem{Region::everything(), std::nullopt,
                      FlowMap::filippov2(flower_a1(), flower_a2(), flower_q()), JumpMap::identity()};
}

LatticeExpr flower_v_expr() { return LatticeExpr::max({quad_leaf(flower_p1()), quad_leaf(flower_p2())}); }
ProperPiecewiseFn flower_v() { return flatten(flower_v_expr()); }

std::vector<double> flower_locus_angles() { return {kPi / 4, 3 * kPi / 4, 5 * kPi / 4, 7 * kPi / 4}; }

// ---------------------------------------------------------------------------
// Circle. C is the arc (x1 - 1)^2 + (x2 - 1)^2 = 2 with x2 >= 0, i.e. the
// angles [-pi/4, 5pi/4] about (1, 1); f(x) = |x| (A x + b) rotates
// counter-clockwise about (1, 1) and vanishes only at the origin.

CurveArc circle_arc() { return CurveArc(Vec{1.0, 1.0}, std::sqrt(2.0), -kPi / 4, 5 * kPi / 4); }

HybridSystem circle_system() {
  const Matrix a = Matrix::from_rows({{0.0, -1.0}, {1.0, 0.0}});
  const Vec b{1.0, -1.0};
  return HybridSystem{Region({}, circle_arc()), std::nullopt, FlowMap::norm_scaled_affine(a, b),
                      JumpMap::identity()};
}

ProperPiecewiseFn circle_v() {
  // The middle piece is additionally restricted to x2 >= 1: on C the strip
  // 0 < x1 < 2 only meets the upper arc, and the restriction keeps the origin
  // with the first piece and (2, 0) with the last one.
  const Constraint x1_nonpos = Constraint::affine(Vec{-1.0, 0.0}, 0.0, Sense::geq);
  const Constraint x1_nonneg = Constraint::affine(Vec{1.0, 0.0}, 0.0, Sense::geq);
  const Constraint x1_le_2 = Constraint::affine(Vec{-1.0, 0.0}, 2.0, Sense::geq);
  const Constraint x1_ge_2 = Constraint::affine(Vec{1.0, 0.0}, -2.0, Sense::geq);
  const Constraint x2_ge_1 = Constraint::affine(Vec{0.0, 1.0}, -1.0, Sense::geq);
  return ProperPiecewiseFn({
      {Region({x1_nonpos}), SmoothPiece::affine(Vec{0.0, 1.0}, 0.0)},
      {Region({x1_nonneg, x1_le_2, x2_ge_1}), SmoothPiece::affine(Vec{1.0, 0.0}, 2.0)},
      {Region({x1_ge_2}), SmoothPiece::affine(Vec{0.0, -1.0}, 6.0)},
  });
}

std::vector<double> circle_exceptional_params() { return {3 * kPi / 4, kPi / 4, -kPi / 4}; }

SimConfig circle_sim_config() {
  SimConfig cfg;
  cfg.manifold_projection = circle_arc();
  return cfg;
}

// ---------------------------------------------------------------------------
// Clegg integrator. Flow x' = A_F x on C = {x^T Q x >= 0}, reset x+ = A_J x
// on D = {x^T Q x <= 0}, Q = [[1, -1/(2 eps)], [-1/(2 eps), 0]].

Matrix clegg_a_f() { return Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.0}}); }
Matrix clegg_a_j() { return Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}}); }

SymMatrix clegg_q(double eps) {
  if (!(eps > 0.0)) throw UsageError("regularization parameter must be positive");
  const double off = -1.0 / (2.0 * eps);
  return SymMatrix::from_rows({{1.0, off}, {off, 0.0}});
}

HybridSystem clegg_system(double eps) {
  const SymMatrix q = clegg_q(eps);
  return HybridSystem{Region::single(q, Sense::geq), Region::single(q, Sense::leq),
                      FlowMap::linear(clegg_a_f()), JumpMap::linear(clegg_a_j())};
}

/// Max of two sign-indefinite quadratics (the second matrix is not definite).
LatticeExpr clegg_vm_expr() {
  const SymMatrix p1 = SymMatrix::from_rows({{1.0, -0.1}, {-0.1, 0.5}});
  const SymMatrix p2 = SymMatrix::from_rows({{2.5, 1.4}, {1.4, 0.5}});
  return LatticeExpr::max({quad_leaf(p1), quad_leaf(p2)});
}

/// Median of three quadratics.
LatticeExpr clegg_vmid_expr() {
  const SymMatrix p1 = SymMatrix::from_rows({{1.0, 0.25}, {0.25, 0.7}});
  const SymMatrix p2 = SymMatrix::from_rows({{0.55, -0.2}, {-0.2, 0.25}});
  const SymMatrix p3 = SymMatrix::from_rows({{25.0 / 16.0, 49.0 / 160.0}, {49.0 / 160.0, 0.25}});
  return LatticeExpr::mid(quad_leaf(p1), quad_leaf(p2), quad_leaf(p3));
}

ProperPiecewiseFn clegg_vm() { return flatten(clegg_vm_expr()); }
ProperPiecewiseFn clegg_vmid() { return flatten(clegg_vmid_expr()); }

ProperPiecewiseFn clegg_vconv(const Vec& w, double eps) {
  if (w.size() != 2) throw UsageError("clegg_vconv: w must be planar");
  const SymMatrix q = clegg_q(eps);
  const Constraint in_c(q, Sense::geq);
  std::vector<Piece> pieces;
  const ProperPiecewiseFn vmid = clegg_vmid();
  for (const auto& p : vmid.pieces()) pieces.push_back({p.region.with(in_c), p.fn});
  pieces.push_back({Region::single(q, Sense::leq), SmoothPiece::squared_linear(w)});
  return ProperPiecewiseFn(std::move(pieces));
}

/// Printed to four decimals; it matches V_mid on the ray x1 = x2 / eps only.
Vec clegg_w_printed() { return Vec{0.9574, 0.7071}; }

std::vector<Vec> clegg_boundary_rays(double eps) {
  const Vec far{1.0 / eps, 1.0};
  return {Vec{0.0, 1.0}, (1.0 / far.norm()) * far};
}

Vec clegg_w_derived(double eps) {
  const std::vector<Vec> rays = clegg_boundary_rays(eps);
  return matching_squared_linear(clegg_vmid(), rays);
}

// ---------------------------------------------------------------------------
// Registry

std::vector<std::string> system_names() { return {"flower", "circle", "clegg-max", "clegg-mid", "clegg-conv"}; }

HybridSystem system_by_name(const std::string& name) {
  if (name == "flower") return flower_system();
  if (name == "circle") return circle_system();
  if (name == "clegg-max" || name == "clegg-mid" || name == "clegg-conv" || name == "clegg") {
    return clegg_system();
  }
  throw UsageError("unknown system preset '" + name + "'");
}

SimConfig sim_config_for(const std::string& system_name) {
  return system_name == "circle" ? circle_sim_config() : SimConfig{};
}

std::vector<std::string> lyapunov_names() {
  return {"VM", "Vmid", "Vconv", "Vconv-printed", "flower-V", "circle-V"};
}

ProperPiecewiseFn lyapunov_by_name(const std::string& name) {
  if (name == "VM") return clegg_vm();
  if (name == "Vmid") return clegg_vmid();
  if (name == "Vconv") return clegg_vconv(clegg_w_derived());
  if (name == "Vconv-printed") return clegg_vconv(clegg_w_printed());
  if (name == "flower-V") return flower_v();
  if (name == "circle-V") return circle_v();
  throw UsageError("unknown Lyapunov preset '" + name + "'");
}

std::string default_lyapunov(const std::string& system_name) {
  if (system_name == "flower") return "flower-V";
  if (system_name == "circle") return "circle-V";
  if (system_name == "clegg-max") return "VM";
  if (system_name == "clegg-mid") return "Vmid";
  if (system_name == "clegg-conv") return "Vconv";
  throw UsageError("no default Lyapunov candidate for '" + system_name + "'");
}

}  // namespace hylyap::presets
