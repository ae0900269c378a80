#pragma once

// Sampled certification of Lyapunov conditions: bounds, dense decrease on
// region interiors, homogeneous flow / jump implications on unit-circle grids,
// Clarke conditions at explicit points, and supporting demonstrations.

#include <optional>
#include <string>
#include <vector>

#include "hylyap/geometry.hpp"
#include "hylyap/hybrid.hpp"
#include "hylyap/piecewise.hpp"
#include "hylyap/report.hpp"
#include "hylyap/setvalued.hpp"

namespace hylyap {

/// Deterministic point source standing in for a dense subset.
class Sampler {
 public:
  enum class Kind { unit_circle, curve, ball, points };

  /// N equally spaced unit directions at angles 2 pi k / N, omitting every
  /// angle within `exclusion` (radians, modulo 2 pi) of an excluded angle.
  static Sampler unit_circle(std::size_t n, std::vector<double> excluded_angles = {},
                             double exclusion = 1e-6);
  /// N parameters spread evenly over [t_min, t_max] (endpoints included),
  /// omitting parameters within `exclusion` of an excluded one.
  static Sampler curve(CurveArc arc, std::size_t n, std::vector<double> excluded_params = {},
                       double exclusion = 1e-6);
  /// Tensor grid with `per_axis` nodes on [c - r, c + r]^n, kept when |x - c| <= r.
  static Sampler ball(Vec center, double radius, std::size_t per_axis);
  static Sampler explicit_points(std::vector<Vec> points);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::vector<Vec> points() const;
  /// Parameters echoed into reports.
  [[nodiscard]] nlohmann::ordered_json describe() const;

 private:
  Kind kind_ = Kind::points;
  std::size_t n_ = 0;
  std::vector<double> excluded_;
  double exclusion_ = 1e-6;
  std::optional<CurveArc> arc_;
  Vec center_;
  double radius_ = 0.0;
  std::vector<Vec> points_;
};

/// c s^p with c > 0, p > 0.
struct Monomial {
  double c = 1.0;
  double p = 2.0;

  [[nodiscard]] double operator()(double s) const { return c * std::pow(s, p); }
};

struct BoundsSpec {
  Monomial alpha1;
  Monomial alpha2;
};

/// Bounds alpha1(|x|_A) <= V(x) <= alpha2(|x|_A) on the sampled points.
///
/// Without a spec, V must be homogeneous and the origin the target: the points
/// are normalized to the unit sphere and lambda1 = min V, lambda2 = max V are
/// reported in params; the check passes iff lambda1 > margin. With a spec both
/// inequalities are tested pointwise up to rel_tol (1 + |V|). Points outside
/// V's domain are counterexamples. Throws UsageError on an empty sample.
CheckReport bounds_check(const ProperPiecewiseFn& v, const std::vector<Vec>& points,
                         const SetDistance& dist = {},
                         const std::optional<BoundsSpec>& spec = std::nullopt,
                         double margin = 1e-9, double rel_tol = 1e-9);

/// <grad V_i(x), f> <= -rho(|x|_A) at every sample in int(X_i) and int(C)
/// (strict membership with normalized slack delta_int), for every interior
/// piece i and every field selection at x. A violation exceeds
/// tol (1 + |grad V_i| |f|).
CheckReport dense_decrease_check(const ProperPiecewiseFn& v, const FlowMap& f, const Region& c,
                                 const std::vector<Vec>& points, const RateFn& rho,
                                 const SetDistance& dist = {}, double delta_int = 1e-9,
                                 double tol = 1e-12);

struct HomogeneousMargins {
  double delta_h = 1e-6;  ///< hypothesis slack
  double delta_c = 1e-8;  ///< conclusion margin
};

/// For unit directions u with u^T Q_F u > delta_h and every piece i whose
/// constraints all exceed delta_h at u: u^T (P_i A_F + A_F^T P_i) u <= -delta_c.
/// Planar checks also evaluate the directions where a hypothesis form meets
/// its threshold, so extrema on the edge of the admissible set are exact.
/// Throws UsageError unless V is homogeneous, HypothesisError if Q_F is
/// negative semidefinite.
CheckReport homogeneous_flow_check(const ProperPiecewiseFn& v, const Matrix& a_f,
                                   const SymMatrix& q_f, const std::vector<Vec>& directions,
                                   const HomogeneousMargins& m = {});

/// For unit directions u and ordered piece pairs (j, i) with u^T Q_J u >= -delta_h,
/// u in X_j and A_J u in X_i (constraint values >= -delta_h):
/// (A_J u)^T P_i (A_J u) - u^T P_j u <= -delta_c. Edge directions are added
/// as in the flow check.
CheckReport homogeneous_jump_check(const ProperPiecewiseFn& v, const Matrix& a_j,
                                   const SymMatrix& q_j, const std::vector<Vec>& directions,
                                   const HomogeneousMargins& m = {});

/// <v, f> + rho(|x|_A) over the Clarke polytope vertices and the field
/// selections at each point. One counterexample per violating (vertex, field).
CheckReport clarke_check(const ProperPiecewiseFn& v, const FlowMap& f,
                         const std::vector<Vec>& points, const RateFn& rho,
                         const SetDistance& dist = {}, const SamplingOptions& opts = {},
                         double tol = 1e-12);

struct InfeasibilityReport {
  std::vector<Vec> probes;
  std::vector<double> values;  ///< z^T (P A_F + A_F^T P) z per probe
  bool infeasible = false;     ///< some probe value >= 0
};

/// Shows that the quadratic candidate x^T P x cannot strictly decrease along
/// x' = A_F x at every probe. Throws UsageError on empty probes or mismatch.
InfeasibilityReport quadratic_infeasibility_demo(const Matrix& a_f, const std::vector<Vec>& probes,
                                                 const SymMatrix& p);

struct AeClarkeComparison {
  CheckReport dense;
  CheckReport clarke;
  /// False when the dense check passes but a Clarke vertex violates the bound,
  /// which cannot happen for continuous (inner semicontinuous) fields.
  bool consistent = true;
};

/// Runs the dense check on `open_points` and the Clarke check on
/// `boundary_points`, both against <v, f> <= -rho. Throws HypothesisError for
/// Filippov maps.
AeClarkeComparison ae_implies_clarke_compare(const ProperPiecewiseFn& v, const FlowMap& f,
                                             const Region& c, const std::vector<Vec>& open_points,
                                             const std::vector<Vec>& boundary_points,
                                             const RateFn& rho, const SamplingOptions& opts = {});

/// Oriented form Q with S = {x^T Q x >= 0} for a set given by one conic
/// constraint. Throws UsageError otherwise.
SymMatrix conic_form(const Region& s);

/// Unit directions of grid that lie in C or D, plus the normalized images
/// G(u) of the directions in D (zero images dropped).
std::vector<Vec> homogeneous_bounds_directions(const HybridSystem& sys,
                                               const std::vector<Vec>& grid);

/// Bounds, flow and jump checks of a homogeneous hybrid system with a
/// piecewise quadratic candidate on a unit-circle grid.
struct HomogeneousCertificate {
  CheckReport bounds;
  CheckReport flow;
  CheckReport jump;

  [[nodiscard]] bool ugas() const { return bounds.pass && flow.pass && jump.pass; }
};

/// Throws UsageError unless sys is homogeneous and V is piecewise quadratic.
HomogeneousCertificate certify_homogeneous(const HybridSystem& sys, const ProperPiecewiseFn& v,
                                           std::size_t grid_n = 3600,
                                           const HomogeneousMargins& m = {});

}  // namespace hylyap
