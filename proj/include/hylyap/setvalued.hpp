#pragma once

// Flow maps x' in F(x): linear fields, the norm-scaled affine field
// f(x) = |x| (A x + b), and two-mode Filippov regularizations switching on the
// sign of x^T Q x.

#include <vector>

#include "hylyap/geometry.hpp"

namespace hylyap {

class FlowMap {
 public:
  enum class Kind { linear, norm_scaled_affine, filippov2 };

  static FlowMap linear(Matrix a);
  static FlowMap norm_scaled_affine(Matrix a, Vec b);
  /// Mode 1 (A1) where x^T Q x > 0, mode 2 (A2) where x^T Q x < 0.
  static FlowMap filippov2(Matrix a1, Matrix a2, SymMatrix q);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::size_t dim() const { return a_.dim(); }
  /// Single-valued and continuous (linear and norm-scaled affine variants).
  [[nodiscard]] bool is_continuous() const { return kind_ != Kind::filippov2; }
  /// True when the whole map commutes with positive scaling (f(l x) = l f(x)).
  [[nodiscard]] bool is_homogeneous() const { return kind_ != Kind::norm_scaled_affine; }

  [[nodiscard]] const Matrix& a() const { return a_; }
  [[nodiscard]] const Matrix& a2() const { return a2_; }
  [[nodiscard]] const Vec& b() const { return b_; }
  [[nodiscard]] const SymMatrix& q() const { return q_; }

  /// Switching function x^T Q x (Filippov only).
  [[nodiscard]] double switching(const Vec& x) const;
  /// Field of a fixed Filippov mode (1 or 2).
  [[nodiscard]] Vec mode_field(int mode, const Vec& x) const;

  /// The unique field value. For Filippov maps x must be off the switching
  /// locus (|x^T Q x| > locus_tol |x|^2); otherwise throws UsageError and the
  /// caller should use sliding_resolve. x = 0 returns 0.
  [[nodiscard]] Vec eval(const Vec& x, double locus_tol = 1e-12) const;

  /// Extreme points of F(x): the single value for continuous maps, the mode
  /// field off the locus, and both mode fields on the locus (F(x) is their hull).
  [[nodiscard]] std::vector<Vec> selections(const Vec& x, double locus_tol = 1e-9) const;

 private:
  Kind kind_ = Kind::linear;
  Matrix a_;
  Matrix a2_;
  Vec b_;
  SymMatrix q_;
};

struct SlidingInfo {
  bool on_surface = false;
  double lambda = 0.0;  ///< weight of mode 1
  Vec field;
  Vec surface_normal;  ///< 2 Q x
};

/// Classifies a locus point of a Filippov map. With n = 2 Q x, a = <n, A1 x>,
/// b = <n, A2 x>: a < 0 < b is an attractive surface, sliding with
/// lambda = b / (b - a); a and b of equal sign is a transversal crossing that
/// takes the destination mode's field (lambda 1 or 0).
///
/// Throws UsageError if F is not Filippov or x is off the locus by more than
/// locus_tol |x|^2, SingularPoint when 2 Q x = 0, and AmbiguousSliding when
/// the surface is repulsive or grazing (|a| or |b| within margin |x|^2).
SlidingInfo sliding_resolve(const FlowMap& f, const Vec& x, double locus_tol = 1e-6,
                            double margin = 1e-9);

/// Sliding field for a Filippov map evaluated at an arbitrary point near the
/// locus (used by the integrator between projections).
Vec sliding_field(const FlowMap& f, const Vec& x);

/// Newton projection of x onto {x^T Q x = 0} along 2 Q x.
Vec project_to_locus(const FlowMap& f, const Vec& x);

}  // namespace hylyap
