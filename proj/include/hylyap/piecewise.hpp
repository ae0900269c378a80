#pragma once

// Piecewise-structured Lyapunov candidates: smooth pieces, max/min/mid lattice
// expressions, their flattening into (region, piece) lists, and the active /
// essentially active index sets that generate Clarke gradients.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "hylyap/geometry.hpp"
#include "hylyap/report.hpp"
#include "hylyap/rng.hpp"

namespace hylyap {

/// One continuously differentiable piece: x^T P x, <w,x>^2 or <a,x> + b.
class SmoothPiece {
 public:
  enum class Kind { quadratic, squared_linear, affine };

  static SmoothPiece quadratic(SymMatrix p);
  static SmoothPiece squared_linear(Vec w);
  static SmoothPiece affine(Vec a, double b);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::size_t dim() const;
  [[nodiscard]] double value(const Vec& x) const;
  [[nodiscard]] Vec grad(const Vec& x) const;

  /// True for quadratic and squared-linear pieces (degree-2 homogeneous).
  [[nodiscard]] bool is_homogeneous_quadratic() const { return kind_ != Kind::affine; }
  /// P for quadratic pieces, w w^T for squared-linear ones. Throws UsageError for affine.
  [[nodiscard]] SymMatrix quadratic_matrix() const;
  [[nodiscard]] SmoothPiece negated() const;

  [[nodiscard]] const SymMatrix& p() const { return p_; }
  [[nodiscard]] const Vec& w() const { return v_; }
  [[nodiscard]] const Vec& a() const { return v_; }
  [[nodiscard]] double b() const { return b_; }

  friend bool operator==(const SmoothPiece&, const SmoothPiece&) = default;

 private:
  Kind kind_ = Kind::quadratic;
  SymMatrix p_;
  Vec v_;
  double b_ = 0.0;
};

/// Expression tree over smooth pieces with max, min and mid nodes.
///
/// mid(a, b, c) is defined as max(min(a,b), min(b,c), min(a,c)).
class LatticeExpr {
 public:
  enum class Op { leaf, max, min, mid };

  static LatticeExpr leaf(SmoothPiece p);
  /// Throws UsageError when children is empty.
  static LatticeExpr max(std::vector<LatticeExpr> children);
  static LatticeExpr min(std::vector<LatticeExpr> children);
  static LatticeExpr mid(LatticeExpr a, LatticeExpr b, LatticeExpr c);

  [[nodiscard]] Op op() const { return op_; }
  [[nodiscard]] const SmoothPiece& piece() const { return *piece_; }
  [[nodiscard]] const std::vector<LatticeExpr>& children() const { return children_; }
  [[nodiscard]] std::size_t dim() const;

  [[nodiscard]] double eval(const Vec& x) const;
  /// -e, pushing the sign through the lattice operations.
  [[nodiscard]] LatticeExpr negated() const;
  /// Equivalent tree with mid nodes rewritten as max of pairwise mins.
  [[nodiscard]] LatticeExpr without_mid() const;

 private:
  Op op_ = Op::leaf;
  std::optional<SmoothPiece> piece_;
  std::vector<LatticeExpr> children_;
};

struct Piece {
  Region region;
  SmoothPiece fn;
};

/// Finitely many (region, smooth piece) pairs.
///
/// Construction does not check continuity; run continuity_check on boundary
/// samples to confirm that overlapping pieces agree.
class ProperPiecewiseFn {
 public:
  ProperPiecewiseFn() = default;
  /// Throws UsageError on empty input or inconsistent dimensions.
  explicit ProperPiecewiseFn(std::vector<Piece> pieces);
  static ProperPiecewiseFn single(SmoothPiece p);

  [[nodiscard]] const std::vector<Piece>& pieces() const { return pieces_; }
  [[nodiscard]] const Piece& piece(std::size_t i) const { return pieces_.at(i); }
  [[nodiscard]] std::size_t size() const { return pieces_.size(); }
  [[nodiscard]] std::size_t dim() const;

  /// All pieces degree-2 homogeneous and all regions conic.
  [[nodiscard]] bool homogeneous() const;

  struct Evaluation {
    double value;
    std::size_t index;
  };
  /// Value of the first piece whose region contains x in its interior, else of
  /// the first piece whose region contains x within tol. Throws DomainError
  /// when no region contains x.
  [[nodiscard]] Evaluation evaluate(const Vec& x, double tol = kMembershipSlack) const;
  [[nodiscard]] double operator()(const Vec& x) const { return evaluate(x).value; }

  [[nodiscard]] ProperPiecewiseFn negated() const;
  /// Same function with every region intersected with r.
  [[nodiscard]] ProperPiecewiseFn restricted(const Region& r) const;

 private:
  std::vector<Piece> pieces_;
};

/// Flattens a lattice of quadratic / squared-linear leaves into conic pieces by
/// iterated binary max/min: max(f, g) over pieces (X, f_i), (Y, g_k) yields
/// (X and Y and {f_i - g_k >= 0}, f_i) and (X and Y and {g_k - f_i >= 0}, g_k).
/// Throws UnsupportedExpression when an affine leaf is present.
ProperPiecewiseFn flatten(const LatticeExpr& expr);

/// Indices whose region contains x within tol and whose value matches f(x)
/// within tol (1 + |f(x)|). Throws InternalInconsistency if the set is empty.
std::set<std::size_t> active_indices(const ProperPiecewiseFn& f, const Vec& x,
                                     double tol = kMembershipSlack);

struct SamplingOptions {
  /// Ball radius; non-positive selects 1e-4 (1 + |x|).
  double radius = -1.0;
  std::size_t samples = 512;
  std::uint64_t seed = kDefaultSeed;
  /// Tolerance for the active-index filter at the base point.
  double tol = kMembershipSlack;
};

/// Monte-Carlo proxy for the essentially active indices: i is kept when some
/// sampled y in the ball around x lies in the interior of region i and every
/// region containing y carries the same smooth piece as i. The result is
/// intersected with active_indices(f, x). Throws UsageError if samples < 100.
std::set<std::size_t> essentially_active(const ProperPiecewiseFn& f, const Vec& x,
                                         const SamplingOptions& opts = {});

/// Vertex description of the Clarke generalized gradient at a point.
struct GradientPolytope {
  Vec base;
  std::vector<Vec> vertices;
  std::vector<std::size_t> pieces;  ///< piece index that produced each vertex

  /// Maximum of <v, f> over the hull, attained at a vertex.
  [[nodiscard]] double max_inner(const Vec& f) const;
};

/// co{grad V_i(x) : i essentially active}, duplicates removed to 1e-12.
GradientPolytope clarke_polytope(const ProperPiecewiseFn& f, const Vec& x,
                                 const SamplingOptions& opts = {});

/// Points on the boundary rays of every conic constraint (planar functions only):
/// boundary angles are located by scanning and bisection, then `count` points are
/// spread over those rays at radii in (0, max_radius].
std::vector<Vec> boundary_samples(const ProperPiecewiseFn& f, std::size_t count,
                                  double max_radius = 10.0);

/// Reports every point where two containing regions carry values differing by
/// more than tol (1 + |value|). params["max_value_ratio"] holds the largest
/// larger/smaller ratio of |values| among the reported disagreements.
CheckReport continuity_check(const ProperPiecewiseFn& f, std::span<const Vec> points,
                             double tol = 1e-9);

/// w with <w, u_k>^2 = V(u_k) and <w, u_k> > 0 for n linearly independent rays u_k.
Vec matching_squared_linear(const ProperPiecewiseFn& v, std::span<const Vec> rays);

}  // namespace hylyap
