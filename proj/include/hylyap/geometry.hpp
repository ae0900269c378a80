#pragma once

// Dense low-dimensional primitives: vectors, matrices, quadratic forms,
// quadratic constraints and regions built from them.

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hylyap {

/// Largest state dimension supported by the dense routines.
inline constexpr std::size_t kMaxDim = 8;

/// Default slack used by non-strict membership tests (normalized units).
inline constexpr double kMembershipSlack = 1e-9;

/// State vector in R^n.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0) : v_(n, fill) {}
  Vec(std::initializer_list<double> init) : v_(init) {}
  explicit Vec(std::vector<double> values) : v_(std::move(values)) {}

  [[nodiscard]] std::size_t size() const { return v_.size(); }
  [[nodiscard]] bool empty() const { return v_.empty(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  [[nodiscard]] auto begin() const { return v_.begin(); }
  [[nodiscard]] auto end() const { return v_.end(); }
  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }

  [[nodiscard]] const std::vector<double>& values() const { return v_; }
  [[nodiscard]] std::span<const double> span() const { return v_; }

  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] double norm() const;
  [[nodiscard]] double squared_norm() const;

  Vec& operator+=(const Vec& o);
  Vec& operator-=(const Vec& o);
  Vec& operator*=(double s);

  friend bool operator==(const Vec&, const Vec&) = default;

 private:
  std::vector<double> v_;
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator-(Vec a);
Vec operator*(double s, Vec a);
Vec operator*(Vec a, double s);
double dot(const Vec& a, const Vec& b);
double max_abs_diff(const Vec& a, const Vec& b);

/// Square real matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}
  /// Throws UsageError on ragged or non-square input.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix identity(std::size_t n);

  [[nodiscard]] std::size_t dim() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  [[nodiscard]] Matrix transposed() const;
  [[nodiscard]] std::vector<std::vector<double>> rows() const;
  [[nodiscard]] bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

Vec operator*(const Matrix& m, const Vec& x);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// Symmetric matrix in packed lower-triangular storage, so a(i,j) == a(j,i) exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), a_(n * (n + 1) / 2, 0.0) {}

  /// Throws UsageError unless rows are square and exactly symmetric.
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);
  /// Throws UsageError unless m is exactly symmetric.
  static SymMatrix from_matrix(const Matrix& m);
  /// (m + m^T) / 2.
  static SymMatrix symmetric_part(const Matrix& m);
  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::initializer_list<double> d);
  /// w w^T.
  static SymMatrix outer(const Vec& w);

  [[nodiscard]] std::size_t dim() const { return n_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
    return i >= j ? a_[i * (i + 1) / 2 + j] : a_[j * (j + 1) / 2 + i];
  }
  void set(std::size_t i, std::size_t j, double v) {
    (i >= j ? a_[i * (i + 1) / 2 + j] : a_[j * (j + 1) / 2 + i]) = v;
  }

  [[nodiscard]] Matrix to_matrix() const;
  [[nodiscard]] std::vector<std::vector<double>> rows() const;
  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] double max_abs() const;

  /// x^T S y, accumulated symmetrically.
  [[nodiscard]] double bilinear(const Vec& x, const Vec& y) const;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a);
SymMatrix operator*(double s, const SymMatrix& a);
Vec operator*(const SymMatrix& s, const Vec& x);

/// P A + A^T P, the matrix of x -> 2 x^T P A x.
SymMatrix lyapunov_sum(const SymMatrix& p, const Matrix& a);
/// A^T P A.
SymMatrix congruence(const SymMatrix& p, const Matrix& a);

/// x -> x^T S x.
class QuadraticForm {
 public:
  QuadraticForm() = default;
  explicit QuadraticForm(SymMatrix s) : s_(std::move(s)) {}

  [[nodiscard]] const SymMatrix& matrix() const { return s_; }
  [[nodiscard]] std::size_t dim() const { return s_.dim(); }

  /// Throws UsageError on dimension mismatch.
  [[nodiscard]] double value(const Vec& x) const;
  /// 2 S x. Throws UsageError on dimension mismatch.
  [[nodiscard]] Vec grad(const Vec& x) const;

  friend bool operator==(const QuadraticForm&, const QuadraticForm&) = default;

 private:
  SymMatrix s_;
};

struct EigenExtremes {
  double min;
  double max;
};

/// Smallest and largest eigenvalue. Closed form for n <= 2, cyclic Jacobi otherwise.
/// Throws UsageError if n == 0 or n > kMaxDim.
EigenExtremes eigen_extremes(const SymMatrix& s);
/// All eigenvalues in ascending order (cyclic Jacobi).
std::vector<double> eigenvalues(const SymMatrix& s);

enum class Sense { geq, gt, leq, lt };

std::string to_string(Sense s);
/// Accepts "geq", "gt", "leq", "lt" and ">=", ">", "<=", "<". Throws UsageError otherwise.
Sense parse_sense(const std::string& s);

/// Sign test on g(x) = x^T R x + q^T x + c. Conic when q and c vanish.
///
/// Values are normalized before comparison against tolerances: conic constraints
/// divide by |x|^2 (scale invariant), the others by 1 + |x|^2.
class Constraint {
 public:
  Constraint() = default;
  Constraint(SymMatrix r, Sense sense) : r_(std::move(r)), q_(r_.dim(), 0.0), sense_(sense) {}
  Constraint(SymMatrix r, Vec q, double c, Sense sense);

  /// Half space a^T x + c (sense) 0.
  static Constraint affine(Vec a, double c, Sense sense);

  [[nodiscard]] const SymMatrix& form() const { return r_; }
  [[nodiscard]] const Vec& linear() const { return q_; }
  [[nodiscard]] double constant() const { return c_; }
  [[nodiscard]] Sense sense() const { return sense_; }
  [[nodiscard]] std::size_t dim() const { return r_.dim(); }
  [[nodiscard]] bool is_conic() const;
  [[nodiscard]] bool is_strict() const { return sense_ == Sense::gt || sense_ == Sense::lt; }

  [[nodiscard]] double raw(const Vec& x) const;
  /// Normalized value oriented so that satisfaction means margin >= 0 (or > 0 when strict).
  [[nodiscard]] double margin(const Vec& x) const;
  /// Non-strict test margin >= -tol; strict sense or interior mode test margin > tol.
  [[nodiscard]] bool holds(const Vec& x, bool interior, double tol = kMembershipSlack) const;
  /// Same set with the orientation folded into the form: geq/gt variants only.
  [[nodiscard]] Constraint oriented() const;

  friend bool operator==(const Constraint&, const Constraint&) = default;

 private:
  SymMatrix r_;
  Vec q_;
  double c_ = 0.0;
  Sense sense_ = Sense::geq;
};

/// Circle arc {center + radius (cos t, sin t) : t in [t_min, t_max]} in the plane.
class CurveArc {
 public:
  CurveArc() = default;
  CurveArc(Vec center, double radius, double t_min, double t_max);

  [[nodiscard]] const Vec& center() const { return center_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] double t_min() const { return t_min_; }
  [[nodiscard]] double t_max() const { return t_max_; }

  [[nodiscard]] Vec point(double t) const;
  /// Parameter of the nearest point on the full circle, unwrapped towards the arc interval.
  [[nodiscard]] double parameter(const Vec& x) const;
  /// Nearest point on the full circle (center itself maps to point(t_min)).
  [[nodiscard]] Vec project(const Vec& x) const;
  /// Distance to the full circle, relative to the radius.
  [[nodiscard]] double relative_distance(const Vec& x) const;
  /// Parameter margin min(t - t_min, t_max - t) in radians.
  [[nodiscard]] double parameter_margin(const Vec& x) const;

  friend bool operator==(const CurveArc&, const CurveArc&) = default;

 private:
  Vec center_;
  double radius_ = 1.0;
  double t_min_ = 0.0;
  double t_max_ = 0.0;
};

/// Conjunction of constraints, optionally intersected with a curve.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Constraint> constraints, std::optional<CurveArc> curve = std::nullopt)
      : constraints_(std::move(constraints)), curve_(std::move(curve)) {}
  static Region everything() { return Region{}; }
  static Region single(SymMatrix r, Sense sense) { return Region({Constraint(std::move(r), sense)}); }

  [[nodiscard]] const std::vector<Constraint>& constraints() const { return constraints_; }
  [[nodiscard]] const std::optional<CurveArc>& curve() const { return curve_; }
  [[nodiscard]] bool is_conic() const;
  [[nodiscard]] bool has_strict_constraint() const;

  /// Conjunction of the sign tests; interior mode requires strict satisfaction
  /// by tol. A curve is tested relative to itself: on the circle within tol and,
  /// in interior mode, strictly inside the parameter interval.
  [[nodiscard]] bool contains(const Vec& x, bool interior = false, double tol = kMembershipSlack) const;
  /// Smallest oriented margin over all constraints (+inf if there are none).
  [[nodiscard]] double min_margin(const Vec& x) const;

  [[nodiscard]] Region intersect(const Region& other) const;
  [[nodiscard]] Region with(Constraint c) const;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<Constraint> constraints_;
  std::optional<CurveArc> curve_;
};

/// Free-function form of Region::contains.
bool region_member(const Region& r, const Vec& x, bool strict, double tol = kMembershipSlack);

/// Sufficient test for a nonempty interior of every factor: each constraint form,
/// oriented by its sense, has a strictly positive eigenvalue (or a nonzero linear
/// part). A proxy, not an exact regular-closedness test. Curves have no interior.
/// Throws UsageError when a strict constraint is present.
bool regular_closed_proxy(const Region& r);

/// Euclidean distance to a closed target set.
class SetDistance {
 public:
  /// Distance to the origin.
  SetDistance() = default;
  SetDistance(std::string name, std::function<double(const Vec&)> evaluator)
      : name_(std::move(name)), eval_(std::move(evaluator)) {}

  [[nodiscard]] double operator()(const Vec& x) const { return eval_ ? eval_(x) : x.norm(); }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] bool is_origin() const { return !eval_; }

 private:
  std::string name_ = "origin";
  std::function<double(const Vec&)> eval_;
};

/// Unit vector (cos t, sin t).
Vec unit_direction(double angle);

}  // namespace hylyap
