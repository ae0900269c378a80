#include "hylyap/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "hylyap/errors.hpp"

namespace hylyap {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw UsageError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Vec

bool Vec::all_finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double d) { return std::isfinite(d); });
}

double Vec::squared_norm() const {
  double s = 0.0;
  for (double d : v_) s += d * d;
  return s;
}

double Vec::norm() const {
  // Scaled accumulation keeps |x| finite for states near the overflow threshold.
  double scale = 0.0;
  for (double d : v_) scale = std::max(scale, std::abs(d));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double d : v_) s += (d / scale) * (d / scale);
  return scale * std::sqrt(s);
}

Vec& Vec::operator+=(const Vec& o) {
  require_same(size(), o.size(), "Vec::operator+=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& o) {
  require_same(size(), o.size(), "Vec::operator-=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

Vec& Vec::operator*=(double s) {
  for (double& d : v_) d *= s;
  return *this;
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator-(Vec a) { return a *= -1.0; }
Vec operator*(double s, Vec a) { return a *= s; }
Vec operator*(Vec a, double s) { return a *= s; }

double dot(const Vec& a, const Vec& b) {
  require_same(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  require_same(a.size(), b.size(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Vec unit_direction(double angle) { return Vec{std::cos(angle), std::sin(angle)}; }

// ---------------------------------------------------------------------------
// Matrix

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) throw UsageError("matrix must have at least one row");
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw UsageError("matrix must be square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::vector<std::vector<double>> Matrix::rows() const {
  std::vector<std::vector<double>> r(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) r[i][j] = (*this)(i, j);
  return r;
}

bool Matrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](double d) { return std::isfinite(d); });
}

Vec operator*(const Matrix& m, const Vec& x) {
  require_same(m.dim(), x.size(), "Matrix * Vec");
  Vec y(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.dim(); ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same(a.dim(), b.dim(), "Matrix * Matrix");
  const std::size_t n = a.dim();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same(a.dim(), b.dim(), "Matrix + Matrix");
  Matrix c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-1.0) * b; }

Matrix operator*(double s, const Matrix& a) {
  Matrix c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) = s * a(i, j);
  return c;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  return from_matrix(Matrix::from_rows(rows));
}

SymMatrix SymMatrix::from_matrix(const Matrix& m) {
  SymMatrix s(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (m(i, j) != m(j, i)) {
        throw UsageError("matrix is not symmetric at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
      }
      s.set(i, j, m(i, j));
    }
  }
  return s;
}

SymMatrix SymMatrix::symmetric_part(const Matrix& m) {
  SymMatrix s(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j <= i; ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) s.set(i, i, 1.0);
  return s;
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> d) {
  SymMatrix s(d.size());
  std::size_t i = 0;
  for (double v : d) {
    s.set(i, i, v);
    ++i;
  }
  return s;
}

SymMatrix SymMatrix::outer(const Vec& w) {
  SymMatrix s(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) s.set(i, j, w[i] * w[j]);
  return s;
}

Matrix SymMatrix::to_matrix() const {
  Matrix m(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

std::vector<std::vector<double>> SymMatrix::rows() const { return to_matrix().rows(); }

bool SymMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](double d) { return d == 0.0; });
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double d : a_) m = std::max(m, std::abs(d));
  return m;
}

double SymMatrix::bilinear(const Vec& x, const Vec& y) const {
  require_same(n_, x.size(), "SymMatrix::bilinear");
  require_same(n_, y.size(), "SymMatrix::bilinear");
  // Diagonal terms plus symmetrized off-diagonal pairs: the sum is invariant
  // under swapping x and y term by term.
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    s += (*this)(i, i) * x[i] * y[i];
    for (std::size_t j = 0; j < i; ++j) s += (*this)(i, j) * (x[i] * y[j] + x[j] * y[i]);
  }
  return s;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  require_same(a.dim(), b.dim(), "SymMatrix + SymMatrix");
  SymMatrix c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j <= i; ++j) c.set(i, j, a(i, j) + b(i, j));
  return c;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  require_same(a.dim(), b.dim(), "SymMatrix - SymMatrix");
  SymMatrix c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j <= i; ++j) c.set(i, j, a(i, j) - b(i, j));
  return c;
}

SymMatrix operator-(const SymMatrix& a) { return -1.0 * a; }

SymMatrix operator*(double s, const SymMatrix& a) {
  SymMatrix c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j <= i; ++j) c.set(i, j, s * a(i, j));
  return c;
}

Vec operator*(const SymMatrix& s, const Vec& x) {
  require_same(s.dim(), x.size(), "SymMatrix * Vec");
  Vec y(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.dim(); ++j) acc += s(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

SymMatrix lyapunov_sum(const SymMatrix& p, const Matrix& a) {
  require_same(p.dim(), a.dim(), "lyapunov_sum");
  const Matrix pa = p.to_matrix() * a;
  SymMatrix s(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i)
    for (std::size_t j = 0; j <= i; ++j) s.set(i, j, pa(i, j) + pa(j, i));
  return s;
}

SymMatrix congruence(const SymMatrix& p, const Matrix& a) {
  require_same(p.dim(), a.dim(), "congruence");
  const Matrix m = a.transposed() * p.to_matrix() * a;
  return SymMatrix::symmetric_part(m);
}

// ---------------------------------------------------------------------------
// QuadraticForm

double QuadraticForm::value(const Vec& x) const {
  require_same(s_.dim(), x.size(), "quad_eval");
  return s_.bilinear(x, x);
}

Vec QuadraticForm::grad(const Vec& x) const {
  require_same(s_.dim(), x.size(), "quad_grad");
  return 2.0 * (s_ * x);
}

// ---------------------------------------------------------------------------
// Eigenvalues

std::vector<double> eigenvalues(const SymMatrix& s) {
  const std::size_t n = s.dim();
  if (n == 0 || n > kMaxDim) {
    throw UsageError("eigenvalues: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (n == 1) return {s(0, 0)};
  if (n == 2) {
    const auto e = eigen_extremes(s);
    return {e.min, e.max};
  }
  Matrix a = s.to_matrix();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += a(i, i) * a(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    }
    if (off == 0.0 || off <= 1e-34 * diag) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

EigenExtremes eigen_extremes(const SymMatrix& s) {
  const std::size_t n = s.dim();
  if (n == 0 || n > kMaxDim) {
    throw UsageError("eigen_extremes: dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (n == 1) return {s(0, 0), s(0, 0)};
  if (n == 2) {
    const double a = s(0, 0);
    const double b = s(1, 0);
    const double d = s(1, 1);
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), b);
    // Compute the eigenvalue of larger magnitude directly, the other through the
    // determinant, to avoid cancellation.
    const double big = mean >= 0.0 ? mean + radius : mean - radius;
    const double det = a * d - b * b;
    const double small = big != 0.0 ? det / big : 0.0;
    return {std::min(big, small), std::max(big, small)};
  }
  const auto ev = eigenvalues(s);
  return {ev.front(), ev.back()};
}

// ---------------------------------------------------------------------------
// Constraints and regions

std::string to_string(Sense s) {
  switch (s) {
    case Sense::geq:
      return "geq";
    case Sense::gt:
      return "gt";
    case Sense::leq:
      return "leq";
    case Sense::lt:
      return "lt";
  }
  return "geq";
}

Sense parse_sense(const std::string& s) {
  if (s == "geq" || s == ">=") return Sense::geq;
  if (s == "gt" || s == ">") return Sense::gt;
  if (s == "leq" || s == "<=") return Sense::leq;
  if (s == "lt" || s == "<") return Sense::lt;
  throw UsageError("unknown constraint sense '" + s + "'");
}

Constraint::Constraint(SymMatrix r, Vec q, double c, Sense sense)
    : r_(std::move(r)), q_(std::move(q)), c_(c), sense_(sense) {
  require_same(r_.dim(), q_.size(), "Constraint");
}

Constraint Constraint::affine(Vec a, double c, Sense sense) {
  SymMatrix zero(a.size());
  return Constraint(std::move(zero), std::move(a), c, sense);
}

bool Constraint::is_conic() const {
  return c_ == 0.0 && std::all_of(q_.begin(), q_.end(), [](double d) { return d == 0.0; });
}

double Constraint::raw(const Vec& x) const {
  require_same(dim(), x.size(), "Constraint");
  return r_.bilinear(x, x) + dot(q_, x) + c_;
}

double Constraint::margin(const Vec& x) const {
  const double g = raw(x);
  const double sq = x.squared_norm();
  double normalized = 0.0;
  if (is_conic()) {
    normalized = sq > 0.0 ? g / sq : 0.0;
  } else {
    normalized = g / (1.0 + sq);
  }
  return (sense_ == Sense::geq || sense_ == Sense::gt) ? normalized : -normalized;
}

bool Constraint::holds(const Vec& x, bool interior, double tol) const {
  const double m = margin(x);
  if (interior || is_strict()) return m > tol;
  return m >= -tol;
}

Constraint Constraint::oriented() const {
  if (sense_ == Sense::geq || sense_ == Sense::gt) return *this;
  return Constraint(-r_, -q_, -c_, sense_ == Sense::leq ? Sense::geq : Sense::gt);
}

CurveArc::CurveArc(Vec center, double radius, double t_min, double t_max)
    : center_(std::move(center)), radius_(radius), t_min_(t_min), t_max_(t_max) {
  if (center_.size() != 2) throw UsageError("curve arcs are planar");
  if (!(radius_ > 0.0) || !(t_max_ > t_min_)) throw UsageError("invalid curve arc");
}

Vec CurveArc::point(double t) const {
  return Vec{center_[0] + radius_ * std::cos(t), center_[1] + radius_ * std::sin(t)};
}

double CurveArc::parameter(const Vec& x) const {
  require_same(2, x.size(), "CurveArc");
  const double raw_t = std::atan2(x[1] - center_[1], x[0] - center_[0]);
  const double mid = 0.5 * (t_min_ + t_max_);
  const double two_pi = 2.0 * std::numbers::pi;
  const double k = std::round((mid - raw_t) / two_pi);
  return raw_t + k * two_pi;
}

Vec CurveArc::project(const Vec& x) const {
  const Vec d = x - center_;
  const double r = d.norm();
  if (r == 0.0) return point(t_min_);
  return center_ + (radius_ / r) * d;
}

double CurveArc::relative_distance(const Vec& x) const {
  return std::abs((x - center_).norm() - radius_) / radius_;
}

double CurveArc::parameter_margin(const Vec& x) const {
  const double t = parameter(x);
  return std::min(t - t_min_, t_max_ - t);
}

bool Region::is_conic() const {
  return !curve_ && std::all_of(constraints_.begin(), constraints_.end(),
                                [](const Constraint& c) { return c.is_conic(); });
}

bool Region::has_strict_constraint() const {
  return std::any_of(constraints_.begin(), constraints_.end(),
                     [](const Constraint& c) { return c.is_strict(); });
}

bool Region::contains(const Vec& x, bool interior, double tol) const {
  for (const auto& c : constraints_) {
    if (!c.holds(x, interior, tol)) return false;
  }
  if (curve_) {
    if (curve_->relative_distance(x) > tol) return false;
    const double m = curve_->parameter_margin(x);
    if (interior ? !(m > tol) : m < -tol) return false;
  }
  return true;
}

double Region::min_margin(const Vec& x) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : constraints_) m = std::min(m, c.margin(x));
  return m;
}

Region Region::intersect(const Region& other) const {
  if (curve_ && other.curve_ && !(*curve_ == *other.curve_)) {
    throw UsageError("cannot intersect regions carrying different curves");
  }
  std::vector<Constraint> cs = constraints_;
  cs.insert(cs.end(), other.constraints_.begin(), other.constraints_.end());
  return Region(std::move(cs), curve_ ? curve_ : other.curve_);
}

Region Region::with(Constraint c) const {
  Region r = *this;
  r.constraints_.push_back(std::move(c));
  return r;
}

bool region_member(const Region& r, const Vec& x, bool strict, double tol) {
  return r.contains(x, strict, tol);
}

bool regular_closed_proxy(const Region& r) {
  if (r.has_strict_constraint()) {
    throw UsageError("regular_closed_proxy expects non-strict constraints only");
  }
  if (r.curve()) return false;
  for (const auto& raw : r.constraints()) {
    const Constraint c = raw.oriented();
    if (c.dim() == 0) continue;
    if (!c.is_conic()) {
      const bool has_linear = std::any_of(c.linear().begin(), c.linear().end(),
                                          [](double d) { return d != 0.0; });
      if (has_linear || c.constant() > 0.0) continue;
    }
    if (!(eigen_extremes(c.form()).max > 0.0)) return false;
  }
  return true;
}

}  // namespace hylyap
