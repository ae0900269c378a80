#include "hylyap/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hylyap/errors.hpp"

namespace hylyap {

// ---------------------------------------------------------------------------
// SmoothPiece

SmoothPiece SmoothPiece::quadratic(SymMatrix p) {
  SmoothPiece s;
  s.kind_ = Kind::quadratic;
  s.p_ = std::move(p);
  return s;
}

SmoothPiece SmoothPiece::squared_linear(Vec w) {
  SmoothPiece s;
  s.kind_ = Kind::squared_linear;
  s.v_ = std::move(w);
  return s;
}

SmoothPiece SmoothPiece::affine(Vec a, double b) {
  SmoothPiece s;
  s.kind_ = Kind::affine;
  s.v_ = std::move(a);
  s.b_ = b;
  return s;
}

std::size_t SmoothPiece::dim() const { return kind_ == Kind::quadratic ? p_.dim() : v_.size(); }

double SmoothPiece::value(const Vec& x) const {
  switch (kind_) {
    case Kind::quadratic:
      return QuadraticForm(p_).value(x);
    case Kind::squared_linear: {
      const double s = dot(v_, x);
      return s * s;
    }
    case Kind::affine:
      return dot(v_, x) + b_;
  }
  return 0.0;
}

Vec SmoothPiece::grad(const Vec& x) const {
  switch (kind_) {
    case Kind::quadratic:
      return QuadraticForm(p_).grad(x);
    case Kind::squared_linear:
      return (2.0 * dot(v_, x)) * v_;
    case Kind::affine:
      if (x.size() != v_.size()) throw UsageError("affine piece: dimension mismatch");
      return v_;
  }
  return {};
}

SymMatrix SmoothPiece::quadratic_matrix() const {
  switch (kind_) {
    case Kind::quadratic:
      return p_;
    case Kind::squared_linear:
      return SymMatrix::outer(v_);
    case Kind::affine:
      break;
  }
  throw UsageError("affine piece has no quadratic matrix");
}

SmoothPiece SmoothPiece::negated() const {
  switch (kind_) {
    case Kind::quadratic:
      return quadratic(-p_);
    case Kind::squared_linear:
      return quadratic(-SymMatrix::outer(v_));
    case Kind::affine:
      return affine(-v_, -b_);
  }
  return *this;
}

// ---------------------------------------------------------------------------
// LatticeExpr

LatticeExpr LatticeExpr::leaf(SmoothPiece p) {
  LatticeExpr e;
  e.op_ = Op::leaf;
  e.piece_ = std::move(p);
  return e;
}

LatticeExpr LatticeExpr::max(std::vector<LatticeExpr> children) {
  if (children.empty()) throw UsageError("max needs at least one argument");
  LatticeExpr e;
  e.op_ = Op::max;
  e.children_ = std::move(children);
  return e;
}

LatticeExpr LatticeExpr::min(std::vector<LatticeExpr> children) {
  if (children.empty()) throw UsageError("min needs at least one argument");
  LatticeExpr e;
  e.op_ = Op::min;
  e.children_ = std::move(children);
  return e;
}

LatticeExpr LatticeExpr::mid(LatticeExpr a, LatticeExpr b, LatticeExpr c) {
  LatticeExpr e;
  e.op_ = Op::mid;
  e.children_ = {std::move(a), std::move(b), std::move(c)};
  return e;
}

std::size_t LatticeExpr::dim() const {
  return op_ == Op::leaf ? piece_->dim() : children_.front().dim();
}

double LatticeExpr::eval(const Vec& x) const {
  switch (op_) {
    case Op::leaf:
      return piece_->value(x);
    case Op::max: {
      double m = children_.front().eval(x);
      for (std::size_t i = 1; i < children_.size(); ++i) m = std::max(m, children_[i].eval(x));
      return m;
    }
    case Op::min: {
      double m = children_.front().eval(x);
      for (std::size_t i = 1; i < children_.size(); ++i) m = std::min(m, children_[i].eval(x));
      return m;
    }
    case Op::mid: {
      const double a = children_[0].eval(x);
      const double b = children_[1].eval(x);
      const double c = children_[2].eval(x);
      return std::max({std::min(a, b), std::min(b, c), std::min(a, c)});
    }
  }
  return 0.0;
}

LatticeExpr LatticeExpr::negated() const {
  switch (op_) {
    case Op::leaf:
      return leaf(piece_->negated());
    case Op::mid:
      return mid(children_[0].negated(), children_[1].negated(), children_[2].negated());
    case Op::max:
    case Op::min: {
      std::vector<LatticeExpr> neg;
      neg.reserve(children_.size());
      for (const auto& c : children_) neg.push_back(c.negated());
      return op_ == Op::max ? min(std::move(neg)) : max(std::move(neg));
    }
  }
  return *this;
}

LatticeExpr LatticeExpr::without_mid() const {
  if (op_ == Op::leaf) return *this;
  std::vector<LatticeExpr> kids;
  kids.reserve(children_.size());
  for (const auto& c : children_) kids.push_back(c.without_mid());
  if (op_ == Op::mid) {
    return max({min({kids[0], kids[1]}), min({kids[1], kids[2]}), min({kids[0], kids[2]})});
  }
  return op_ == Op::max ? max(std::move(kids)) : min(std::move(kids));
}

// ---------------------------------------------------------------------------
// ProperPiecewiseFn

ProperPiecewiseFn::ProperPiecewiseFn(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw UsageError("piecewise function needs at least one piece");
  const std::size_t n = pieces_.front().fn.dim();
  for (const auto& p : pieces_) {
    if (p.fn.dim() != n) throw UsageError("pieces have inconsistent dimensions");
    for (const auto& c : p.region.constraints()) {
      if (c.dim() != n) throw UsageError("region constraint dimension does not match its piece");
    }
  }
}

ProperPiecewiseFn ProperPiecewiseFn::single(SmoothPiece p) {
  return ProperPiecewiseFn({Piece{Region::everything(), std::move(p)}});
}

std::size_t ProperPiecewiseFn::dim() const {
  return pieces_.empty() ? 0 : pieces_.front().fn.dim();
}

bool ProperPiecewiseFn::homogeneous() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) {
    return p.fn.is_homogeneous_quadratic() && p.region.is_conic();
  });
}

ProperPiecewiseFn::Evaluation ProperPiecewiseFn::evaluate(const Vec& x, double tol) const {
  if (x.size() != dim()) throw UsageError("piecewise eval: dimension mismatch");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (pieces_[i].region.contains(x, true, 0.0)) return {pieces_[i].fn.value(x), i};
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (pieces_[i].region.contains(x, false, tol)) return {pieces_[i].fn.value(x), i};
  }
  std::ostringstream os;
  os << "point (";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ") lies outside every region";
  throw DomainError(os.str(), x.values());
}

ProperPiecewiseFn ProperPiecewiseFn::negated() const {
  std::vector<Piece> out;
  out.reserve(pieces_.size());
  for (const auto& p : pieces_) out.push_back({p.region, p.fn.negated()});
  return ProperPiecewiseFn(std::move(out));
}

ProperPiecewiseFn ProperPiecewiseFn::restricted(const Region& r) const {
  std::vector<Piece> out;
  out.reserve(pieces_.size());
  for (const auto& p : pieces_) out.push_back({p.region.intersect(r), p.fn});
  return ProperPiecewiseFn(std::move(out));
}

// ---------------------------------------------------------------------------
// Flattening

namespace {

/// Adds {d >= 0} unless d vanishes identically; drops duplicate constraints.
Region refine(const Region& base, const SymMatrix& d) {
  if (d.is_zero()) return base;
  Constraint c(d, Sense::geq);
  for (const auto& existing : base.constraints()) {
    if (existing == c) return base;
  }
  return base.with(std::move(c));
}

/// A region containing an oriented conic constraint with negative definite form
/// reduces to the origin, which every other piece covers as well.
bool degenerate(const Region& r) {
  for (const auto& raw : r.constraints()) {
    if (!raw.is_conic()) continue;
    const Constraint c = raw.oriented();
    if (eigen_extremes(c.form()).max < 0.0) return true;
  }
  return false;
}

std::vector<Piece> combine(const std::vector<Piece>& f, const std::vector<Piece>& g, bool take_max) {
  std::vector<Piece> out;
  for (const auto& pf : f) {
    for (const auto& pg : g) {
      const Region both = pf.region.intersect(pg.region);
      const SymMatrix diff = pf.fn.quadratic_matrix() - pg.fn.quadratic_matrix();
      // max keeps f where f - g >= 0; min keeps f where g - f >= 0.
      Region rf = refine(both, take_max ? diff : -diff);
      Region rg = refine(both, take_max ? -diff : diff);
      if (!degenerate(rf)) out.push_back({std::move(rf), pf.fn});
      if (!degenerate(rg)) out.push_back({std::move(rg), pg.fn});
    }
  }
  if (out.empty()) {
    // Every combination collapsed to the origin; keep one representative.
    out.push_back({Region::everything(), f.front().fn});
  }
  return out;
}

std::vector<Piece> flatten_rec(const LatticeExpr& e) {
  switch (e.op()) {
    case LatticeExpr::Op::leaf:
      if (!e.piece().is_homogeneous_quadratic()) {
        throw UnsupportedExpression("affine leaves cannot be flattened into conic regions");
      }
      return {Piece{Region::everything(), e.piece()}};
    case LatticeExpr::Op::mid:
      return flatten_rec(e.without_mid());
    case LatticeExpr::Op::max:
    case LatticeExpr::Op::min: {
      const bool take_max = e.op() == LatticeExpr::Op::max;
      std::vector<Piece> acc = flatten_rec(e.children().front());
      for (std::size_t i = 1; i < e.children().size(); ++i) {
        acc = combine(acc, flatten_rec(e.children()[i]), take_max);
      }
      return acc;
    }
  }
  return {};
}

}  // namespace

ProperPiecewiseFn flatten(const LatticeExpr& expr) { return ProperPiecewiseFn(flatten_rec(expr)); }

// ---------------------------------------------------------------------------
// Active sets and Clarke gradients

std::set<std::size_t> active_indices(const ProperPiecewiseFn& f, const Vec& x, double tol) {
  const double v = f(x);
  std::set<std::size_t> idx;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& p = f.piece(i);
    if (!p.region.contains(x, false, tol)) continue;
    if (std::abs(p.fn.value(x) - v) <= tol * (1.0 + std::abs(v))) idx.insert(i);
  }
  if (idx.empty()) throw InternalInconsistency("no active piece at a covered point");
  return idx;
}

namespace {

Vec sample_ball(const Vec& center, double radius, Rng& rng) {
  const std::size_t n = center.size();
  Vec dir(n);
  double norm = 0.0;
  while (norm == 0.0) {
    for (std::size_t i = 0; i < n; ++i) dir[i] = rng.normal();
    norm = dir.norm();
  }
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
  return center + (r / norm) * dir;
}

}  // namespace

std::set<std::size_t> essentially_active(const ProperPiecewiseFn& f, const Vec& x,
                                         const SamplingOptions& opts) {
  if (opts.samples < 100) throw UsageError("essentially_active needs at least 100 samples");
  if (f.size() == 1) return {0};
  const std::set<std::size_t> active = active_indices(f, x, opts.tol);
  if (active.size() == 1) return active;

  const double radius = opts.radius > 0.0 ? opts.radius : 1e-4 * (1.0 + x.norm());
  Rng rng(opts.seed);
  std::set<std::size_t> found;
  std::vector<std::size_t> interior;
  std::vector<std::size_t> touching;
  for (std::size_t s = 0; s < opts.samples; ++s) {
    const Vec y = sample_ball(x, radius, rng);
    interior.clear();
    touching.clear();
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto& region = f.piece(i).region;
      if (region.contains(y, true, 0.0)) interior.push_back(i);
      if (region.contains(y, false, 0.0)) touching.push_back(i);
    }
    if (interior.empty()) continue;
    const SmoothPiece& fn = f.piece(interior.front()).fn;
    const bool unique = std::all_of(touching.begin(), touching.end(),
                                    [&](std::size_t k) { return f.piece(k).fn == fn; });
    if (!unique) continue;
    for (std::size_t i : interior) {
      if (active.contains(i)) found.insert(i);
    }
  }
  // No sample resolved a unique piece (e.g. all pieces coincide near x).
  if (found.empty()) return active;
  return found;
}

double GradientPolytope::max_inner(const Vec& f) const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices) m = std::max(m, dot(v, f));
  return m;
}

GradientPolytope clarke_polytope(const ProperPiecewiseFn& f, const Vec& x,
                                 const SamplingOptions& opts) {
  GradientPolytope poly;
  poly.base = x;
  for (std::size_t i : essentially_active(f, x, opts)) {
    Vec g = f.piece(i).fn.grad(x);
    const bool dup = std::any_of(poly.vertices.begin(), poly.vertices.end(),
                                 [&](const Vec& v) { return max_abs_diff(v, g) <= 1e-12; });
    if (dup) continue;
    poly.vertices.push_back(std::move(g));
    poly.pieces.push_back(i);
  }
  return poly;
}

// ---------------------------------------------------------------------------
// Continuity

std::vector<Vec> boundary_samples(const ProperPiecewiseFn& f, std::size_t count, double max_radius) {
  if (f.dim() != 2) throw UsageError("boundary_samples supports planar functions only");
  constexpr int kScan = 3600;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> angles;
  auto add_angle = [&](double a) {
    for (double b : angles) {
      const double d = std::abs(std::remainder(a - b, two_pi));
      if (d < 1e-9) return;
    }
    angles.push_back(a);
  };
  for (const auto& p : f.pieces()) {
    for (const auto& c : p.region.constraints()) {
      if (!c.is_conic()) continue;
      auto g = [&](double t) { return c.form().bilinear(unit_direction(t), unit_direction(t)); };
      double prev_t = 0.0;
      double prev = g(prev_t);
      for (int k = 1; k <= kScan; ++k) {
        const double t = two_pi * k / kScan;
        const double cur = g(t);
        if (prev == 0.0) {
          add_angle(prev_t);
        } else if ((prev < 0.0) != (cur < 0.0) && cur != 0.0) {
          double lo = prev_t;
          double hi = t;
          double glo = prev;
          for (int it = 0; it < 80 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double gm = g(mid);
            if ((gm < 0.0) == (glo < 0.0)) {
              lo = mid;
              glo = gm;
            } else {
              hi = mid;
            }
          }
          add_angle(std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi);
        }
        prev_t = t;
        prev = cur;
      }
    }
  }
  std::sort(angles.begin(), angles.end());
  std::vector<Vec> pts;
  if (angles.empty() || count == 0) return pts;
  const std::size_t per_ray = std::max<std::size_t>(1, count / angles.size());
  for (double a : angles) {
    const Vec u = unit_direction(a);
    for (std::size_t k = 1; k <= per_ray; ++k) {
      pts.push_back((max_radius * static_cast<double>(k) / static_cast<double>(per_ray)) * u);
    }
  }
  return pts;
}

CheckReport continuity_check(const ProperPiecewiseFn& f, std::span<const Vec> points, double tol) {
  CheckReport rep;
  rep.check = "continuity";
  rep.params["tol"] = tol;
  rep.params["points"] = points.size();
  rep.worst_margin = 0.0;
  double max_ratio = 1.0;
  for (const Vec& x : points) {
    ++rep.evaluated;
    std::vector<std::size_t> containing;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f.piece(i).region.contains(x, false, tol)) containing.push_back(i);
    }
    for (std::size_t a = 0; a < containing.size(); ++a) {
      for (std::size_t b = a + 1; b < containing.size(); ++b) {
        const double va = f.piece(containing[a]).fn.value(x);
        const double vb = f.piece(containing[b]).fn.value(x);
        const double scale = 1.0 + std::max(std::abs(va), std::abs(vb));
        const double gap = std::abs(va - vb) / scale;
        rep.worst_margin = std::max(rep.worst_margin, gap);
        if (gap > tol) {
          std::ostringstream os;
          os << "pieces " << containing[a] << " and " << containing[b] << " disagree: " << va
             << " vs " << vb;
          const double lo = std::min(std::abs(va), std::abs(vb));
          if (lo > 0.0) {
            const double ratio = std::max(std::abs(va), std::abs(vb)) / lo;
            max_ratio = std::max(max_ratio, ratio);
            os << " (ratio " << ratio << ")";
          }
          rep.add_counterexample({x, static_cast<int>(containing[a]), va - vb, os.str()});
        }
      }
    }
  }
  rep.params["max_value_ratio"] = max_ratio;
  return rep;
}

Vec matching_squared_linear(const ProperPiecewiseFn& v, std::span<const Vec> rays) {
  const std::size_t n = v.dim();
  if (rays.size() != n) throw UsageError("need exactly n rays to match a squared-linear piece");
  // Solve U w = s with U rows the unit rays and s_k = sqrt(V(u_k)), by Gaussian
  // elimination with partial pivoting.
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
  for (std::size_t k = 0; k < n; ++k) {
    const double len = rays[k].norm();
    if (rays[k].size() != n || len == 0.0) throw UsageError("invalid ray");
    const Vec u = (1.0 / len) * rays[k];
    const double val = v(u);
    if (val < 0.0) throw DomainError("function is negative on a matching ray", u.values());
    for (std::size_t j = 0; j < n; ++j) m[k][j] = u[j];
    m[k][n] = std::sqrt(val);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    if (std::abs(m[piv][col]) < 1e-14) throw UsageError("matching rays are linearly dependent");
    std::swap(m[piv], m[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = m[r][col] / m[col][col];
      for (std::size_t j = col; j <= n; ++j) m[r][j] -= factor * m[col][j];
    }
  }
  Vec w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = m[k][n] / m[k][k];
  return w;
}

}  // namespace hylyap
