#include "hylyap/setvalued.hpp"

#include <algorithm>
#include <cmath>

#include "hylyap/errors.hpp"

namespace hylyap {

FlowMap FlowMap::linear(Matrix a) {
  if (a.dim() == 0) throw UsageError("flow matrix must be nonempty");
  FlowMap f;
  f.kind_ = Kind::linear;
  f.a_ = std::move(a);
  return f;
}

FlowMap FlowMap::norm_scaled_affine(Matrix a, Vec b) {
  if (a.dim() == 0 || a.dim() != b.size()) throw UsageError("norm_scaled_affine: dimension mismatch");
  FlowMap f;
  f.kind_ = Kind::norm_scaled_affine;
  f.a_ = std::move(a);
  f.b_ = std::move(b);
  return f;
}

FlowMap FlowMap::filippov2(Matrix a1, Matrix a2, SymMatrix q) {
  if (a1.dim() == 0 || a1.dim() != a2.dim() || a1.dim() != q.dim()) {
    throw UsageError("filippov2: dimension mismatch");
  }
  FlowMap f;
  f.kind_ = Kind::filippov2;
  f.a_ = std::move(a1);
  f.a2_ = std::move(a2);
  f.q_ = std::move(q);
  return f;
}

double FlowMap::switching(const Vec& x) const {
  if (kind_ != Kind::filippov2) throw UsageError("switching function needs a Filippov map");
  return q_.bilinear(x, x);
}

Vec FlowMap::mode_field(int mode, const Vec& x) const {
  if (kind_ != Kind::filippov2) throw UsageError("mode fields need a Filippov map");
  return mode == 1 ? a_ * x : a2_ * x;
}

Vec FlowMap::eval(const Vec& x, double locus_tol) const {
  switch (kind_) {
    case Kind::linear:
      return a_ * x;
    case Kind::norm_scaled_affine:
      return x.norm() * (a_ * x + b_);
    case Kind::filippov2: {
      const double sq = x.squared_norm();
      if (sq == 0.0) return Vec(x.size());
      const double s = switching(x);
      if (std::abs(s) <= locus_tol * sq) {
        throw UsageError("flow_eval: point lies on the Filippov switching locus; use sliding_resolve");
      }
      return s > 0.0 ? a_ * x : a2_ * x;
    }
  }
  return {};
}

std::vector<Vec> FlowMap::selections(const Vec& x, double locus_tol) const {
  if (kind_ != Kind::filippov2) return {eval(x)};
  const double sq = x.squared_norm();
  const double s = switching(x);
  if (std::abs(s) <= locus_tol * sq) return {a_ * x, a2_ * x};
  return {s > 0.0 ? a_ * x : a2_ * x};
}

SlidingInfo sliding_resolve(const FlowMap& f, const Vec& x, double locus_tol, double margin) {
  if (f.kind() != FlowMap::Kind::filippov2) throw UsageError("sliding_resolve needs a Filippov map");
  const double sq = x.squared_norm();
  if (std::abs(f.switching(x)) > locus_tol * sq) {
    throw UsageError("sliding_resolve: point is not on the switching locus");
  }
  SlidingInfo info;
  info.surface_normal = 2.0 * (f.q() * x);
  if (info.surface_normal.norm() == 0.0) {
    throw SingularPoint("sliding_resolve: switching surface is singular at this point (2Qx = 0)");
  }
  const Vec f1 = f.mode_field(1, x);
  const Vec f2 = f.mode_field(2, x);
  const double a = dot(info.surface_normal, f1);
  const double b = dot(info.surface_normal, f2);
  const double eps = margin * sq;
  if (std::abs(a) <= eps || std::abs(b) <= eps) {
    throw AmbiguousSliding("sliding_resolve: grazing contact with the switching surface");
  }
  if (a < 0.0 && b > 0.0) {
    info.on_surface = true;
    info.lambda = b / (b - a);
    info.field = info.lambda * f1 + (1.0 - info.lambda) * f2;
    return info;
  }
  if (a > 0.0 && b < 0.0) {
    throw AmbiguousSliding("sliding_resolve: repulsive switching surface, solutions are not unique");
  }
  // Transversal: both fields push s the same way; the solution enters the
  // region that sign points to.
  info.on_surface = false;
  info.lambda = a > 0.0 ? 1.0 : 0.0;
  info.field = a > 0.0 ? f1 : f2;
  return info;
}

Vec sliding_field(const FlowMap& f, const Vec& x) {
  const Vec n = 2.0 * (f.q() * x);
  const Vec f1 = f.mode_field(1, x);
  const Vec f2 = f.mode_field(2, x);
  const double a = dot(n, f1);
  const double b = dot(n, f2);
  if (b - a == 0.0) return f1;
  const double lambda = std::clamp(b / (b - a), 0.0, 1.0);
  return lambda * f1 + (1.0 - lambda) * f2;
}

Vec project_to_locus(const FlowMap& f, const Vec& x) {
  Vec y = x;
  for (int it = 0; it < 4; ++it) {
    const Vec g = 2.0 * (f.q() * y);
    const double gg = g.squared_norm();
    if (gg == 0.0) break;
    y -= (f.switching(y) / gg) * g;
  }
  return y;
}

}  // namespace hylyap
