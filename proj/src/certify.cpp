#include "hylyap/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hylyap/errors.hpp"

namespace hylyap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double angular_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

CheckReport start_report(const std::string& name, std::size_t evaluated_hint = 0) {
  CheckReport r;
  r.check = name;
  r.worst_margin = -std::numeric_limits<double>::infinity();
  r.evaluated = evaluated_hint;
  return r;
}

/// Reports with nothing evaluated carry worst margin 0 rather than -inf.
void finish(CheckReport& r) {
  if (!std::isfinite(r.worst_margin)) r.worst_margin = 0.0;
}

Vec normalized(const Vec& x) {
  const double n = x.norm();
  return n > 0.0 ? (1.0 / n) * x : x;
}

bool all_constraints_above(const Region& r, const Vec& u, double level) {
  return std::all_of(r.constraints().begin(), r.constraints().end(),
                     [&](const Constraint& c) { return c.oriented().raw(u) > level; });
}

bool all_constraints_at_least(const Region& r, const Vec& y, double level) {
  return std::all_of(r.constraints().begin(), r.constraints().end(),
                     [&](const Constraint& c) { return c.oriented().raw(y) >= level; });
}

void require_homogeneous(const ProperPiecewiseFn& v, const char* who) {
  if (!v.homogeneous()) {
    throw UsageError(std::string(who) + ": Lyapunov candidate must be piecewise quadratic on conic regions");
  }
}


/// Planar unit directions u with u^T R u = level. On the circle
/// u^T R u = a + rho cos(2t - phi), so there are at most four solutions.
std::vector<Vec> level_directions(const SymMatrix& r, double level) {
  std::vector<Vec> out;
  const double a = 0.5 * (r(0, 0) + r(1, 1));
  const double b = 0.5 * (r(0, 0) - r(1, 1));
  const double c = r(0, 1);
  const double rho = std::hypot(b, c);
  if (rho == 0.0) return out;
  const double z = (level - a) / rho;
  if (z < -1.0 || z > 1.0) return out;
  const double phi = std::atan2(c, b);
  const double w = std::acos(z);
  for (double two_t : {phi + w, phi - w}) {
    for (double shift : {0.0, std::numbers::pi}) out.push_back(unit_direction(0.5 * two_t + shift));
  }
  return out;
}

/// Appends, for planar problems, the directions where one of the hypothesis
/// forms reaches its threshold: suprema over the admissible directions that
/// sit on the edge of the admissible set are then sampled exactly rather than
/// to within the grid spacing.
std::vector<Vec> with_level_directions(const std::vector<Vec>& grid, const std::vector<SymMatrix>& forms,
                                       double level) {
  std::vector<Vec> out = grid;
  for (const auto& f : forms) {
    if (f.dim() != 2) return grid;
    const auto extra = level_directions(f, level);
    out.insert(out.end(), extra.begin(), extra.end());
  }
  return out;
}

/// Hypothesis levels are nudged into the admissible side so that the added
/// directions pass the membership filter despite rounding.
constexpr double kLevelNudge = 1e-12;

}  // namespace

// ---------------------------------------------------------------------------
// Sampler

Sampler Sampler::unit_circle(std::size_t n, std::vector<double> excluded_angles, double exclusion) {
  if (n == 0) throw UsageError("unit circle grid needs N > 0");
  Sampler s;
  s.kind_ = Kind::unit_circle;
  s.n_ = n;
  s.excluded_ = std::move(excluded_angles);
  s.exclusion_ = exclusion;
  return s;
}

Sampler Sampler::curve(CurveArc arc, std::size_t n, std::vector<double> excluded_params,
                       double exclusion) {
  if (n < 2) throw UsageError("curve grid needs N >= 2");
  Sampler s;
  s.kind_ = Kind::curve;
  s.n_ = n;
  s.arc_ = std::move(arc);
  s.excluded_ = std::move(excluded_params);
  s.exclusion_ = exclusion;
  return s;
}

Sampler Sampler::ball(Vec center, double radius, std::size_t per_axis) {
  if (per_axis < 2 || !(radius > 0.0)) throw UsageError("ball grid needs radius > 0 and >= 2 nodes per axis");
  if (center.empty() || center.size() > kMaxDim) throw UsageError("ball grid dimension out of range");
  Sampler s;
  s.kind_ = Kind::ball;
  s.n_ = per_axis;
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

Sampler Sampler::explicit_points(std::vector<Vec> points) {
  Sampler s;
  s.kind_ = Kind::points;
  s.points_ = std::move(points);
  return s;
}

std::vector<Vec> Sampler::points() const {
  std::vector<Vec> out;
  switch (kind_) {
    case Kind::unit_circle: {
      out.reserve(n_);
      for (std::size_t k = 0; k < n_; ++k) {
        const double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(n_);
        const bool skip = std::any_of(excluded_.begin(), excluded_.end(), [&](double e) {
          return angular_distance(theta, e) < exclusion_;
        });
        if (!skip) out.push_back(unit_direction(theta));
      }
      break;
    }
    case Kind::curve: {
      out.reserve(n_);
      const double span = arc_->t_max() - arc_->t_min();
      for (std::size_t k = 0; k < n_; ++k) {
        const double t = arc_->t_min() + span * static_cast<double>(k) / static_cast<double>(n_ - 1);
        const bool skip = std::any_of(excluded_.begin(), excluded_.end(),
                                      [&](double e) { return std::abs(t - e) < exclusion_; });
        if (!skip) out.push_back(arc_->point(t));
      }
      break;
    }
    case Kind::ball: {
      const std::size_t dim = center_.size();
      std::vector<std::size_t> idx(dim, 0);
      while (true) {
        Vec x(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          x[i] = center_[i] - radius_ +
                 2.0 * radius_ * static_cast<double>(idx[i]) / static_cast<double>(n_ - 1);
        }
        if ((x - center_).norm() <= radius_) out.push_back(std::move(x));
        std::size_t i = 0;
        while (i < dim && ++idx[i] == n_) idx[i++] = 0;
        if (i == dim) break;
      }
      break;
    }
    case Kind::points:
      out = points_;
      break;
  }
  return out;
}

nlohmann::ordered_json Sampler::describe() const {
  nlohmann::ordered_json j;
  switch (kind_) {
    case Kind::unit_circle:
      j["sampler"] = "unit_circle";
      j["N"] = n_;
      j["excluded"] = excluded_;
      j["exclusion"] = exclusion_;
      break;
    case Kind::curve:
      j["sampler"] = "curve";
      j["N"] = n_;
      j["center"] = arc_->center().values();
      j["radius"] = arc_->radius();
      j["t_range"] = {arc_->t_min(), arc_->t_max()};
      j["excluded"] = excluded_;
      j["exclusion"] = exclusion_;
      break;
    case Kind::ball:
      j["sampler"] = "ball";
      j["center"] = center_.values();
      j["radius"] = radius_;
      j["per_axis"] = n_;
      break;
    case Kind::points:
      j["sampler"] = "points";
      j["count"] = points_.size();
      break;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Bounds

CheckReport bounds_check(const ProperPiecewiseFn& v, const std::vector<Vec>& points,
                         const SetDistance& dist, const std::optional<BoundsSpec>& spec,
                         double margin, double rel_tol) {
  if (points.empty()) throw UsageError("bounds_check: empty sample");
  CheckReport r = start_report("bounds");
  r.params["mode"] = spec ? "spec" : "infer";

  if (!spec) {
    require_homogeneous(v, "bounds_check (infer mode)");
    if (!dist.is_origin()) throw UsageError("bounds_check: infer mode needs the origin as target");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    Vec argmin;
    for (const auto& x : points) {
      if (x.squared_norm() == 0.0) continue;
      const Vec u = normalized(x);
      ++r.evaluated;
      double val = 0.0;
      try {
        val = v(u);
      } catch (const DomainError&) {
        r.add_counterexample({u, -1, 0.0, "outside the domain of V"});
        continue;
      }
      if (val < lo) {
        lo = val;
        argmin = u;
      }
      hi = std::max(hi, val);
    }
    if (r.evaluated == 0) throw UsageError("bounds_check: no nonzero sample");
    r.params["lambda1"] = lo;
    r.params["lambda2"] = hi;
    r.params["margin"] = margin;
    r.worst_margin = margin - lo;
    if (!(lo > margin)) r.add_counterexample({argmin, -1, lo, "lambda1 not above margin"});
    return r;
  }

  r.params["alpha1"] = {{"c", spec->alpha1.c}, {"p", spec->alpha1.p}};
  r.params["alpha2"] = {{"c", spec->alpha2.c}, {"p", spec->alpha2.p}};
  r.params["rel_tol"] = rel_tol;
  for (const auto& x : points) {
    ++r.evaluated;
    ProperPiecewiseFn::Evaluation e{};
    try {
      e = v.evaluate(x);
    } catch (const DomainError&) {
      r.add_counterexample({x, -1, 0.0, "outside the domain of V"});
      continue;
    }
    const double s = dist(x);
    const double lower = spec->alpha1(s) - e.value;
    const double upper = e.value - spec->alpha2(s);
    const double m = std::max(lower, upper);
    r.worst_margin = std::max(r.worst_margin, m);
    if (m > rel_tol * (1.0 + std::abs(e.value))) {
      r.add_counterexample({x, static_cast<int>(e.index), e.value,
                            lower > upper ? "below alpha1" : "above alpha2"});
    }
  }
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Dense decrease

CheckReport dense_decrease_check(const ProperPiecewiseFn& v, const FlowMap& f, const Region& c,
                                 const std::vector<Vec>& points, const RateFn& rho,
                                 const SetDistance& dist, double delta_int, double tol) {
  CheckReport r = start_report("dense_decrease");
  r.params["delta_int"] = delta_int;
  r.params["tol"] = tol;
  r.params["rho"] = {{"c", rho.c}, {"p", rho.p}};
  std::size_t skipped = 0;
  for (const auto& x : points) {
    if (!c.contains(x, true, delta_int)) {
      ++skipped;
      continue;
    }
    const std::vector<Vec> fields = f.selections(x, 0.0);
    const double decay = rho(dist(x));
    bool any = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Piece& p = v.piece(i);
      if (!p.region.contains(x, true, delta_int)) continue;
      any = true;
      const Vec g = p.fn.grad(x);
      for (const auto& fx : fields) {
        const double m = dot(g, fx) + decay;
        r.worst_margin = std::max(r.worst_margin, m);
        if (m > tol * (1.0 + g.norm() * fx.norm())) {
          r.add_counterexample({x, static_cast<int>(i), m, "piece gradient does not decrease along f"});
        }
      }
    }
    if (any) {
      ++r.evaluated;
    } else {
      ++skipped;
    }
  }
  r.params["skipped"] = skipped;
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Homogeneous flow and jump conditions

CheckReport homogeneous_flow_check(const ProperPiecewiseFn& v, const Matrix& a_f,
                                   const SymMatrix& q_f, const std::vector<Vec>& directions,
                                   const HomogeneousMargins& m) {
  require_homogeneous(v, "homogeneous_flow_check");
  if (a_f.dim() != v.dim() || q_f.dim() != v.dim()) throw UsageError("homogeneous_flow_check: dimension mismatch");
  if (eigen_extremes(q_f).max <= 0.0) {
    throw HypothesisError("homogeneous_flow_check: Q_F is negative semidefinite");
  }
  CheckReport r = start_report("flow");
  r.params["N"] = directions.size();
  r.params["delta_h"] = m.delta_h;
  r.params["delta_c"] = m.delta_c;

  std::vector<SymMatrix> sums;
  sums.reserve(v.size());
  for (const auto& p : v.pieces()) sums.push_back(lyapunov_sum(p.fn.quadratic_matrix(), a_f));

  std::vector<SymMatrix> forms{q_f};
  for (const auto& p : v.pieces()) {
    for (const auto& c : p.region.constraints()) forms.push_back(c.oriented().form());
  }
  const std::vector<Vec> all = with_level_directions(directions, forms, m.delta_h + kLevelNudge);
  r.params["edge_directions"] = all.size() - directions.size();

  for (const auto& d : all) {
    const Vec u = normalized(d);
    if (!(q_f.bilinear(u, u) > m.delta_h)) continue;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!all_constraints_above(v.piece(i).region, u, m.delta_h)) continue;
      ++r.evaluated;
      const double val = sums[i].bilinear(u, u);
      r.worst_margin = std::max(r.worst_margin, val);
      if (val > -m.delta_c) r.add_counterexample({u, static_cast<int>(i), val, "u^T(P_i A_F + A_F^T P_i)u not negative"});
    }
  }
  finish(r);
  return r;
}

CheckReport homogeneous_jump_check(const ProperPiecewiseFn& v, const Matrix& a_j,
                                   const SymMatrix& q_j, const std::vector<Vec>& directions,
                                   const HomogeneousMargins& m) {
  require_homogeneous(v, "homogeneous_jump_check");
  if (a_j.dim() != v.dim() || q_j.dim() != v.dim()) throw UsageError("homogeneous_jump_check: dimension mismatch");
  CheckReport r = start_report("jump");
  r.params["N"] = directions.size();
  r.params["delta_h"] = m.delta_h;
  r.params["delta_c"] = m.delta_c;

  std::vector<SymMatrix> forms{q_j};
  for (const auto& p : v.pieces()) {
    for (const auto& c : p.region.constraints()) {
      forms.push_back(c.oriented().form());
      forms.push_back(congruence(c.oriented().form(), a_j));
    }
  }
  const std::vector<Vec> all = with_level_directions(directions, forms, -m.delta_h + kLevelNudge);
  r.params["edge_directions"] = all.size() - directions.size();

  for (const auto& d : all) {
    const Vec u = normalized(d);
    if (q_j.bilinear(u, u) < -m.delta_h) continue;
    const Vec g = a_j * u;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const Piece& pj = v.piece(j);
      if (!all_constraints_at_least(pj.region, u, -m.delta_h)) continue;
      const double before = pj.fn.value(u);
      for (std::size_t i = 0; i < v.size(); ++i) {
        const Piece& pi = v.piece(i);
        if (!all_constraints_at_least(pi.region, g, -m.delta_h)) continue;
        ++r.evaluated;
        const double val = pi.fn.value(g) - before;
        r.worst_margin = std::max(r.worst_margin, val);
        if (val > -m.delta_c) {
          r.add_counterexample({u, static_cast<int>(j), val,
                                "jump into piece " + std::to_string(i) + " does not decrease"});
        }
      }
    }
  }
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Clarke condition

CheckReport clarke_check(const ProperPiecewiseFn& v, const FlowMap& f,
                         const std::vector<Vec>& points, const RateFn& rho,
                         const SetDistance& dist, const SamplingOptions& opts, double tol) {
  CheckReport r = start_report("clarke");
  r.params["samples"] = opts.samples;
  r.params["radius"] = opts.radius;
  r.params["seed"] = opts.seed;
  r.params["rho"] = {{"c", rho.c}, {"p", rho.p}};
  for (const auto& x : points) {
    ++r.evaluated;
    const GradientPolytope poly = clarke_polytope(v, x, opts);
    const std::vector<Vec> fields = f.selections(x);
    const double decay = rho(dist(x));
    for (std::size_t k = 0; k < poly.vertices.size(); ++k) {
      for (const auto& fx : fields) {
        const double m = dot(poly.vertices[k], fx) + decay;
        r.worst_margin = std::max(r.worst_margin, m);
        if (m > tol * (1.0 + poly.vertices[k].norm() * fx.norm())) {
          std::ostringstream os;
          os << "vertex (";
          for (std::size_t i = 0; i < poly.vertices[k].size(); ++i) {
            os << (i ? "," : "") << format_double(poly.vertices[k][i]);
          }
          os << ") violates the decrease condition";
          r.add_counterexample({x, static_cast<int>(poly.pieces[k]), m, os.str()});
        }
      }
    }
  }
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// Demonstrations

InfeasibilityReport quadratic_infeasibility_demo(const Matrix& a_f, const std::vector<Vec>& probes,
                                                 const SymMatrix& p) {
  if (probes.empty()) throw UsageError("quadratic_infeasibility_demo: no probes");
  if (a_f.dim() != p.dim()) throw UsageError("quadratic_infeasibility_demo: dimension mismatch");
  const SymMatrix s = lyapunov_sum(p, a_f);
  InfeasibilityReport rep;
  rep.probes = probes;
  for (const auto& z : probes) {
    if (z.size() != p.dim()) throw UsageError("quadratic_infeasibility_demo: probe dimension mismatch");
    const double val = s.bilinear(z, z);
    rep.values.push_back(val);
    if (val >= 0.0) rep.infeasible = true;
  }
  return rep;
}

AeClarkeComparison ae_implies_clarke_compare(const ProperPiecewiseFn& v, const FlowMap& f,
                                             const Region& c, const std::vector<Vec>& open_points,
                                             const std::vector<Vec>& boundary_points,
                                             const RateFn& rho, const SamplingOptions& opts) {
  if (!f.is_continuous()) {
    throw HypothesisError(
        "ae_implies_clarke_compare: the flow map must be inner semicontinuous; Filippov maps are not");
  }
  AeClarkeComparison out;
  out.dense = dense_decrease_check(v, f, c, open_points, rho);
  out.clarke = clarke_check(v, f, boundary_points, rho, {}, opts);
  out.consistent = !(out.dense.pass && !out.clarke.pass);
  return out;
}

// ---------------------------------------------------------------------------
// Homogeneous hybrid systems

SymMatrix conic_form(const Region& s) {
  if (s.curve() || s.constraints().size() != 1 || !s.constraints().front().is_conic()) {
    throw UsageError("expected a set given by a single conic constraint");
  }
  return s.constraints().front().oriented().form();
}

std::vector<Vec> homogeneous_bounds_directions(const HybridSystem& sys, const std::vector<Vec>& grid) {
  std::vector<Vec> out;
  for (const auto& d : grid) {
    const Vec u = normalized(d);
    const bool in_c = sys.flow_set.contains(u);
    const bool in_d = sys.jump_set && sys.jump_set->contains(u);
    if (in_c || in_d) out.push_back(u);
    if (in_d) {
      const Vec g = sys.jump(u);
      if (g.norm() > 0.0) out.push_back(normalized(g));
    }
  }
  return out;
}

HomogeneousCertificate certify_homogeneous(const HybridSystem& sys, const ProperPiecewiseFn& v,
                                           std::size_t grid_n, const HomogeneousMargins& m) {
  if (!sys.homogeneous()) throw UsageError("certify_homogeneous: system is not homogeneous");
  require_homogeneous(v, "certify_homogeneous");
  const std::vector<Vec> grid = Sampler::unit_circle(grid_n).points();
  HomogeneousCertificate cert;
  cert.bounds = bounds_check(v, homogeneous_bounds_directions(sys, grid));
  cert.flow = homogeneous_flow_check(v, sys.flow.a(), conic_form(sys.flow_set), grid, m);
  if (sys.jump_set) {
    const Matrix a_j = sys.jump.kind() == JumpMap::Kind::linear ? sys.jump.a()
                                                                : Matrix::identity(sys.dim());
    cert.jump = homogeneous_jump_check(v, a_j, conic_form(*sys.jump_set), grid, m);
  } else {
    cert.jump.check = "jump";
    cert.jump.params["note"] = "empty jump set";
  }
  return cert;
}

}  // namespace hylyap
