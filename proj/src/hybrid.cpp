#include "hylyap/hybrid.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "hylyap/errors.hpp"

namespace hylyap {

bool HybridSystem::homogeneous() const {
  auto single_conic = [](const Region& r) {
    return !r.curve() && r.constraints().size() == 1 && r.constraints().front().is_conic();
  };
  const bool c_ok = single_conic(flow_set) || (flow_set.constraints().empty() && !flow_set.curve());
  const bool d_ok = !jump_set || single_conic(*jump_set);
  return c_ok && d_ok && flow.kind() == FlowMap::Kind::linear;
}

void HybridSystem::validate() const {
  const std::size_t n = dim();
  if (n == 0 || n > kMaxDim) throw UsageError("system dimension out of range");
  auto check_region = [n](const Region& r, const char* name) {
    for (const auto& c : r.constraints()) {
      if (c.dim() != n) throw UsageError(std::string(name) + ": constraint dimension mismatch");
    }
    if (r.curve() && n != 2) throw UsageError(std::string(name) + ": curves are planar");
  };
  check_region(flow_set, "C");
  if (jump_set) check_region(*jump_set, "D");
  if (jump.kind() == JumpMap::Kind::linear && jump.a().dim() != n) {
    throw UsageError("jump map dimension mismatch");
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::horizon:
      return "horizon";
    case Termination::max_jumps:
      return "max_jumps";
    case Termination::left_C_and_D:
      return "left_C_and_D";
    case Termination::blow_up:
      return "blow_up";
    case Termination::sliding_escape:
      return "sliding_escape";
  }
  return "horizon";
}

std::string to_string(Priority p) { return p == Priority::jump_first ? "jump-first" : "flow-first"; }

Priority parse_priority(const std::string& s) {
  if (s == "jump-first" || s == "jump_first" || s == "jump") return Priority::jump_first;
  if (s == "flow-first" || s == "flow_first" || s == "flow") return Priority::flow_first;
  throw UsageError("unknown priority '" + s + "'");
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw UsageError("dt must be positive");
  if (!(t_max > 0.0)) throw UsageError("t_max must be positive");
  if (j_max < 0) throw UsageError("j_max must be non-negative");
  if (!(event_tol > 0.0)) throw UsageError("event_tol must be positive");
  if (!(blow_up_radius > 0.0)) throw UsageError("blow_up_radius must be positive");
}

std::size_t HybridArc::sample_count() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.t.size();
  return n;
}

namespace {

using Field = std::function<Vec(const Vec&)>;

Vec rk4(const Field& f, const Vec& x, double h) {
  const Vec k1 = f(x);
  const Vec k2 = f(x + (0.5 * h) * k1);
  const Vec k3 = f(x + (0.5 * h) * k2);
  const Vec k4 = f(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

enum class FlowEnd { horizon, exited, blow_up, sliding_escape };

/// Integrates one flow interval, appending samples to seg. Updates t and x.
class Flower {
 public:
  Flower(const HybridSystem& sys, const SimConfig& cfg) : sys_(sys), cfg_(cfg) {}

  FlowEnd run(FlowSegment& seg, double& t, Vec& x) {
    const bool filippov = sys_.flow.kind() == FlowMap::Kind::filippov2;
    while (true) {
      if (t_max_reached(t)) return FlowEnd::horizon;
      const double h = std::min(cfg_.dt, cfg_.t_max - t);

      sliding_ = false;
      if (filippov) classify(x);

      const Field field = current_field();
      auto advance = [&](double step) {
        Vec y = rk4(field, x, step);
        if (sliding_) y = project_to_locus(sys_.flow, y);
        if (cfg_.manifold_projection) y = cfg_.manifold_projection->project(y);
        return y;
      };

      Vec next = advance(h);
      if (!next.all_finite()) {
        throw NumericError("non-finite state during flow", x.values(), t);
      }

      if (!in_c(next)) {
        const double h_out = bisect(h, [&](double s) { return !in_c(advance(s)); });
        x = advance(h_out);
        t += h_out;
        push(seg, t, x);
        return FlowEnd::exited;
      }

      if (filippov && !sliding_ && crosses(next)) {
        const double h_cross = bisect(h, [&](double s) { return crosses(advance(s)); });
        x = advance(h_cross);
        t += h_cross;
        push(seg, t, x);
        continue;
      }

      x = std::move(next);
      t += h;
      push(seg, t, x);
      if (x.norm() > cfg_.blow_up_radius) return sliding_ ? FlowEnd::sliding_escape : FlowEnd::blow_up;
    }
  }

 private:
  bool t_max_reached(double t) const { return cfg_.t_max - t <= 1e-12 * std::max(1.0, cfg_.t_max); }

  bool in_c(const Vec& y) const { return sys_.flow_set.contains(y, false, cfg_.membership_tol); }

  /// Chooses the Filippov regime at x: sliding, or a fixed mode.
  void classify(const Vec& x) {
    const double sq = x.squared_norm();
    if (sq == 0.0) {
      mode_ = 1;
      return;
    }
    const double s = sys_.flow.switching(x);
    if (std::abs(s) <= cfg_.locus_tol * sq) {
      const SlidingInfo info = sliding_resolve(sys_.flow, x, cfg_.locus_tol);
      if (info.on_surface) {
        sliding_ = true;
      } else {
        mode_ = info.lambda == 1.0 ? 1 : 2;
      }
      return;
    }
    mode_ = s > 0.0 ? 1 : 2;
  }

  bool crosses(const Vec& y) const {
    const double s = sys_.flow.switching(y);
    return mode_ == 1 ? s < 0.0 : s > 0.0;
  }

  Field current_field() const {
    const FlowMap& f = sys_.flow;
    if (f.kind() != FlowMap::Kind::filippov2) {
      return [&f](const Vec& y) { return f.eval(y); };
    }
    if (sliding_) return [&f](const Vec& y) { return sliding_field(f, y); };
    const int mode = mode_;
    return [&f, mode](const Vec& y) { return f.mode_field(mode, y); };
  }

  /// Smallest step (to event_tol) at which `outside` holds; outside(h) is true.
  double bisect(double h, const std::function<bool(double)>& outside) const {
    double lo = 0.0;
    double hi = h;
    while (hi - lo > cfg_.event_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (outside(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  }

  void push(FlowSegment& seg, double t, const Vec& x) const {
    seg.t.push_back(t);
    seg.x.push_back(x);
    seg.sliding.push_back(sliding_ ? 1 : 0);
  }

  const HybridSystem& sys_;
  const SimConfig& cfg_;
  bool sliding_ = false;
  int mode_ = 1;
};

FlowSegment start_segment(int j, double t, const Vec& x) {
  FlowSegment seg;
  seg.j = j;
  seg.t.push_back(t);
  seg.x.push_back(x);
  seg.sliding.push_back(0);
  return seg;
}

}  // namespace

HybridArc simulate(const HybridSystem& sys, const Vec& x0, const SimConfig& cfg) {
  sys.validate();
  cfg.validate();
  if (x0.size() != sys.dim()) throw UsageError("x0 dimension does not match the system");
  if (!x0.all_finite()) throw UsageError("x0 must be finite");

  auto in_c = [&](const Vec& y) { return sys.flow_set.contains(y, false, cfg.membership_tol); };
  auto in_d = [&](const Vec& y) {
    return sys.jump_set && sys.jump_set->contains(y, false, cfg.membership_tol);
  };
  if (!in_c(x0) && !in_d(x0)) throw DomainError("initial state lies outside C and D", x0.values());

  HybridArc arc;
  double t = 0.0;
  int j = 0;
  Vec x = x0;
  arc.segments.push_back(start_segment(j, t, x));
  Flower flower(sys, cfg);

  while (true) {
    const bool c = in_c(x);
    const bool d = in_d(x);
    if (d && (cfg.priority == Priority::jump_first || !c)) {
      if (j >= cfg.j_max) {
        arc.termination = Termination::max_jumps;
        break;
      }
      Vec xp = sys.jump(x);
      if (!xp.all_finite()) throw NumericError("non-finite state after jump", x.values(), t);
      arc.jumps.push_back({t, j, x, xp});
      ++j;
      x = std::move(xp);
      arc.segments.push_back(start_segment(j, t, x));
      continue;
    }
    if (!c) {
      arc.termination = Termination::left_C_and_D;
      break;
    }
    const FlowEnd end = flower.run(arc.segments.back(), t, x);
    if (end == FlowEnd::horizon) {
      arc.termination = Termination::horizon;
      break;
    }
    if (end == FlowEnd::blow_up) {
      arc.termination = Termination::blow_up;
      break;
    }
    if (end == FlowEnd::sliding_escape) {
      arc.termination = Termination::sliding_escape;
      break;
    }
  }
  return arc;
}

// ---------------------------------------------------------------------------
// Monitoring

namespace {

double eval_on_arc(const ProperPiecewiseFn& v, const Vec& x, double t, int j) {
  try {
    return v(x);
  } catch (const DomainError& e) {
    std::ostringstream os;
    os << "Lyapunov function undefined on the arc at t=" << t << ", j=" << j << ": " << e.what();
    throw DomainError(os.str(), x.values());
  }
}

}  // namespace

MonitorReport monitor(const HybridArc& arc, const ProperPiecewiseFn& v, const RateFn& rho,
                      const SetDistance& dist, double tol) {
  if (arc.segments.empty()) throw UsageError("monitor: empty arc");
  constexpr double kMinSpan = 1e-9;
  MonitorReport rep;
  rep.tol = tol;
  double worst = -std::numeric_limits<double>::infinity();

  auto consider = [&](double margin, MonitorLocation loc) {
    if (margin > worst) {
      worst = margin;
      rep.worst = std::move(loc);
    }
  };

  for (const auto& seg : arc.segments) {
    const std::size_t m = seg.t.size();
    std::vector<double> vals(m);
    for (std::size_t k = 0; k < m; ++k) vals[k] = eval_on_arc(v, seg.x[k], seg.t[k], seg.j);
    double seg_worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < m; ++k) {
      if (seg.t[k + 1] - seg.t[k] >= kMinSpan) {
        rep.max_step_increase = std::max(rep.max_step_increase, vals[k + 1] - vals[k]);
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t lo = k;
      std::size_t hi = k;
      if (k > 0 && seg.t[k] - seg.t[k - 1] >= kMinSpan) lo = k - 1;
      if (k + 1 < m && seg.t[k + 1] - seg.t[k] >= kMinSpan) hi = k + 1;
      if (lo == hi) continue;
      const double rate = (vals[hi] - vals[lo]) / (seg.t[hi] - seg.t[lo]);
      const double margin = rate + rho(dist(seg.x[k]));
      seg_worst = std::max(seg_worst, margin);
      const bool sliding = seg.sliding[k] != 0;
      if (sliding) rep.worst_sliding_rate = std::max(rep.worst_sliding_rate, rate);
      if (margin > rep.worst_flow_margin) rep.worst_flow_margin = margin;
      consider(margin, {seg.t[k], seg.j, seg.x[k], sliding, "flow"});
    }
    rep.segment_worst.push_back(seg_worst);
  }

  for (const auto& jump : arc.jumps) {
    const double before = eval_on_arc(v, jump.before, jump.t, jump.j);
    const double after = eval_on_arc(v, jump.after, jump.t, jump.j + 1);
    const double margin = after - before + rho(dist(jump.before));
    rep.jump_margins.push_back(margin);
    rep.worst_jump_margin = std::max(rep.worst_jump_margin, margin);
    consider(margin, {jump.t, jump.j, jump.before, false, "jump"});
  }

  rep.pass = worst <= tol;
  return rep;
}

}  // namespace hylyap
