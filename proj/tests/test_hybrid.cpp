#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hylyap/errors.hpp"
#include "hylyap/hybrid.hpp"
#include "hylyap/presets.hpp"
#include "hylyap/rng.hpp"
#include "oracles.hpp"

using namespace hylyap;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

HybridSystem rotation_everywhere() {
  return HybridSystem{Region::everything(), std::nullopt, FlowMap::linear(presets::clegg_a_f()),
                      JumpMap::identity()};
}

double rotation_error(double dt) {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_max = kTwoPi;
  const HybridArc arc = simulate(rotation_everywhere(), Vec{1.0, 0.0}, cfg);
  const auto ref = oracle::rotation({1.0, 0.0}, arc.final_time());
  return (arc.final_state() - Vec{ref[0], ref[1]}).norm();
}

bool equal_arcs(const HybridArc& a, const HybridArc& b) {
  if (a.segments.size() != b.segments.size() || a.jumps.size() != b.jumps.size()) return false;
  if (a.termination != b.termination) return false;
  for (std::size_t s = 0; s < a.segments.size(); ++s) {
    const auto& x = a.segments[s];
    const auto& y = b.segments[s];
    if (x.j != y.j || x.t != y.t || x.x != y.x || x.sliding != y.sliding) return false;
  }
  for (std::size_t k = 0; k < a.jumps.size(); ++k) {
    if (a.jumps[k].t != b.jumps[k].t || a.jumps[k].before != b.jumps[k].before ||
        a.jumps[k].after != b.jumps[k].after) {
      return false;
    }
  }
  return true;
}

/// Random initial state in C or D of the Clegg system.
Vec random_clegg_state(Rng& rng) { return Vec{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)}; }

}  // namespace

TEST_CASE("configuration and system validation") {
  SimConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = SimConfig{};
  cfg.t_max = -1.0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  CHECK_THROWS_AS(simulate(presets::clegg_system(), Vec{1.0, 0.0, 0.0}, SimConfig{}), UsageError);
  CHECK(presets::clegg_system().homogeneous());
  CHECK_FALSE(presets::circle_system().homogeneous());
  CHECK(parse_priority("flow-first") == Priority::flow_first);
  CHECK_THROWS_AS(parse_priority("sideways"), UsageError);
}

TEST_CASE("initial states outside C and D are rejected") {
  CHECK_THROWS_AS(simulate(presets::circle_system(), Vec{0.0, 1.0}, presets::circle_sim_config()), DomainError);
}

TEST_CASE("Clegg: a state in D jumps first") {
  SimConfig cfg;
  cfg.t_max = 1.0;
  const HybridArc arc = simulate(presets::clegg_system(), Vec{1.0, 1.0}, cfg);
  REQUIRE_FALSE(arc.jumps.empty());
  CHECK(arc.jumps[0].t == 0.0);
  CHECK(arc.jumps[0].before == Vec{1.0, 1.0});
  CHECK(arc.jumps[0].after == Vec{1.0, 0.0});
  CHECK(arc.segments[0].t.size() == 1);
}

TEST_CASE("flow-first priority flows from C intersect D") {
  SimConfig cfg;
  cfg.t_max = 0.5;
  cfg.priority = Priority::flow_first;
  // (0, 1) lies on the common boundary of C and D.
  const HybridArc arc = simulate(presets::clegg_system(), Vec{0.0, 1.0}, cfg);
  CHECK(arc.segments[0].t.size() > 1);
}

TEST_CASE("the origin chains zero jumps until the jump budget is spent") {
  SimConfig cfg;
  cfg.t_max = 1.0;
  cfg.j_max = 7;
  const HybridArc arc = simulate(presets::clegg_system(), Vec{0.0, 0.0}, cfg);
  CHECK(arc.termination == Termination::max_jumps);
  CHECK(arc.jumps.size() == 7);
  for (const auto& seg : arc.segments) {
    for (const auto& x : seg.x) CHECK(x == Vec{0.0, 0.0});
  }
}

TEST_CASE("pure rotation over one period") {
  SimConfig cfg;
  cfg.t_max = kTwoPi;
  const HybridArc arc = simulate(rotation_everywhere(), Vec{1.0, 0.0}, cfg);
  CHECK(arc.termination == Termination::horizon);
  CHECK(arc.final_time() == doctest::Approx(kTwoPi));
  CHECK((arc.final_state() - Vec{1.0, 0.0}).norm() <= 1e-6);
  double worst = 0.0;
  for (const auto& x : arc.segments[0].x) worst = std::max(worst, std::abs(x.norm() - 1.0));
  CHECK(worst <= 1e-8);
}

TEST_CASE("RK4 convergence order on the rotation") {
  const double e1 = rotation_error(0.1);
  const double e2 = rotation_error(0.05);
  CHECK(e1 > 0.0);
  CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("flower: sliding escape along the attractive diagonal") {
  SimConfig cfg;
  cfg.t_max = 2.0;
  const HybridArc arc = simulate(presets::flower_system(), Vec{1.0, 1.0}, cfg);
  CHECK((arc.termination == Termination::horizon || arc.termination == Termination::sliding_escape));
  const auto& seg = arc.segments[0];
  for (std::size_t k = 0; k < seg.t.size(); k += 50) {
    const double ref = oracle::flower_sliding_norm(seg.t[k]);
    CHECK(std::abs(seg.x[k].norm() - ref) <= 0.01 * ref);
    CHECK(std::abs(seg.x[k][0] - seg.x[k][1]) <= 1e-6 * seg.x[k].norm());
  }
  CHECK(seg.sliding.back() == 1);
}

TEST_CASE("flower: repulsive anti-diagonal is reported") {
  SimConfig cfg;
  cfg.t_max = 1.0;
  CHECK_THROWS_AS(simulate(presets::flower_system(), Vec{1.0, -1.0}, cfg), AmbiguousSliding);
}

TEST_CASE("flower: trajectories off the locus reach the attractive diagonal") {
  SimConfig cfg;
  cfg.t_max = 1.0;
  const HybridArc arc = simulate(presets::flower_system(), Vec{1.0, 0.2}, cfg);
  bool slid = false;
  for (auto s : arc.segments[0].sliding) slid = slid || s != 0;
  CHECK(slid);
}

TEST_CASE("circle: projected flow converges to the origin") {
  SimConfig cfg = presets::circle_sim_config();
  cfg.t_max = 20.0;
  const HybridArc arc = simulate(presets::circle_system(), Vec{2.0, 2.0}, cfg);
  double first = -1.0;
  for (std::size_t k = 0; k < arc.segments[0].t.size(); ++k) {
    if (arc.segments[0].x[k].norm() < 1e-3) {
      first = arc.segments[0].t[k];
      break;
    }
  }
  CHECK(first >= 0.0);
  CHECK(first < 20.0);
  const CurveArc c = presets::circle_arc();
  for (const auto& x : arc.segments[0].x) CHECK(c.relative_distance(x) <= 1e-7);
}

TEST_CASE("property: arc structure, jump consistency and flow containment") {
  const HybridSystem sys = presets::clegg_system();
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    SimConfig cfg;
    cfg.t_max = 10.0;
    cfg.dt = 1e-2;
    const HybridArc arc = simulate(sys, random_clegg_state(rng), cfg);
    REQUIRE(arc.segments.size() == arc.jumps.size() + 1);
    double t_prev = 0.0;
    for (std::size_t s = 0; s < arc.segments.size(); ++s) {
      const auto& seg = arc.segments[s];
      CHECK(seg.j == static_cast<int>(s));
      for (std::size_t k = 0; k < seg.t.size(); ++k) {
        CHECK(seg.t[k] >= t_prev);
        t_prev = seg.t[k];
        // A single-sample segment is a state that jumped without flowing (it
        // may lie in D only); the closing sample of an exiting segment sits
        // just past bd C, within the containment slack.
        if (seg.t.size() == 1) continue;
        INFO("segment ", s, " sample ", k, " margin ", sys.flow_set.min_margin(seg.x[k]));
        CHECK(sys.flow_set.contains(seg.x[k], false, 1e-7));
      }
      if (s > 0) {
        const JumpEvent& jump = arc.jumps[s - 1];
        CHECK(jump.j == static_cast<int>(s) - 1);
        CHECK(jump.before == arc.segments[s - 1].x.back());
        CHECK(jump.after == sys.jump(jump.before));
        CHECK(seg.x.front() == jump.after);
        CHECK(sys.jump_set->contains(jump.before, false, cfg.event_tol));
      }
    }
  }
}

TEST_CASE("property: simulation is deterministic") {
  SimConfig cfg;
  cfg.t_max = 15.0;
  const HybridArc a = simulate(presets::clegg_system(), Vec{-2.0, 0.5}, cfg);
  const HybridArc b = simulate(presets::clegg_system(), Vec{-2.0, 0.5}, cfg);
  CHECK(equal_arcs(a, b));
  cfg.t_max = 2.0;
  CHECK(equal_arcs(simulate(presets::flower_system(), Vec{1.0, 1.0}, cfg),
                   simulate(presets::flower_system(), Vec{1.0, 1.0}, cfg)));
}

TEST_CASE("monitor: Clegg with the max candidate decreases") {
  SimConfig cfg;
  cfg.t_max = 20.0;
  const HybridArc arc = simulate(presets::clegg_system(), Vec{-2.0, 0.5}, cfg);
  CHECK(arc.jumps.size() >= 1);
  const MonitorReport rep = monitor(arc, presets::clegg_vm(), RateFn{1e-6, 2.0});
  CHECK(rep.pass);
  CHECK(rep.max_step_increase <= 1e-6);
  for (double m : rep.jump_margins) CHECK(m <= 0.0);
  CHECK(rep.segment_worst.size() == arc.segments.size());
}

TEST_CASE("monitor: flower sliding segment increases V") {
  SimConfig cfg;
  cfg.t_max = 2.0;
  const HybridArc arc = simulate(presets::flower_system(), Vec{1.0, 1.0}, cfg);
  const MonitorReport rep = monitor(arc, presets::flower_v(), RateFn{1e-6, 2.0});
  CHECK_FALSE(rep.pass);
  CHECK(rep.worst_sliding_rate > 0.0);
  REQUIRE(rep.worst.has_value());
  CHECK(rep.worst->sliding);
  CHECK(rep.worst->kind == "flow");
}

TEST_CASE("monitor: constant arc at the origin passes") {
  HybridArc arc;
  FlowSegment seg;
  for (int k = 0; k <= 10; ++k) {
    seg.t.push_back(0.1 * k);
    seg.x.push_back(Vec{0.0, 0.0});
    seg.sliding.push_back(0);
  }
  arc.segments.push_back(seg);
  const MonitorReport rep = monitor(arc, presets::clegg_vm(), RateFn{1.0, 2.0});
  CHECK(rep.pass);
  CHECK(rep.worst_flow_margin <= 0.0);
}

TEST_CASE("monitor: undefined V is a domain error") {
  SimConfig cfg = presets::circle_sim_config();
  cfg.t_max = 1.0;
  const HybridArc arc = simulate(presets::circle_system(), Vec{2.0, 2.0}, cfg);
  const ProperPiecewiseFn partial({{Region({Constraint::affine(Vec{-1.0, 0.0}, 0.0, Sense::geq)}),
                                    SmoothPiece::affine(Vec{0.0, 1.0}, 0.0)}});
  CHECK_THROWS_AS(monitor(arc, partial, RateFn{}), DomainError);
}
