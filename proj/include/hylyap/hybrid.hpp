#pragma once

// Hybrid systems (C, D, F, G), an event-detecting RK4 simulator producing
// hybrid arcs, and along-trajectory Lyapunov monitoring.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hylyap/geometry.hpp"
#include "hylyap/piecewise.hpp"
#include "hylyap/setvalued.hpp"

namespace hylyap {

/// Jump map x+ = G(x): linear or identity.
class JumpMap {
 public:
  enum class Kind { identity, linear };

  static JumpMap identity() { return JumpMap{}; }
  static JumpMap linear(Matrix a) {
    JumpMap g;
    g.kind_ = Kind::linear;
    g.a_ = std::move(a);
    return g;
  }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const Matrix& a() const { return a_; }
  [[nodiscard]] Vec operator()(const Vec& x) const { return kind_ == Kind::linear ? a_ * x : x; }

 private:
  Kind kind_ = Kind::identity;
  Matrix a_;
};

struct HybridSystem {
  Region flow_set;
  std::optional<Region> jump_set;  ///< absent means D is empty
  FlowMap flow;
  JumpMap jump;

  [[nodiscard]] std::size_t dim() const { return flow.dim(); }
  /// C and D single conic constraints (or absent), linear flow and jump maps.
  [[nodiscard]] bool homogeneous() const;
  /// Throws UsageError on inconsistent dimensions.
  void validate() const;
};

enum class Priority { jump_first, flow_first };

enum class Termination { horizon, max_jumps, left_C_and_D, blow_up, sliding_escape };

std::string to_string(Termination t);
std::string to_string(Priority p);
Priority parse_priority(const std::string& s);

struct SimConfig {
  double dt = 1e-3;
  double t_max = 10.0;
  int j_max = 100;
  Priority priority = Priority::jump_first;
  double event_tol = 1e-10;
  double blow_up_radius = 1e6;
  /// Re-project onto this curve after each flow step (flows on measure-zero C).
  std::optional<CurveArc> manifold_projection;
  /// Slack for membership in C and D (normalized constraint units).
  double membership_tol = kMembershipSlack;
  /// Normalized distance |x^T Q x| / |x|^2 below which a Filippov state is
  /// treated as lying on the switching locus.
  double locus_tol = 1e-6;

  /// Throws UsageError unless dt > 0, t_max > 0, j_max >= 0, event_tol > 0.
  void validate() const;
};

/// Flow interval of a hybrid arc with constant jump counter j.
struct FlowSegment {
  int j = 0;
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<std::uint8_t> sliding;  ///< 1 where the sample moved along a Filippov surface

  [[nodiscard]] double t_start() const { return t.front(); }
  [[nodiscard]] double t_end() const { return t.back(); }
};

struct JumpEvent {
  double t = 0.0;
  int j = 0;  ///< counter before the jump
  Vec before;
  Vec after;
};

/// Solution on a hybrid time domain. Segment k + 1 starts at the image of the
/// last state of segment k under G.
struct HybridArc {
  std::vector<FlowSegment> segments;
  std::vector<JumpEvent> jumps;
  Termination termination = Termination::horizon;

  [[nodiscard]] const Vec& final_state() const { return segments.back().x.back(); }
  [[nodiscard]] double final_time() const { return segments.back().t.back(); }
  [[nodiscard]] std::size_t sample_count() const;
};

/// Simulates the hybrid system from x0.
///
/// Flows use classical RK4 with step cfg.dt. Leaving C is located by bisection
/// on the step length to cfg.event_tol; the first state outside C closes the
/// segment and, when it lies in D, jumps. Filippov maps switch modes on sign
/// changes of x^T Q x and slide along attractive surfaces with re-projection.
///
/// Throws DomainError if x0 is outside C and D, NumericError on a non-finite
/// state, and AmbiguousSliding if the flow reaches a repulsive or grazing
/// switching point.
HybridArc simulate(const HybridSystem& sys, const Vec& x0, const SimConfig& cfg);

/// Decrease rate rho(s) = c s^p; c = 0 encodes rho == 0.
struct RateFn {
  double c = 0.0;
  double p = 2.0;

  [[nodiscard]] double operator()(double s) const { return c == 0.0 ? 0.0 : c * std::pow(s, p); }
};

struct MonitorLocation {
  double t = 0.0;
  int j = 0;
  Vec x;
  bool sliding = false;
  std::string kind;  ///< "flow" or "jump"
};

struct MonitorReport {
  std::vector<double> segment_worst;  ///< max(dV/dt + rho) per segment, -inf if too short
  std::vector<double> jump_margins;   ///< V(x+) - V(x) + rho per jump
  double worst_flow_margin = -std::numeric_limits<double>::infinity();
  double worst_jump_margin = -std::numeric_limits<double>::infinity();
  /// Largest V(x_{k+1}) - V(x_k) over consecutive flow samples.
  double max_step_increase = -std::numeric_limits<double>::infinity();
  /// Largest dV/dt over sliding samples, -inf if none.
  double worst_sliding_rate = -std::numeric_limits<double>::infinity();
  std::optional<MonitorLocation> worst;
  double tol = 1e-6;
  bool pass = true;
};

/// Evaluates flow and jump decrease margins along an arc. dV/dt uses centered
/// differences on segment samples, one-sided at segment ends; neighbours closer
/// than 1e-9 in time are skipped. Throws DomainError when V is undefined at a
/// sampled state.
MonitorReport monitor(const HybridArc& arc, const ProperPiecewiseFn& v, const RateFn& rho,
                      const SetDistance& dist = {}, double tol = 1e-6);

}  // namespace hylyap
