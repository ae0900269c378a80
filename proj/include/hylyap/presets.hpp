#pragma once

// Built-in example systems and Lyapunov candidates. Every literal constant
// lives in src/presets.cpp.

#include <string>
#include <vector>

#include "hylyap/geometry.hpp"
#include "hylyap/hybrid.hpp"
#include "hylyap/piecewise.hpp"

namespace hylyap::presets {

// --- Flower: two-mode Filippov system switching on x^T Q x ---------------
Matrix flower_a1();
Matrix flower_a2();
SymMatrix flower_q();
SymMatrix flower_p1();
SymMatrix flower_p2();
HybridSystem flower_system();
/// max{x^T P1 x, x^T P2 x}.
LatticeExpr flower_v_expr();
ProperPiecewiseFn flower_v();
/// Angles of the switching locus x1 = +-x2 on the unit circle.
std::vector<double> flower_locus_angles();

// --- Circle: norm-scaled rotation on a circular arc ------------------------
CurveArc circle_arc();
HybridSystem circle_system();
/// Affine pieces x2 | x1 + 2 | 6 - x2 over x1 <= 0 | 0 <= x1 <= 2 | x1 >= 2.
ProperPiecewiseFn circle_v();
/// Arc parameters of the points where V is not differentiable on C:
/// (0,2), (2,2) and (2,0).
std::vector<double> circle_exceptional_params();
/// SimConfig defaults for the arc: projection onto the circle after each step.
SimConfig circle_sim_config();

// --- Clegg integrator with a regularized reset set -------------------------
inline constexpr double kCleggEpsilon = 0.1;
Matrix clegg_a_f();
Matrix clegg_a_j();
SymMatrix clegg_q(double eps = kCleggEpsilon);
HybridSystem clegg_system(double eps = kCleggEpsilon);

LatticeExpr clegg_vm_expr();
LatticeExpr clegg_vmid_expr();
ProperPiecewiseFn clegg_vm();
ProperPiecewiseFn clegg_vmid();
/// V_mid on C, <w, x>^2 on D.
ProperPiecewiseFn clegg_vconv(const Vec& w, double eps = kCleggEpsilon);
/// The vector w as printed alongside the convex construction.
Vec clegg_w_printed();
/// w matching V_mid on both boundary rays of D (x1 = 0 and x1 = x2 / eps).
Vec clegg_w_derived(double eps = kCleggEpsilon);
/// Unit directions spanning the two boundary rays of D in the upper half plane.
std::vector<Vec> clegg_boundary_rays(double eps = kCleggEpsilon);

// --- Registry ----------------------------------------------------------------
std::vector<std::string> system_names();
/// Throws UsageError for unknown names.
HybridSystem system_by_name(const std::string& name);
/// Simulation defaults for a preset (projection for the arc system).
SimConfig sim_config_for(const std::string& system_name);

std::vector<std::string> lyapunov_names();
/// "VM", "Vmid", "Vconv", "Vconv-printed", "flower-V", "circle-V".
ProperPiecewiseFn lyapunov_by_name(const std::string& name);
/// Lyapunov candidate paired with a system preset.
std::string default_lyapunov(const std::string& system_name);

}  // namespace hylyap::presets
