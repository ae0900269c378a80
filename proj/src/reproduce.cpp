#include "hylyap/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hylyap/certify.hpp"
#include "hylyap/errors.hpp"
#include "hylyap/hybrid.hpp"
#include "hylyap/levelset.hpp"
#include "hylyap/presets.hpp"

namespace hylyap {

namespace {

using io::Json;

const char* verdict(bool pass) { return pass ? "pass" : "fail"; }

std::vector<Vec> line_points(const Vec& direction, std::size_t n, double lo, double hi) {
  std::vector<Vec> pts;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    pts.push_back(s * direction);
  }
  return pts;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw UsageError("cannot write '" + p.string() + "'");
  out << text;
}

void write_arc(const std::filesystem::path& p, const HybridArc& arc, const ProperPiecewiseFn& v) {
  std::ofstream out(p);
  if (!out) throw UsageError("cannot write '" + p.string() + "'");
  io::write_trajectory_csv(out, arc, &v);
}

std::vector<Overlay> overlays_of(const HybridArc& arc) {
  std::vector<Overlay> out;
  for (const auto& seg : arc.segments) {
    Overlay ov;
    for (const auto& x : seg.x) ov.points.push_back({x[0], x[1]});
    if (ov.points.size() > 1) out.push_back(std::move(ov));
  }
  return out;
}

void write_levelset(const std::filesystem::path& p, const ProperPiecewiseFn& v,
                    const std::vector<double>& levels, const BBox& box, const HybridArc* arc) {
  std::vector<ContourSet> sets;
  const auto f = grid_function(v);
  for (double level : levels) sets.push_back({level, marching_squares(f, level, box, 300)});
  write_text(p, render_svg(sets, box, arc ? overlays_of(*arc) : std::vector<Overlay>{}));
}

Json monitor_json(const MonitorReport& m) { return io::to_json(m); }

ReproduceResult run_flower(const std::filesystem::path& dir, const SamplingOptions& opts) {
  const HybridSystem sys = presets::flower_system();
  const ProperPiecewiseFn v = presets::flower_v();
  const RateFn rho{1e-6, 2.0};

  const auto circle = Sampler::unit_circle(3600, presets::flower_locus_angles()).points();
  CheckReport dense = dense_decrease_check(v, sys.flow, sys.flow_set, circle, rho);

  const Vec diag{1.0, 1.0};
  CheckReport clarke = clarke_check(v, sys.flow, line_points(diag, 100, 0.1, 10.0), rho, {}, opts);

  SimConfig cfg;
  cfg.t_max = 2.0;
  const HybridArc arc = simulate(sys, Vec{1.0, 1.0}, cfg);
  const double predicted = std::sqrt(2.0) * std::exp(3.4);
  const double rel = std::abs(arc.final_state().norm() - predicted) / predicted;
  const MonitorReport mon = monitor(arc, v, rho);
  const bool escape = rel <= 0.01 && mon.worst_sliding_rate > 0.0 && !mon.pass;

  write_arc(dir / "trajectory.csv", arc, v);
  write_levelset(dir / "levelset.svg", v, {1.0, 5.0, 20.0}, BBox{-3, -3, 3, 3}, &arc);
  io::write_json_file(dir / "lyapunov.json", io::to_json(v));
  io::write_json_file(dir / "reports.json",
                      Json{{"dense", io::to_json(dense)}, {"clarke_on_locus", io::to_json(clarke)},
                           {"monitor", monitor_json(mon)},
                           {"escape", {{"final_norm", arc.final_state().norm()},
                                       {"predicted", predicted},
                                       {"relative_error", rel},
                                       {"termination", to_string(arc.termination)}}}});
  ReproduceResult r;
  r.observed = {{"dense", verdict(dense.pass)}, {"clarke_on_locus", verdict(clarke.pass)}, {"escape", escape}};
  r.expected = {{"dense", "pass"}, {"clarke_on_locus", "fail"}, {"escape", true}};
  return r;
}

ReproduceResult run_circle(const std::filesystem::path& dir) {
  const HybridSystem sys = presets::circle_system();
  const ProperPiecewiseFn v = presets::circle_v();
  const CurveArc arc_c = presets::circle_arc();

  const auto all = Sampler::curve(arc_c, 10000).points();
  CheckReport bounds = bounds_check(v, all, {}, BoundsSpec{{0.5, 1.0}, {3.0, 1.0}});
  const auto off = Sampler::curve(arc_c, 10000, presets::circle_exceptional_params()).points();
  CheckReport dense = dense_decrease_check(v, sys.flow, sys.flow_set, off, RateFn{1.0, 1.0});

  SimConfig cfg = presets::circle_sim_config();
  cfg.t_max = 20.0;
  const HybridArc arc = simulate(sys, Vec{2.0, 2.0}, cfg);
  double hit = -1.0;
  for (const auto& seg : arc.segments) {
    for (std::size_t k = 0; k < seg.t.size() && hit < 0.0; ++k) {
      if (seg.x[k].norm() < 1e-3) hit = seg.t[k];
    }
  }
  const bool converges = hit >= 0.0 && hit < 20.0;

  write_arc(dir / "trajectory.csv", arc, v);
  io::write_json_file(dir / "lyapunov.json", io::to_json(v));
  io::write_json_file(dir / "reports.json",
                      Json{{"bounds", io::to_json(bounds)},
                           {"dense", io::to_json(dense)},
                           {"simulation", {{"reached_1e-3_at", hit >= 0.0 ? Json(hit) : Json(nullptr)},
                                           {"final_norm", arc.final_state().norm()},
                                           {"termination", to_string(arc.termination)}}}});
  ReproduceResult r;
  r.observed = {{"bounds", verdict(bounds.pass)}, {"dense", verdict(dense.pass)}, {"converges", converges}};
  r.expected = {{"bounds", "pass"}, {"dense", "pass"}, {"converges", true}};
  return r;
}

ReproduceResult run_clegg_lattice(const std::string& name, const std::filesystem::path& dir,
                                  const SamplingOptions& opts) {
  const HybridSystem sys = presets::clegg_system();
  const ProperPiecewiseFn v = presets::lyapunov_by_name(presets::default_lyapunov(name));
  const HomogeneousCertificate cert = certify_homogeneous(sys, v);

  const Vec up{0.0, 1.0};
  CheckReport clarke = clarke_check(v, sys.flow, line_points(up, 100, 0.1, 10.0), RateFn{}, {}, opts);

  SimConfig cfg;
  cfg.t_max = 20.0;
  const HybridArc arc = simulate(sys, Vec{-2.0, 0.5}, cfg);
  const MonitorReport mon = monitor(arc, v, RateFn{1e-6, 2.0});
  const ConvexityReport conv = midpoint_convexity(v, 1.0);

  write_arc(dir / "trajectory.csv", arc, v);
  write_levelset(dir / "levelset.svg", v, {1.0}, BBox{-3, -3, 3, 3}, &arc);
  io::write_json_file(dir / "lyapunov.json", io::to_json(v));
  io::write_json_file(dir / "reports.json",
                      Json{{"bounds", io::to_json(cert.bounds)},
                           {"flow", io::to_json(cert.flow)},
                           {"jump", io::to_json(cert.jump)},
                           {"clarke_on_line", io::to_json(clarke)},
                           {"monitor", monitor_json(mon)},
                           {"convexity", {{"worst_midpoint_value", conv.worst_value}, {"convex", conv.convex}}}});
  ReproduceResult r;
  r.observed = {{"ugas", cert.ugas()},
                {"clarke_on_line", verdict(clarke.pass)},
                {"monitor", verdict(mon.pass)},
                {"convex_level_set", conv.convex}};
  r.expected = {{"ugas", true}, {"clarke_on_line", "fail"}, {"monitor", "pass"}, {"convex_level_set", false}};
  return r;
}

ReproduceResult run_clegg_conv(const std::filesystem::path& dir) {
  const HybridSystem sys = presets::clegg_system();
  const Vec w_printed = presets::clegg_w_printed();
  const Vec w_derived = presets::clegg_w_derived();
  const ProperPiecewiseFn v_printed = presets::clegg_vconv(w_printed);
  const ProperPiecewiseFn v_derived = presets::clegg_vconv(w_derived);

  std::vector<Vec> rays_pts;
  for (const auto& u : presets::clegg_boundary_rays()) {
    for (double sign : {1.0, -1.0}) {
      const auto pts = line_points(sign * u, 50, 0.1, 10.0);
      rays_pts.insert(rays_pts.end(), pts.begin(), pts.end());
    }
  }
  CheckReport cont_printed = continuity_check(v_printed, rays_pts);
  CheckReport cont_derived = continuity_check(v_derived, rays_pts);
  const HomogeneousCertificate cert = certify_homogeneous(sys, v_derived);
  const ConvexityReport conv = midpoint_convexity(v_derived, 1.0);

  SimConfig cfg;
  cfg.t_max = 20.0;
  const HybridArc arc = simulate(sys, Vec{-2.0, 0.5}, cfg);
  write_arc(dir / "trajectory.csv", arc, v_derived);
  write_levelset(dir / "levelset.svg", v_derived, {1.0}, BBox{-3, -3, 3, 3}, &arc);
  io::write_json_file(dir / "lyapunov.json", io::to_json(v_derived));
  io::write_json_file(dir / "reports.json",
                      Json{{"w_printed", io::to_json(w_printed)},
                           {"w_derived", io::to_json(w_derived)},
                           {"continuity_printed", io::to_json(cont_printed)},
                           {"continuity_derived", io::to_json(cont_derived)},
                           {"bounds", io::to_json(cert.bounds)},
                           {"flow", io::to_json(cert.flow)},
                           {"jump", io::to_json(cert.jump)},
                           {"convexity", {{"worst_midpoint_value", conv.worst_value}, {"convex", conv.convex}}}});
  ReproduceResult r;
  r.observed = {{"continuity_printed", verdict(cont_printed.pass)},
                {"continuity_derived", verdict(cont_derived.pass)},
                {"flow_jump_derived", verdict(cert.flow.pass && cert.jump.pass)},
                {"convex_level_set", conv.convex}};
  r.expected = {{"continuity_printed", "fail"},
                {"continuity_derived", "pass"},
                {"flow_jump_derived", "pass"},
                {"convex_level_set", true}};
  return r;
}

}  // namespace

std::vector<std::string> reproducible_names() { return presets::system_names(); }

ReproduceResult reproduce(const std::string& name, const std::filesystem::path& dir, std::uint64_t seed) {
  const auto names = reproducible_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw UsageError("unknown example '" + name + "'");
  }
  std::filesystem::create_directories(dir);
  SamplingOptions opts;
  opts.seed = seed;

  ReproduceResult r;
  if (name == "flower") {
    r = run_flower(dir, opts);
  } else if (name == "circle") {
    r = run_circle(dir);
  } else if (name == "clegg-conv") {
    r = run_clegg_conv(dir);
  } else {
    r = run_clegg_lattice(name, dir, opts);
  }
  io::write_json_file(dir / "system.json", io::to_json(presets::system_by_name(name)));
  r.matches = r.observed == r.expected;
  io::write_json_file(dir / "verdict.json",
                      Json{{"example", name}, {"observed", r.observed}, {"expected", r.expected}, {"matches", r.matches}});
  return r;
}

}  // namespace hylyap
