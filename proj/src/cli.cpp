#include "hylyap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "hylyap/certify.hpp"
#include "hylyap/errors.hpp"
#include "hylyap/hybrid.hpp"
#include "hylyap/io.hpp"
#include "hylyap/levelset.hpp"
#include "hylyap/presets.hpp"
#include "hylyap/reproduce.hpp"

namespace hylyap::cli {

namespace {

using io::Json;

bool is_in(const std::vector<std::string>& names, const std::string& s) {
  return std::find(names.begin(), names.end(), s) != names.end();
}

std::uint64_t sampling_seed() {
  const char* env = std::getenv("HYLYAP_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used, 0);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("HYLYAP_SEED is not an unsigned integer: '") + env + "'");
  }
}

struct LoadedSystem {
  std::string name;  ///< preset name, or the file path
  bool preset = false;
  HybridSystem sys;
};

LoadedSystem load_system(const std::string& spec) {
  if (is_in(presets::system_names(), spec)) return {spec, true, presets::system_by_name(spec)};
  return {spec, false, io::system_from_json(io::read_json_file(spec))};
}

ProperPiecewiseFn load_lyapunov(const std::string& spec) {
  if (is_in(presets::lyapunov_names(), spec)) return presets::lyapunov_by_name(spec);
  return io::lyapunov_from_json(io::read_json_file(spec));
}

RateFn parse_rate(const std::string& text) {
  const auto v = io::parse_csv_numbers(text);
  if (v.size() != 2 || v[0] < 0.0 || !(v[1] > 0.0)) throw UsageError("rate must be 'c,p' with c >= 0, p > 0");
  return RateFn{v[0], v[1]};
}

Monomial parse_monomial(const std::string& text) {
  const auto v = io::parse_csv_numbers(text);
  if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > 0.0)) throw UsageError("bound must be 'c,p' with c > 0, p > 0");
  return Monomial{v[0], v[1]};
}

std::vector<Vec> line_points(const Vec& dir) {
  std::vector<Vec> pts;
  for (int k = 0; k < 100; ++k) pts.push_back((0.1 + 9.9 * k / 99.0) * dir);
  return pts;
}

/// "line-x1=0", "line-x1=x2" or explicit "x1,x2;x1,x2".
std::vector<Vec> parse_points(const std::string& text, std::size_t dim) {
  if (text == "line-x1=0") return line_points(Vec{0.0, 1.0});
  if (text == "line-x1=x2") return line_points(Vec{1.0, 1.0});
  std::vector<Vec> pts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    Vec p(io::parse_csv_numbers(item));
    if (p.size() != dim) throw UsageError("point '" + item + "' has the wrong dimension");
    pts.push_back(std::move(p));
  }
  if (pts.empty()) throw UsageError("no points given");
  return pts;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string system;
  std::string x0;
  double tmax = 10.0;
  int jmax = 100;
  double dt = 1e-3;
  std::string priority = "jump-first";
  std::string out;
  std::string lyapunov;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const LoadedSystem ls = load_system(a.system);
  const Vec x0(io::parse_csv_numbers(a.x0));
  if (x0.size() != ls.sys.dim()) throw UsageError("--x0 has the wrong dimension");
  SimConfig cfg = ls.preset ? presets::sim_config_for(ls.name) : SimConfig{};
  cfg.t_max = a.tmax;
  cfg.j_max = a.jmax;
  cfg.dt = a.dt;
  cfg.priority = parse_priority(a.priority);
  std::optional<ProperPiecewiseFn> v;
  if (!a.lyapunov.empty()) v = load_lyapunov(a.lyapunov);

  const HybridArc arc = simulate(ls.sys, x0, cfg);
  std::ostringstream csv;
  io::write_trajectory_csv(csv, arc, v ? &*v : nullptr);
  write_output(a.out, csv.str(), out);
  err << "termination=" << to_string(arc.termination) << " t=" << io::format_number(arc.final_time())
      << " jumps=" << arc.jumps.size() << " |x|=" << io::format_number(arc.final_state().norm()) << '\n';
  return kPass;
}

// ---------------------------------------------------------------------------

struct CertifyArgs {
  std::string system;
  std::string lyapunov;
  std::size_t grid = 3600;
  std::string report;
  std::string checks = "bounds,flow,jump";
  std::string points;
  std::string rho = "1e-6,2";
  std::string alpha1;
  std::string alpha2;
};

int cmd_certify(const CertifyArgs& a, std::ostream& out, std::ostream& err) {
  const LoadedSystem ls = load_system(a.system);
  std::string lyap_name = a.lyapunov;
  if (lyap_name.empty()) {
    if (!ls.preset) throw UsageError("--lyapunov is required for systems loaded from files");
    lyap_name = presets::default_lyapunov(ls.name);
  }
  const ProperPiecewiseFn v = load_lyapunov(lyap_name);
  if (v.dim() != ls.sys.dim()) throw UsageError("Lyapunov candidate and system dimensions differ");
  if (a.grid == 0) throw UsageError("--grid must be positive");
  const RateFn rho = parse_rate(a.rho);
  SamplingOptions opts;
  opts.seed = sampling_seed();

  std::vector<std::string> checks;
  {
    std::stringstream ss(a.checks);
    std::string c;
    while (std::getline(ss, c, ',')) {
      if (!is_in({"bounds", "flow", "jump", "clarke", "dense"}, c)) throw UsageError("unknown check '" + c + "'");
      checks.push_back(c);
    }
  }
  if (checks.empty()) throw UsageError("no checks selected");

  const HybridSystem& sys = ls.sys;
  const bool homogeneous = sys.homogeneous() && v.homogeneous();
  const auto grid = Sampler::unit_circle(a.grid).points();
  auto domain_points = [&]() {
    if (sys.flow_set.curve()) return Sampler::curve(*sys.flow_set.curve(), a.grid).points();
    if (sys.dim() != 2) throw UsageError("sampled checks need a planar system");
    return grid;
  };

  std::vector<CheckReport> reports;
  for (const auto& c : checks) {
    if (c == "bounds") {
      if (!a.alpha1.empty() || !a.alpha2.empty()) {
        if (a.alpha1.empty() || a.alpha2.empty()) throw UsageError("--alpha1 and --alpha2 go together");
        const BoundsSpec spec{parse_monomial(a.alpha1), parse_monomial(a.alpha2)};
        std::vector<Vec> pts = sys.flow_set.curve() ? domain_points() : homogeneous_bounds_directions(sys, grid);
        reports.push_back(bounds_check(v, pts, {}, spec));
      } else {
        if (!homogeneous) throw UsageError("bounds inference needs a homogeneous system; pass --alpha1/--alpha2");
        reports.push_back(bounds_check(v, homogeneous_bounds_directions(sys, grid)));
      }
    } else if (c == "flow") {
      if (!homogeneous) throw UsageError("the flow check needs a homogeneous system and candidate");
      reports.push_back(homogeneous_flow_check(v, sys.flow.a(), conic_form(sys.flow_set), grid));
    } else if (c == "jump") {
      if (!homogeneous || !sys.jump_set) throw UsageError("the jump check needs a homogeneous system with a jump set");
      const Matrix a_j = sys.jump.kind() == JumpMap::Kind::linear ? sys.jump.a() : Matrix::identity(sys.dim());
      reports.push_back(homogeneous_jump_check(v, a_j, conic_form(*sys.jump_set), grid));
    } else if (c == "dense") {
      reports.push_back(dense_decrease_check(v, sys.flow, sys.flow_set, domain_points(), rho));
    } else if (c == "clarke") {
      const std::vector<Vec> pts = a.points.empty() ? domain_points() : parse_points(a.points, sys.dim());
      reports.push_back(clarke_check(v, sys.flow, pts, rho, {}, opts));
    }
  }

  const bool all_pass = std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
  Json doc;
  doc["system"] = ls.name;
  doc["lyapunov"] = lyap_name;
  doc["pass"] = all_pass;
  doc["caveat"] = kSamplingCaveat;
  doc["checks"] = Json::array();
  for (const auto& r : reports) doc["checks"].push_back(io::to_json(r));
  if (a.report.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    io::write_json_file(a.report, doc);
  }
  for (const auto& r : reports) {
    err << r.check << ": " << (r.pass ? "pass" : "FAIL") << " worst_margin=" << io::format_number(r.worst_margin)
        << " counterexamples=" << r.counterexamples.size() << '\n';
  }
  return all_pass ? kPass : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct LevelsetArgs {
  std::string lyapunov;
  std::string levels = "1";
  std::string bbox = "-3,-3,3,3";
  std::size_t res = 400;
  std::string out;
  std::string overlay;
  bool convexity = false;
};

int cmd_levelset(const LevelsetArgs& a, std::ostream& out, std::ostream& err) {
  const ProperPiecewiseFn v = load_lyapunov(a.lyapunov);
  const auto levels = io::parse_csv_numbers(a.levels);
  const auto b = io::parse_csv_numbers(a.bbox);
  if (b.size() != 4 || !(b[2] > b[0]) || !(b[3] > b[1])) throw UsageError("--bbox must be 'x0,y0,x1,y1'");
  if (a.res == 0) throw UsageError("--res must be positive");
  const BBox box{b[0], b[1], b[2], b[3]};

  std::vector<Overlay> overlays;
  if (!a.overlay.empty()) {
    std::ifstream in(a.overlay);
    if (!in) throw UsageError("cannot open '" + a.overlay + "'");
    const auto rows = io::read_trajectory_csv(in);
    int current = -1;
    for (const auto& r : rows) {
      if (r.x.size() < 2) throw UsageError("overlay trajectory must be planar");
      if (r.j != current || overlays.empty()) {
        overlays.emplace_back();
        current = r.j;
      }
      overlays.back().points.push_back({r.x[0], r.x[1]});
    }
  }

  const auto f = grid_function(v);
  std::vector<ContourSet> sets;
  for (double level : levels) {
    ContourSet cs{level, marching_squares(f, level, box, a.res)};
    if (cs.lines.empty()) err << "warning: level " << io::format_number(level) << " has no contour in the box\n";
    sets.push_back(std::move(cs));
  }
  write_output(a.out, render_svg(sets, box, overlays), out);
  if (a.convexity) {
    for (double level : levels) {
      const ConvexityReport c = midpoint_convexity(v, level);
      err << "level " << io::format_number(level) << ": " << (c.convex ? "convex" : "nonconvex")
          << " worst_midpoint_value=" << io::format_number(c.worst_value) << '\n';
    }
  }
  return kPass;
}

// ---------------------------------------------------------------------------

int cmd_reproduce(const std::string& name, const std::string& dir, std::ostream& out) {
  const std::string target = dir.empty() ? "reproduce-" + name : dir;
  const ReproduceResult r = reproduce(name, target, sampling_seed());
  out << Json{{"example", name}, {"observed", r.observed}, {"expected", r.expected}, {"matches", r.matches}}.dump(2)
      << '\n';
  return r.matches ? kPass : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Piecewise Lyapunov certificates for hybrid and Filippov systems", "hylyap"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate a hybrid system and write a trajectory CSV");
  s->add_option("--system", sim.system, "Preset name or system JSON file")->required();
  s->add_option("--x0", sim.x0, "Initial state, comma separated")->required();
  s->add_option("--tmax", sim.tmax, "Flow-time horizon")->capture_default_str();
  s->add_option("--jmax", sim.jmax, "Maximum number of jumps")->capture_default_str();
  s->add_option("--dt", sim.dt, "RK4 step")->capture_default_str();
  s->add_option("--priority", sim.priority, "jump-first or flow-first on C and D")->capture_default_str();
  s->add_option("--out", sim.out, "Output CSV (default: stdout)");
  s->add_option("--lyapunov", sim.lyapunov, "Add a V column (preset name or JSON file)");

  CertifyArgs cer;
  auto* c = app.add_subcommand("certify", "Run sampled certification checks and write a JSON report");
  c->add_option("--system", cer.system, "Preset name or system JSON file")->required();
  c->add_option("--lyapunov", cer.lyapunov, "Preset name or Lyapunov JSON file");
  c->add_option("--grid", cer.grid, "Unit-circle (or curve) grid size")->capture_default_str();
  c->add_option("--report", cer.report, "Report JSON path (default: stdout)");
  c->add_option("--checks", cer.checks, "Comma list of bounds,flow,jump,clarke,dense")->capture_default_str();
  c->add_option("--points", cer.points, "Clarke points: line-x1=0, line-x1=x2 or 'x1,x2;x1,x2'");
  c->add_option("--rho", cer.rho, "Decrease rate c,p for rho(s) = c s^p")->capture_default_str();
  c->add_option("--alpha1", cer.alpha1, "Lower bound c,p (bounds in spec mode)");
  c->add_option("--alpha2", cer.alpha2, "Upper bound c,p (bounds in spec mode)");

  LevelsetArgs lev;
  auto* l = app.add_subcommand("levelset", "Render level sets of a Lyapunov candidate as SVG");
  l->add_option("--lyapunov", lev.lyapunov, "Preset name or Lyapunov JSON file")->required();
  l->add_option("--levels", lev.levels, "Comma separated levels")->capture_default_str();
  l->add_option("--bbox", lev.bbox, "x0,y0,x1,y1")->capture_default_str();
  l->add_option("--res", lev.res, "Raster cells per axis")->capture_default_str();
  l->add_option("--out", lev.out, "Output SVG (default: stdout)");
  l->add_option("--overlay", lev.overlay, "Trajectory CSV to draw on top");
  l->add_flag("--convexity", lev.convexity, "Report the midpoint-convexity test per level");

  std::string rep_name;
  std::string rep_dir;
  auto* r = app.add_subcommand("reproduce", "Reproduce a built-in example and compare verdicts");
  r->add_option("name", rep_name, "flower, circle, clegg-max, clegg-mid or clegg-conv")->required();
  r->add_option("--out", rep_dir, "Output directory (default: reproduce-<name>)");

  std::vector<std::string> argv_store{"hylyap"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*s) return cmd_simulate(sim, out, err);
    if (*c) return cmd_certify(cer, out, err);
    if (*l) return cmd_levelset(lev, out, err);
    if (*r) return cmd_reproduce(rep_name, rep_dir, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const HypothesisError& e) {
    err << "hypothesis not met: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << " (t=" << io::format_number(e.time()) << ")\n";
    return kNumericFailure;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::domain_error& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kUsage;
}

}  // namespace hylyap::cli
