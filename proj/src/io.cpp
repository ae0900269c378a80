#include "hylyap/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hylyap/errors.hpp"

namespace hylyap::io {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw UsageError(std::string("JSON: missing key '") + key + "'");
  }
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw UsageError(std::string("JSON: expected a number for ") + what);
  return j.get<double>();
}

std::string type_of(const Json& j) {
  const Json& t = require(j, "type");
  if (!t.is_string()) throw UsageError("JSON: 'type' must be a string");
  return t.get<std::string>();
}

std::vector<std::vector<double>> rows_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw UsageError("JSON: matrix must be a nonempty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw UsageError("JSON: matrix rows must be arrays");
    std::vector<double> row;
    for (const auto& e : r) row.push_back(number(e, "matrix entry"));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Adds the smooth-piece keys to an object.
void put_piece(Json& j, const SmoothPiece& p) {
  switch (p.kind()) {
    case SmoothPiece::Kind::quadratic:
      j["P"] = to_json(p.p());
      break;
    case SmoothPiece::Kind::squared_linear:
      j["w"] = to_json(p.w());
      break;
    case SmoothPiece::Kind::affine:
      j["a"] = to_json(p.a());
      j["b"] = p.b();
      break;
  }
}

SmoothPiece piece_from_keys(const Json& j) {
  if (j.contains("P")) return SmoothPiece::quadratic(sym_from_json(j.at("P")));
  if (j.contains("w")) return SmoothPiece::squared_linear(vec_from_json(j.at("w")));
  if (j.contains("a")) return SmoothPiece::affine(vec_from_json(j.at("a")), number(require(j, "b"), "b"));
  throw UsageError("JSON: piece needs one of 'P', 'w' or 'a'");
}

std::vector<LatticeExpr> children_from_json(const Json& j) {
  const Json& args = require(j, "args");
  if (!args.is_array() || args.empty()) throw UsageError("JSON: 'args' must be a nonempty array");
  std::vector<LatticeExpr> out;
  for (const auto& a : args) out.push_back(lattice_from_json(a));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Encoding

Json to_json(const Vec& v) { return Json(v.values()); }
Json to_json(const Matrix& m) { return Json(m.rows()); }
Json to_json(const SymMatrix& s) { return Json(s.rows()); }

Json to_json(const Constraint& c) {
  Json j;
  j["R"] = to_json(c.form());
  if (!c.is_conic()) {
    j["q"] = to_json(c.linear());
    j["c"] = c.constant();
  }
  j["sense"] = to_string(c.sense());
  return j;
}

Json to_json(const Region& r) {
  Json j;
  j["constraints"] = Json::array();
  for (const auto& c : r.constraints()) j["constraints"].push_back(to_json(c));
  if (r.curve()) {
    const CurveArc& a = *r.curve();
    j["curve"] = {{"center", to_json(a.center())}, {"radius", a.radius()}, {"t_range", {a.t_min(), a.t_max()}}};
  }
  return j;
}

Json to_json(const SmoothPiece& p) {
  Json j;
  switch (p.kind()) {
    case SmoothPiece::Kind::quadratic:
      j["type"] = "quad";
      break;
    case SmoothPiece::Kind::squared_linear:
      j["type"] = "sqlinear";
      break;
    case SmoothPiece::Kind::affine:
      j["type"] = "affine";
      break;
  }
  put_piece(j, p);
  return j;
}

Json to_json(const LatticeExpr& e) {
  if (e.op() == LatticeExpr::Op::leaf) return to_json(e.piece());
  Json j;
  switch (e.op()) {
    case LatticeExpr::Op::max:
      j["type"] = "max";
      break;
    case LatticeExpr::Op::min:
      j["type"] = "min";
      break;
    default:
      j["type"] = "mid";
      break;
  }
  j["args"] = Json::array();
  for (const auto& c : e.children()) j["args"].push_back(to_json(c));
  return j;
}

Json to_json(const ProperPiecewiseFn& f) {
  Json j;
  j["type"] = "pieces";
  j["pieces"] = Json::array();
  for (const auto& p : f.pieces()) {
    Json e;
    e["region"] = to_json(p.region);
    put_piece(e, p.fn);
    j["pieces"].push_back(std::move(e));
  }
  return j;
}

Json to_json(const FlowMap& f) {
  Json j;
  switch (f.kind()) {
    case FlowMap::Kind::linear:
      j["type"] = "linear";
      j["A"] = to_json(f.a());
      break;
    case FlowMap::Kind::norm_scaled_affine:
      j["type"] = "norm_scaled_affine";
      j["A"] = to_json(f.a());
      j["b"] = to_json(f.b());
      break;
    case FlowMap::Kind::filippov2:
      j["type"] = "filippov2";
      j["A1"] = to_json(f.a());
      j["A2"] = to_json(f.a2());
      j["Q"] = to_json(f.q());
      break;
  }
  return j;
}

Json to_json(const JumpMap& g) {
  if (g.kind() == JumpMap::Kind::identity) return Json{{"type", "identity"}};
  return Json{{"type", "linear"}, {"A", to_json(g.a())}};
}

Json to_json(const HybridSystem& s) {
  Json j;
  j["C"] = to_json(s.flow_set);
  j["D"] = s.jump_set ? to_json(*s.jump_set) : Json(nullptr);
  j["flow"] = to_json(s.flow);
  j["jump"] = to_json(s.jump);
  return j;
}

Json to_json(const CheckReport& r) {
  Json j;
  j["check"] = r.check;
  j["pass"] = r.pass;
  j["worst_margin"] = r.worst_margin;
  j["evaluated"] = r.evaluated;
  j["caveat"] = kSamplingCaveat;
  j["counterexamples"] = Json::array();
  for (const auto& c : r.counterexamples) {
    Json e;
    e["x"] = to_json(c.x);
    e["piece"] = c.piece;
    e["value"] = c.value;
    if (!c.detail.empty()) e["detail"] = c.detail;
    j["counterexamples"].push_back(std::move(e));
  }
  j["params"] = r.params;
  return j;
}

Json to_json(const InfeasibilityReport& r) {
  Json j;
  j["check"] = "quadratic_infeasibility";
  j["infeasible"] = r.infeasible;
  j["probes"] = Json::array();
  for (std::size_t k = 0; k < r.probes.size(); ++k) {
    j["probes"].push_back({{"z", to_json(r.probes[k])}, {"value", r.values[k]}});
  }
  return j;
}

Json to_json(const MonitorReport& r) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  Json j;
  j["check"] = "monitor";
  j["pass"] = r.pass;
  j["tol"] = r.tol;
  j["worst_flow_margin"] = finite_or_null(r.worst_flow_margin);
  j["worst_jump_margin"] = finite_or_null(r.worst_jump_margin);
  j["max_step_increase"] = finite_or_null(r.max_step_increase);
  j["worst_sliding_rate"] = finite_or_null(r.worst_sliding_rate);
  j["segments"] = r.segment_worst.size();
  j["jumps"] = r.jump_margins.size();
  if (r.worst) {
    j["worst"] = {{"kind", r.worst->kind},
                  {"t", r.worst->t},
                  {"j", r.worst->j},
                  {"x", to_json(r.worst->x)},
                  {"sliding", r.worst->sliding}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// Decoding

Vec vec_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw UsageError("JSON: vector must be a nonempty array");
  std::vector<double> v;
  for (const auto& e : j) v.push_back(number(e, "vector entry"));
  return Vec(std::move(v));
}

Matrix matrix_from_json(const Json& j) { return Matrix::from_rows(rows_from_json(j)); }
SymMatrix sym_from_json(const Json& j) { return SymMatrix::from_rows(rows_from_json(j)); }

Region region_from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("JSON: region must be an object");
  std::vector<Constraint> cs;
  if (j.contains("constraints")) {
    const Json& arr = j.at("constraints");
    if (!arr.is_array()) throw UsageError("JSON: 'constraints' must be an array");
    for (const auto& c : arr) {
      const SymMatrix r = sym_from_json(require(c, "R"));
      const Json& s = require(c, "sense");
      if (!s.is_string()) throw UsageError("JSON: 'sense' must be a string");
      const Sense sense = parse_sense(s.get<std::string>());
      if (c.contains("q") || c.contains("c")) {
        const Vec q = c.contains("q") ? vec_from_json(c.at("q")) : Vec(r.dim());
        const double k = c.contains("c") ? number(c.at("c"), "c") : 0.0;
        cs.emplace_back(r, q, k, sense);
      } else {
        cs.emplace_back(r, sense);
      }
    }
  }
  std::optional<CurveArc> curve;
  if (j.contains("curve")) {
    const Json& cj = j.at("curve");
    const Json& range = require(cj, "t_range");
    if (!range.is_array() || range.size() != 2) throw UsageError("JSON: 't_range' needs two numbers");
    curve = CurveArc(vec_from_json(require(cj, "center")), number(require(cj, "radius"), "radius"),
                     number(range[0], "t_range"), number(range[1], "t_range"));
  }
  return Region(std::move(cs), std::move(curve));
}

SmoothPiece piece_from_json(const Json& j) {
  const std::string t = type_of(j);
  if (t == "quad") return SmoothPiece::quadratic(sym_from_json(require(j, "P")));
  if (t == "sqlinear") return SmoothPiece::squared_linear(vec_from_json(require(j, "w")));
  if (t == "affine") return SmoothPiece::affine(vec_from_json(require(j, "a")), number(require(j, "b"), "b"));
  throw UsageError("JSON: unknown piece type '" + t + "'");
}

LatticeExpr lattice_from_json(const Json& j) {
  const std::string t = type_of(j);
  if (t == "max") return LatticeExpr::max(children_from_json(j));
  if (t == "min") return LatticeExpr::min(children_from_json(j));
  if (t == "mid") {
    auto c = children_from_json(j);
    if (c.size() != 3) throw UsageError("JSON: 'mid' takes exactly three arguments");
    return LatticeExpr::mid(std::move(c[0]), std::move(c[1]), std::move(c[2]));
  }
  return LatticeExpr::leaf(piece_from_json(j));
}

ProperPiecewiseFn lyapunov_from_json(const Json& j) {
  if (j.is_object() && j.contains("pieces") && (!j.contains("type") || type_of(j) == "pieces")) {
    const Json& arr = j.at("pieces");
    if (!arr.is_array()) throw UsageError("JSON: 'pieces' must be an array");
    std::vector<Piece> pieces;
    for (const auto& p : arr) {
      Region r = p.contains("region") ? region_from_json(p.at("region")) : Region::everything();
      pieces.push_back({std::move(r), piece_from_keys(p)});
    }
    return ProperPiecewiseFn(std::move(pieces));
  }
  const LatticeExpr e = lattice_from_json(j);
  if (e.op() == LatticeExpr::Op::leaf) return ProperPiecewiseFn::single(e.piece());
  return flatten(e);
}

FlowMap flow_from_json(const Json& j) {
  const std::string t = type_of(j);
  if (t == "linear") return FlowMap::linear(matrix_from_json(require(j, "A")));
  if (t == "norm_scaled_affine") {
    return FlowMap::norm_scaled_affine(matrix_from_json(require(j, "A")), vec_from_json(require(j, "b")));
  }
  if (t == "filippov2") {
    return FlowMap::filippov2(matrix_from_json(require(j, "A1")), matrix_from_json(require(j, "A2")),
                              sym_from_json(require(j, "Q")));
  }
  throw UsageError("JSON: unknown flow type '" + t + "'");
}

JumpMap jump_from_json(const Json& j) {
  const std::string t = type_of(j);
  if (t == "identity") return JumpMap::identity();
  if (t == "linear") return JumpMap::linear(matrix_from_json(require(j, "A")));
  throw UsageError("JSON: unknown jump type '" + t + "'");
}

HybridSystem system_from_json(const Json& j) {
  HybridSystem s;
  s.flow_set = j.contains("C") ? region_from_json(j.at("C")) : Region::everything();
  if (j.contains("D") && !j.at("D").is_null()) s.jump_set = region_from_json(j.at("D"));
  s.flow = flow_from_json(require(j, "flow"));
  s.jump = j.contains("jump") ? jump_from_json(j.at("jump")) : JumpMap::identity();
  s.validate();
  return s;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("invalid JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const HybridArc& arc, const ProperPiecewiseFn* v) {
  if (arc.segments.empty()) return;
  const std::size_t n = arc.segments.front().x.front().size();
  out << "t,j";
  for (std::size_t i = 0; i < n; ++i) out << ",x" << (i + 1);
  if (v) out << ",V";
  out << '\n';
  for (const auto& seg : arc.segments) {
    for (std::size_t k = 0; k < seg.t.size(); ++k) {
      out << format_number(seg.t[k]) << ',' << seg.j;
      for (std::size_t i = 0; i < n; ++i) out << ',' << format_number(seg.x[k][i]);
      if (v) out << ',' << format_number((*v)(seg.x[k]));
      out << '\n';
    }
  }
}

std::vector<double> parse_csv_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t\r");
    if (first == std::string::npos) throw UsageError("empty entry in '" + text + "'");
    const std::string s = item.substr(first, last - first + 1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw UsageError("not a finite number: '" + s + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("no numbers in '" + text + "'");
  return out;
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError("trajectory CSV: missing header");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  if (cols.size() < 3 || cols[0] != "t" || cols[1] != "j") throw UsageError("trajectory CSV: bad header");
  const bool has_v = cols.back() == "V";
  const std::size_t n = cols.size() - 2 - (has_v ? 1 : 0);
  std::vector<TrajectoryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<double> vals = parse_csv_numbers(line);
    if (vals.size() != cols.size()) throw UsageError("trajectory CSV: wrong column count");
    TrajectoryRow r;
    r.t = vals[0];
    r.j = static_cast<int>(vals[1]);
    r.x = Vec(std::vector<double>(vals.begin() + 2, vals.begin() + 2 + static_cast<long>(n)));
    if (has_v) r.v = vals.back();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace hylyap::io
