#pragma once

// JSON encodings of matrices, regions, Lyapunov candidates, flow maps, hybrid
// systems and reports, plus the trajectory CSV format. Malformed input throws
// UsageError.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hylyap/certify.hpp"
#include "hylyap/geometry.hpp"
#include "hylyap/hybrid.hpp"
#include "hylyap/piecewise.hpp"
#include "hylyap/report.hpp"
#include "hylyap/setvalued.hpp"

namespace hylyap::io {

using Json = nlohmann::ordered_json;

Json to_json(const Vec& v);
Json to_json(const Matrix& m);
Json to_json(const SymMatrix& s);
Json to_json(const Constraint& c);
Json to_json(const Region& r);
Json to_json(const SmoothPiece& p);
Json to_json(const LatticeExpr& e);
/// {"type":"pieces","pieces":[{"region":...,"P"|"w"|"a","b":...}]}
Json to_json(const ProperPiecewiseFn& f);
Json to_json(const FlowMap& f);
Json to_json(const JumpMap& g);
Json to_json(const HybridSystem& s);
Json to_json(const CheckReport& r);
Json to_json(const InfeasibilityReport& r);
Json to_json(const MonitorReport& r);

Vec vec_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);
/// Throws UsageError unless the array is exactly symmetric.
SymMatrix sym_from_json(const Json& j);
Region region_from_json(const Json& j);
SmoothPiece piece_from_json(const Json& j);
/// Lattice trees ("quad", "sqlinear", "affine", "max", "min", "mid").
LatticeExpr lattice_from_json(const Json& j);
/// Any Lyapunov encoding: lattice trees are flattened, "pieces" taken as given.
ProperPiecewiseFn lyapunov_from_json(const Json& j);
FlowMap flow_from_json(const Json& j);
JumpMap jump_from_json(const Json& j);
/// {"C":region,"D":region|null,"flow":...,"jump":...}; D and jump optional.
HybridSystem system_from_json(const Json& j);

/// Parses a file; wraps parse failures into UsageError.
Json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline. Throws UsageError if unwritable.
void write_json_file(const std::string& path, const Json& j);

/// Shortest round-trip decimal text for a double.
std::string format_number(double v);

/// Header t,j,x1..xn[,V]; one row per sample. The last sample before a jump
/// and the first after it share t with counters j and j + 1.
void write_trajectory_csv(std::ostream& out, const HybridArc& arc,
                          const ProperPiecewiseFn* v = nullptr);

struct TrajectoryRow {
  double t = 0.0;
  int j = 0;
  Vec x;
  std::optional<double> v;
};

/// Reads the format written by write_trajectory_csv.
std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in);

/// "1,2.5,-3" -> {1, 2.5, -3}. Throws UsageError on malformed entries.
std::vector<double> parse_csv_numbers(const std::string& text);

}  // namespace hylyap::io
