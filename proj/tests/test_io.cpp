#include <doctest.h>

#include <sstream>

#include "hylyap/errors.hpp"
#include "hylyap/io.hpp"
#include "hylyap/presets.hpp"
#include "hylyap/rng.hpp"

using namespace hylyap;
using io::Json;

TEST_CASE("numbers and vectors") {
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(-2.5e-7) == "-2.5e-07");
  Rng rng(61);
  for (int k = 0; k < 1000; ++k) {
    const double x = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    CHECK(std::stod(io::format_number(x)) == x);
  }
  CHECK(io::parse_csv_numbers("1,2.5,-3") == std::vector<double>{1.0, 2.5, -3.0});
  CHECK(io::parse_csv_numbers(" -2 , 0.5 ") == std::vector<double>{-2.0, 0.5});
  CHECK_THROWS_AS(io::parse_csv_numbers("1,,2"), UsageError);
  CHECK_THROWS_AS(io::parse_csv_numbers("1,abc"), UsageError);
  CHECK_THROWS_AS(io::parse_csv_numbers("1,nan"), UsageError);
}

TEST_CASE("matrices round-trip and symmetric input is enforced") {
  const Matrix a = presets::flower_a1();
  CHECK(io::matrix_from_json(io::to_json(a)) == a);
  const SymMatrix p = presets::flower_p1();
  CHECK(io::sym_from_json(io::to_json(p)) == p);
  CHECK_THROWS_AS(io::sym_from_json(Json::parse("[[1,2],[3,4]]")), UsageError);
  CHECK_THROWS_AS(io::matrix_from_json(Json::parse("[[1,2],[3]]")), UsageError);
  CHECK_THROWS_AS(io::vec_from_json(Json::parse("\"x\"")), UsageError);
}

TEST_CASE("systems round-trip") {
  for (const auto& name : presets::system_names()) {
    CAPTURE(name);
    const HybridSystem sys = presets::system_by_name(name);
    const Json j = io::to_json(sys);
    const HybridSystem back = io::system_from_json(j);
    CHECK(io::to_json(back).dump() == j.dump());
    CHECK(back.flow_set == sys.flow_set);
    CHECK(back.jump_set == sys.jump_set);
    CHECK(back.flow.kind() == sys.flow.kind());
    CHECK(back.homogeneous() == sys.homogeneous());
  }
}

TEST_CASE("Lyapunov candidates round-trip") {
  Rng rng(62);
  for (const auto& name : presets::lyapunov_names()) {
    CAPTURE(name);
    const ProperPiecewiseFn v = presets::lyapunov_by_name(name);
    const Json j = io::to_json(v);
    const ProperPiecewiseFn back = io::lyapunov_from_json(j);
    REQUIRE(back.size() == v.size());
    CHECK(io::to_json(back).dump() == j.dump());
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(back.piece(i).fn == v.piece(i).fn);
      CHECK(back.piece(i).region == v.piece(i).region);
    }
  }
}

TEST_CASE("lattice JSON is flattened on load") {
  const Json j = Json::parse(R"({"type":"max","args":[
      {"type":"quad","P":[[1,-0.1],[-0.1,0.5]]},
      {"type":"quad","P":[[2.5,1.4],[1.4,0.5]]}]})");
  const ProperPiecewiseFn v = io::lyapunov_from_json(j);
  const ProperPiecewiseFn ref = presets::clegg_vm();
  Rng rng(63);
  for (int k = 0; k < 100; ++k) {
    const Vec x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    CHECK(v(x) == ref(x));
  }
  CHECK_THROWS_AS(io::lyapunov_from_json(Json::parse(R"({"type":"cube"})")), UsageError);
}

TEST_CASE("reports serialize with the documented keys") {
  CheckReport r;
  r.check = "flow";
  r.add_counterexample({Vec{1.0, 2.0}, 1, 0.5, "why"});
  const Json j = io::to_json(r);
  CHECK(j["check"] == "flow");
  CHECK(j["pass"] == false);
  CHECK(j["counterexamples"][0]["x"] == Json::parse("[1.0,2.0]"));
  CHECK(j["counterexamples"][0]["piece"] == 1);
  CHECK(j["counterexamples"][0]["value"] == 0.5);
  CHECK(j.contains("worst_margin"));
  CHECK(j.contains("params"));
  CHECK(j.contains("caveat"));

  MonitorReport m;
  const Json mj = io::to_json(m);
  CHECK(mj["worst_flow_margin"].is_null());
}

TEST_CASE("trajectory CSV duplicates the jump instant") {
  SimConfig cfg;
  cfg.t_max = 5.0;
  cfg.dt = 1e-2;
  const HybridArc arc = simulate(presets::clegg_system(), Vec{-2.0, 0.5}, cfg);
  REQUIRE_FALSE(arc.jumps.empty());
  const ProperPiecewiseFn v = presets::clegg_vm();
  std::ostringstream out;
  io::write_trajectory_csv(out, arc, &v);
  const std::string text = out.str();
  CHECK(text.rfind("t,j,x1,x2,V\n", 0) == 0);

  std::istringstream in(text);
  const auto rows = io::read_trajectory_csv(in);
  CHECK(rows.size() == arc.sample_count());
  std::size_t seen = 0;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    if (rows[k + 1].j == rows[k].j + 1) {
      CHECK(rows[k + 1].t == rows[k].t);
      CHECK(rows[k].x == arc.jumps[seen].before);
      CHECK(rows[k + 1].x == arc.jumps[seen].after);
      ++seen;
    } else {
      CHECK(rows[k + 1].j == rows[k].j);
    }
    REQUIRE(rows[k].v.has_value());
    CHECK(*rows[k].v == v(rows[k].x));
  }
  CHECK(seen == arc.jumps.size());

  std::istringstream bad("t,j,x1\n0,0\n");
  CHECK_THROWS_AS(io::read_trajectory_csv(bad), UsageError);
}
