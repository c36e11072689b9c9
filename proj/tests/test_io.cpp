#include <memodyn/error.hpp>
#include <memodyn/io.hpp>

#include <doctest.h>

#include <sstream>
#include <string>

using namespace memodyn;

namespace {

Traj small_trajectory() {
  IntegratorOptions o;
  o.t1 = 0.5;
  o.h = 0.01;
  return integrate<double>(MmoParams{}, CoreState<double>{0.01, 0.1, -0.2, 0.3}, o);
}

std::string validation_message(const Json& j) {
  try {
    run_config_from_json(j);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("run config round trip") {
  const Json j = Json::parse(R"({
    "model": "canonical_chua",
    "params": {"k": 1.5, "alpha": 3.0, "beta": 1.0, "gamma": 0.2, "g": [-0.4, 0.0, 0.6]},
    "initial": {"x": 0.1, "y": 0.2, "z": 0.3, "w": 0.4},
    "integrator": {"method": "rk4", "h": 0.002, "t0": 1.0, "t1": 9.0, "record_stride": 2},
    "analysis": {"samples_per_period": 4096, "element": {"kind": "CCMR", "g": [1.0, 0.5]}},
    "netlist": {"R": 1000.0, "C": 0.001},
    "seed": 42
  })");
  const RunConfig c = run_config_from_json(j);
  CHECK(std::holds_alternative<CanonicalChuaParams>(c.model));
  CHECK(std::get<CanonicalChuaParams>(c.model).k == 1.5);
  CHECK(c.integrator.method == Method::RK4Fixed);
  CHECK(c.integrator.record_stride == 2);
  CHECK(c.initial.w == 0.4);
  CHECK(c.analysis.samples_per_period == 4096);
  REQUIRE(c.analysis.element.has_value());
  CHECK(c.analysis.element->kind == ElementKind::CCMR);
  CHECK(c.seed == 42);

  const Json again = to_json(run_config_from_json(to_json(c)));
  CHECK(again == to_json(c));
}

TEST_CASE("defaults") {
  const RunConfig c = run_config_from_json(Json::object());
  CHECK(std::holds_alternative<MmoParams>(c.model));
  CHECK(c.integrator.method == Method::DormandPrince45Adaptive);
  CHECK(c.integrator.t1 == 100.0);
  CHECK(analysis_element(c).kind == ElementKind::VCMR);
  CHECK(analysis_element(c).g.coefficients() == std::get<MmoParams>(c.model).g.coefficients());
}

TEST_CASE("config diagnostics name the key") {
  CHECK(validation_message(Json::parse(R"({"params": {"epsilonn": 0.1}})")) ==
        "config key 'params.epsilonn': unknown key");
  CHECK(validation_message(Json::parse(R"({"params": {"epsilon": "small"}})")).find("'params.epsilon'") !=
        std::string::npos);
  CHECK(validation_message(Json::parse(R"({"model": "van_der_pol"})")).find("unknown model 'van_der_pol'") !=
        std::string::npos);
  CHECK(validation_message(Json::parse(R"({"integrator": {"method": "euler"}})")).find("'integrator.method'") !=
        std::string::npos);
  CHECK(validation_message(Json::parse(R"({"analysis": {"samples_per_period": 1}})")) ==
        "config key 'analysis.samples_per_period': expected an integer >= 2");
  CHECK(validation_message(Json::parse(R"({"extra": 1})")) == "config key 'extra': unknown key");
  CHECK(validation_message(Json::parse(R"({"params": {"epsilon": 1e-4},
                                           "integrator": {"method": "rk4", "h": 1e-3}})"))
            .find("stiffness guard") != std::string::npos);
}

TEST_CASE("JSON syntax errors carry line and column") {
  try {
    parse_json_text("{\n  \"seed\": 1,\n  oops\n}", "cfg.json");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("cfg.json:3:", 0) == 0);
  }
}

TEST_CASE("polynomial JSON") {
  const Polynomial<double> g = polynomial_from_json(Json::parse("[1.0, 0.0, 3.0]"), "g");
  CHECK(g(2.0) == 13.0);
  CHECK(polynomial_from_json(to_json(g), "g").coefficients() == g.coefficients());
  CHECK_THROWS_WITH(polynomial_from_json(Json::parse("[]"), "params.g"), doctest::Contains("params.g"));
}

TEST_CASE("trajectory CSV round trip is exact") {
  const Traj traj = small_trajectory();
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  const Traj back = read_trajectory_csv(os.str(), traj.model);
  CHECK((back.times.array() == traj.times.array()).all());
  CHECK((back.states.array() == traj.states.array()).all());
  CHECK(os.str().rfind("t,x,y,z,w,I_w,I_gG,I_gGt,I_y,I_z\n", 0) == 0);
}

TEST_CASE("trajectory CSV errors name the row") {
  const std::string header = "t,x,y,z,w,I_w,I_gG,I_gGt,I_y,I_z\n";
  const std::string row0 = "0,1,2,3,4,5,6,7,8,9\n", row1 = "1,1,2,3,4,5,6,7,8,9\n";
  CHECK_THROWS_WITH(read_trajectory_csv(header + row0 + "0.5,1,2,x,4,5,6,7,8,9\n" + row1, MmoParams{}),
                    "CSV row 3, column 4: not a finite number 'x'");
  CHECK_THROWS_WITH(read_trajectory_csv(header + row0 + "0.5,1,2\n", MmoParams{}),
                    "CSV row 3: expected 10 fields, got 3");
  CHECK_THROWS_WITH(read_trajectory_csv(header + row0 + "0.9,1,2,3,4,5,6,7,8,9\n" + "3,1,2,3,4,5,6,7,8,9\n", MmoParams{}),
                    "CSV row 3: times are not uniformly spaced");
  CHECK_THROWS_WITH(read_trajectory_csv("a,b\n" + row0, MmoParams{}), doctest::Contains("CSV row 1: expected header"));
  CHECK_THROWS_WITH(read_trajectory_csv(header + row0, MmoParams{}), "CSV: need at least 2 data rows");
}

TEST_CASE("plot columns") {
  const Traj traj = small_trajectory();
  std::ostringstream os;
  write_plot_columns(os, traj);
  std::istringstream in(os.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "# t x y z w I_w I_gG I_gGt I_y I_z");
  std::istringstream fields(first);
  int count = 0;
  for (std::string f; fields >> f;) ++count;
  CHECK(count == 10);
}

TEST_CASE("period CSV") {
  const PeriodWaveform wf = read_period_csv("t,v,i\n0,1,2\n0.5,3,4\n1,5,6\n");
  CHECK(wf.t.size() == 3);
  CHECK(wf.v(1) == 3.0);
  CHECK(wf.i(2) == 6.0);
}

TEST_CASE("format_double keeps 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
