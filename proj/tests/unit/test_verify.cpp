#include <sstream>

#include "lagdelta/verify.hpp"
#include "support.hpp"

using namespace lagdelta;
using nlohmann::ordered_json;

namespace {

VerifyOptions quick(int grid = 2) {
  VerifyOptions o;
  o.grid = grid;
  o.restarts = 16;
  o.threads = 1;
  return o;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("every built-in family verifies") {
  for (const auto& f : family_registry()) {
    if (f.name == "graph" || f.name == "polynomial-map") continue;
    CAPTURE(f.name);
    ChartSpec s;
    s.family = f.name;
    VerificationReport r = verify_chart(build_chart(s), quick(), &s);
    for (const auto& c : r.criteria) {
      CAPTURE(c.name);
      CAPTURE(c.max);
      CHECK(c.passed);
    }
    CHECK(r.errors == 0);
    CHECK(r.passed);
  }
}

TEST_CASE("summary maxima are the maxima over point records") {
  ChartSpec s = parse_chart_spec(R"({"family": "ratio4-extensor", "params": {"mu0": 0.3}})");
  VerificationReport r = verify_chart(build_chart(s), quick(3), &s);
  ordered_json j = report_to_json(r);
  double lag = 0, eq = 0;
  for (const auto& p : j["points"]) {
    lag = std::max(lag, p["lagrangian"].get<double>());
    eq = std::max(eq, std::abs(p["equality_residual"].get<double>()));
  }
  for (const auto& c : j["summary"]["criteria"]) {
    if (c["name"] == "lagrangian") CHECK(c["max"].get<double>() == lag);
    if (c["name"] == "equality") CHECK(c["max"].get<double>() == eq);
  }
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["summary"]["points"] == 9);
}

TEST_CASE("reports are byte-stable across runs and thread counts") {
  ChartSpec s = parse_chart_spec(R"({"family": "random-graph", "params": {"seed": 3}})");
  VerifyOptions a = quick(3), b = quick(3);
  b.threads = 4;
  std::string r1 = report_to_json(verify_chart(build_chart(s), a, &s)).dump(2);
  std::string r2 = report_to_json(verify_chart(build_chart(s), a, &s)).dump(2);
  std::string r3 = report_to_json(verify_chart(build_chart(s), b, &s)).dump(2);
  CHECK(r1 == r2);
  // the thread count is not part of the provenance, so the bytes match too
  CHECK(r1 == r3);
}

TEST_CASE("the twisted polynomial map fails on the Lagrangian criterion") {
  ChartSpec s = parse_chart_spec(R"({"family": "polynomial-map", "components": [
    {"re": {"nvars": 2, "terms": [{"coef": 1, "powers": [1, 0]}]}, "im": {"nvars": 2, "terms": [{"coef": 1, "powers": [0, 1]}]}},
    {"re": {"nvars": 2, "terms": [{"coef": 1, "powers": [0, 1]}]}, "im": {"nvars": 2, "terms": []}}]})");
  VerificationReport r = verify_chart(build_chart(s), quick(), &s);
  CHECK_FALSE(r.passed);
  for (const auto& c : r.criteria)
    if (c.name == "lagrangian") {
      CHECK_FALSE(c.passed);
      CHECK(c.max == doctest::Approx(1.0));
    }
}

TEST_CASE("oracle criterion") {
  ChartSpec s = parse_chart_spec(R"({"family": "ch5-sech-example"})");
  VerifyOptions o = quick(1);
  o.oracle = 3000;
  VerificationReport r = verify_chart(build_chart(s), o, &s);
  bool seen = false;
  for (const auto& c : r.criteria)
    if (c.name == "oracle") {
      seen = true;
      CHECK(c.passed);
    }
  CHECK(seen);
}

TEST_CASE("tensor documents") {
  auto R = curvature_tensor_from_json(ordered_json::parse(R"({"dim": 5, "constant": 1})"));
  CHECK(R.sectional(1, 2) == 1.0);
  auto P = curvature_tensor_from_json(ordered_json::parse(R"({"dim": 5, "pattern": {"mu": 0.5}, "c": 0})"));
  CHECK(P.sectional(0, 4) == doctest::Approx(0.75));
  auto back = curvature_tensor_from_json(curvature_tensor_to_json(P));
  CHECK(back.max_abs_difference(P) == 0.0);
  // components: constant curvature 1 in dimension 2
  auto C = curvature_tensor_from_json(ordered_json::parse(
      R"({"dim": 2, "components": [[0,1,1,0,1],[1,0,0,1,1],[0,1,0,1,-1],[1,0,1,0,-1]]})"));
  CHECK(C.sectional(0, 1) == 1.0);
  // a lone component breaks the symmetries
  CHECK_THROWS_AS(curvature_tensor_from_json(ordered_json::parse(R"({"dim": 2, "components": [[0,1,1,0,1]]})")), Error);
  CHECK_THROWS_AS(curvature_tensor_from_json(ordered_json::parse(R"({"dim": 5})")), Error);
  CHECK_THROWS_AS(curvature_tensor_from_json(ordered_json::parse(R"({"dim": 4, "pattern": {"mu": 1}})")), Error);
}

TEST_CASE("delta results serialize with provenance") {
  DeltaOptions o;
  o.restarts = 8;
  o.seed = 11;
  TupleSpec t(5, {2, 2});
  DeltaResult d = delta_invariant(CurvatureTensor::constant(5, 1.0), t, o);
  ordered_json j = delta_result_to_json(d, t, o);
  CHECK(j["value"].get<double>() == doctest::Approx(8.0));
  CHECK(j["minimizer_blocks"].size() == 2);
  CHECK(j["minimizer_blocks"][0].size() == 2);
  CHECK(j["provenance"]["seed"] == 11);
  DeltaOptions back = delta_options_from_json(ordered_json::parse(R"({"restarts": 12, "seed": 4, "oracle": 100})"));
  CHECK(back.restarts == 12);
  CHECK(back.oracle_samples == 100);
}

TEST_CASE("value lists") {
  CHECK(parse_value_list("0.1:0.5:0.1").size() == 5);
  CHECK(parse_value_list("1,2,3.5") == std::vector<double>{1, 2, 3.5});
  CHECK_THROWS_AS(parse_value_list("3,2"), Error);
  CHECK_THROWS_AS(parse_value_list("1:0:0.1"), Error);
  CHECK_THROWS_AS(parse_value_list("a,b"), Error);
  CHECK_THROWS_AS(parse_value_list(""), Error);
}

TEST_CASE("parameter scan: ratio-4 residual column and stable header") {
  ChartSpec s = parse_chart_spec(R"({"family": "ratio4-extensor"})");
  ParameterScan scan;
  scan.param = "mu0";
  scan.values = parse_value_list("0.1:0.9:0.1");
  scan.verify = quick();
  auto ls = lines(scan_parameter_csv(s, scan));
  REQUIRE(ls.size() == 10);
  CHECK(ls[0] == "param,value,status,delta22,rhs,slack,mean_sq,lagrangian,constraint,horizontality,fit_mu,expected_mu");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto f = fields(ls[i]);
    CHECK(f[2] == "\"ok\"");
    CHECK(std::abs(std::stod(f[5])) < 1e-5);
  }
}

TEST_CASE("parameter scan keeps rows that leave the domain") {
  ChartSpec s = parse_chart_spec(R"({"family": "ch5-iii"})");
  ParameterScan scan;
  scan.param = "c";
  scan.values = {0.3, 0.5, 0.7};
  scan.verify = quick();
  auto ls = lines(scan_parameter_csv(s, scan));
  REQUIRE(ls.size() == 4);
  CHECK(fields(ls[1])[2] == "\"ok\"");
  CHECK(fields(ls[3])[2].rfind("\"error", 0) == 0);
}

TEST_CASE("trajectory scan: k = 0 keeps mu^2 + nu^2 = 1") {
  TrajectoryScan t;
  auto ls = lines(scan_trajectory_csv(t));
  CHECK(ls[0] == "t,mu,nu,theta,first_integral,integral_residual,mu2_plus_nu2");
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(std::abs(std::stod(fields(ls[i])[6]) - 1.0) < 1e-8);
  TrajectoryScan bad;
  bad.family = OdeFamily::C5;
  bad.mu0 = 0.5;
  bad.nu0 = -2.0;
  bad.t_end = 50.0;
  CHECK(scan_trajectory_csv(bad).find("# truncated:") != std::string::npos);
}
