#include "lagdelta/chart_spec.hpp"
#include "support.hpp"

using namespace lagdelta;
using nlohmann::ordered_json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

const char* kGraph = R"({
  "schema": "lagdelta-chart/1",
  "family": "graph",
  "params": {"half_width": 0.4},
  "polynomials": [{"nvars": 3, "terms": [
    {"coef": 0.1, "powers": [3, 0, 0]},
    {"coef": -0.30000000000000004, "powers": [1, 1, 1]},
    {"coef": 1e-17, "powers": [0, 2, 0]}]}]
})";

}  // namespace

TEST_CASE("registry lists every family with sane parameter ranges") {
  const auto& reg = family_registry();
  CHECK(reg.size() >= 13);
  for (const auto& f : reg) {
    CAPTURE(f.name);
    CHECK_FALSE(f.summary.empty());
    for (const auto& p : f.params) {
      CHECK(p.min <= p.default_value);
      CHECK(p.default_value <= p.max);
    }
  }
  CHECK(find_family("ch5-example-3-13").name == "ch5-sech-example");
  CHECK(code_of([] { find_family("no-such-family"); }) == ErrorCode::invalid_argument);
}

TEST_CASE("every registered family builds with its defaults") {
  for (const auto& f : family_registry()) {
    CAPTURE(f.name);
    if (f.name == "graph" || f.name == "polynomial-map") continue;  // need explicit polynomials
    ChartSpec s;
    s.family = f.name;
    BuiltChart b = build_chart(s);
    CHECK(b.chart.dimension() >= 1);
    CHECK(b.improved_ideal == f.improved_ideal);
  }
}

TEST_CASE("polynomial JSON round trip") {
  testgen::for_seeds(5, 2000, [](testgen::Gen& g, std::uint64_t) {
    Polynomial p = g.polynomial(4, 3);
    ordered_json j = polynomial_to_json(p);
    Polynomial q = polynomial_from_json(ordered_json::parse(j.dump()));
    REQUIRE(q.terms().size() == p.terms().size());
    for (std::size_t i = 0; i < p.terms().size(); ++i) {
      CHECK(q.terms()[i].coef == p.terms()[i].coef);  // bit-exact
      CHECK(q.terms()[i].powers == p.terms()[i].powers);
    }
  });
  CHECK(code_of([] { polynomial_from_json(ordered_json::parse(R"({"nvars": 2, "terms": [{"coef": 1, "powers": [1]}]})")); }) ==
        ErrorCode::parse_error);
}

TEST_CASE("chart documents round-trip bit-exactly") {
  ChartSpec s = parse_chart_spec(kGraph);
  std::string once = chart_spec_to_json(s).dump();
  ChartSpec t = parse_chart_spec(once);
  std::string twice = chart_spec_to_json(t).dump();
  CHECK(once == twice);
  // the same chart evaluates identically
  BuiltChart a = build_chart(s), b = build_chart(t);
  Eigen::Vector3d u(0.1, -0.2, 0.3);
  CHECK(a.chart.value(u) == b.chart.value(u));

  for (const char* doc : {R"({"family": "ch5-vi", "flags": {"allow_totally_geodesic": true},
                             "polynomials": [{"nvars": 2, "terms": [{"coef": 1, "powers": [2, 0]}, {"coef": -1, "powers": [0, 2]}]},
                                             {"nvars": 2, "terms": [{"coef": 1, "powers": [1, 1]}]}]})",
                          R"({"family": "c5", "params": {"c": 1.25, "margin": 0.002}, "plugin": "totally-real-sphere"})",
                          R"({"family": "random-graph", "params": {"seed": 7, "dim": 4, "degree": 3, "half_width": 0.3}})",
                          R"({"family": "graph", "polynomials": [{"nvars": 2, "terms": [{"coef": 0.5, "powers": [2, 1]}]}],
                              "domain": {"lower": [-0.1, -0.2], "upper": [0.3, 0.1]}})"}) {
    CAPTURE(doc);
    std::string a1 = chart_spec_to_json(parse_chart_spec(doc)).dump();
    std::string a2 = chart_spec_to_json(parse_chart_spec(a1)).dump();
    CHECK(a1 == a2);
  }
}

TEST_CASE("integer parameters stay integers") {
  ChartSpec s = parse_chart_spec(R"({"family": "random-graph", "params": {"seed": 42, "dim": 5}})");
  ordered_json j = chart_spec_to_json(s);
  CHECK(j["params"]["seed"].is_number_integer());
  CHECK(j["params"]["dim"].dump() == "5");
}

TEST_CASE("invalid chart documents") {
  CHECK(code_of([] { parse_chart_spec("{not json"); }) == ErrorCode::parse_error);
  CHECK(code_of([] { parse_chart_spec(R"({"schema": "lagdelta-chart/9", "family": "c5"})"); }) == ErrorCode::parse_error);
  CHECK(code_of([] { parse_chart_spec(R"({"family": "nope"})"); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { parse_chart_spec(R"({"family": "c5", "params": {"cc": 1}})"); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { parse_chart_spec(R"({"family": "c5", "params": {"c": "one"}})"); }) != ErrorCode::internal);
  CHECK(code_of([] { parse_chart_spec(R"({"family": "c5", "flags": {"negative_branch": 1}})"); }) != ErrorCode::internal);
  // out of range values are caught when the chart is built
  CHECK(code_of([] { build_chart(parse_chart_spec(R"({"family": "ch5-iii", "params": {"c": 0.9}})")); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { build_chart(parse_chart_spec(R"({"family": "c5", "plugin": "bogus"})")); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { build_chart(parse_chart_spec(R"({"family": "graph"})")); }) == ErrorCode::invalid_argument);
}

TEST_CASE("non-harmonic input to branch (vi) is rejected") {
  auto code = code_of([] {
    build_chart(parse_chart_spec(R"({"family": "ch5-vi", "polynomials": [
      {"nvars": 2, "terms": [{"coef": 1, "powers": [2, 0]}]},
      {"nvars": 2, "terms": [{"coef": 1, "powers": [1, 1]}]}]})"));
  });
  CHECK((code == ErrorCode::invalid_argument || code == ErrorCode::plugin_rejected));
}

TEST_CASE("flags and plugin names") {
  ChartSpec s = parse_chart_spec(R"({"family": "c5", "flags": {"negative_branch": true}})");
  CHECK(spec_flag(s, "negative_branch", false));
  CHECK_FALSE(spec_flag(s, "allow_totally_geodesic", false));
  CHECK(spec_param(s, "c") == 1.0);
  CHECK(build_plugin("totally-real-sphere").dimension() == 4);
  CHECK(build_plugin("totally-real-hyperboloid").space().c() == -1);
  CHECK(build_plugin("cubic-surface-x-plane").dimension() == 4);
}
