#include "lagdelta/lagdelta.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "lagdelta/verify.hpp"

using nlohmann::ordered_json;
using namespace lagdelta;

struct ld_chart {
  ChartSpec spec;
  BuiltChart built;
};

namespace {

thread_local std::string g_last_error;

ld_status set_error(ld_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
ld_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return LD_OK;
  } catch (const Error& e) {
    return set_error(static_cast<ld_status>(static_cast<int>(e.code())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(LD_PARSE_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(LD_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(LD_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

ordered_json parse_options(const char* text) {
  if (!text || !*text) return ordered_json::object();
  try {
    ordered_json j = ordered_json::parse(text);
    if (!j.is_object()) fail(ErrorCode::parse_error, "options must be a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("options: ") + e.what());
  }
}

VerifyOptions verify_options(const ordered_json& j) {
  VerifyOptions o;
  o.grid = j.value("grid", o.grid);
  o.tol = j.value("tol", o.tol);
  o.seed = j.value("seed", o.seed);
  o.restarts = j.value("restarts", o.restarts);
  o.oracle = j.value("oracle", o.oracle);
  o.threads = j.value("threads", o.threads);
  o.intrinsic = j.value("intrinsic", o.intrinsic);
  o.lagrangian_tol = j.value("lagrangian_tol", o.lagrangian_tol);
  o.constraint_tol = j.value("constraint_tol", o.constraint_tol);
  o.horizontal_tol = j.value("horizontal_tol", o.horizontal_tol);
  o.symmetry_tol = j.value("symmetry_tol", o.symmetry_tol);
  o.inequality_slack = j.value("inequality_slack", o.inequality_slack);
  o.mu_tol = j.value("mu_tol", o.mu_tol);
  o.intrinsic_tol_jets = j.value("intrinsic_tol_jets", o.intrinsic_tol_jets);
  o.intrinsic_tol_fd = j.value("intrinsic_tol_fd", o.intrinsic_tol_fd);
  if (o.grid < 1 || o.restarts < 1 || o.oracle < 0 || o.tol <= 0.0)
    fail(ErrorCode::invalid_argument, "verify options: grid and restarts must be positive, oracle >= 0, tol > 0");
  return o;
}

TupleSpec tuple(int n, const int* parts, int k) {
  if (k < 1 || !parts) fail(ErrorCode::invalid_argument, "tuple must have at least one part");
  return TupleSpec(n, std::vector<int>(parts, parts + k));
}

void require_out(const void* p) {
  if (!p) fail(ErrorCode::invalid_argument, "null output pointer");
}

}  // namespace

extern "C" {

const char* ld_version(void) { return kToolVersion; }

const char* ld_status_name(ld_status s) {
  switch (s) {
    case LD_OK: return "ok";
    case LD_INVALID_ARGUMENT: return "invalid_argument";
    case LD_DOMAIN_ERROR: return "domain_error";
    case LD_NOT_LAGRANGIAN: return "not_lagrangian";
    case LD_PLUGIN_REJECTED: return "plugin_rejected";
    case LD_PARSE_ERROR: return "parse_error";
    case LD_NONCONVERGENCE: return "nonconvergence";
    case LD_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* ld_last_error(void) { return g_last_error.c_str(); }

void ld_string_free(char* s) { std::free(s); }

ld_status ld_chart_from_json(const char* json, ld_chart** out) {
  return guarded([&] {
    require_out(out);
    *out = nullptr;
    if (!json) fail(ErrorCode::invalid_argument, "null chart document");
    ChartSpec spec = parse_chart_spec(json);
    BuiltChart built = build_chart(spec);
    *out = new ld_chart{std::move(spec), std::move(built)};
  });
}

ld_status ld_chart_from_family(const char* family, const char* options_json, ld_chart** out) {
  return guarded([&] {
    require_out(out);
    *out = nullptr;
    if (!family) fail(ErrorCode::invalid_argument, "null family name");
    ordered_json j = parse_options(options_json);
    j["family"] = family;
    ChartSpec spec = chart_spec_from_json(j);
    BuiltChart built = build_chart(spec);
    *out = new ld_chart{std::move(spec), std::move(built)};
  });
}

void ld_chart_free(ld_chart* chart) { delete chart; }

ld_status ld_chart_to_json(const ld_chart* chart, char** out) {
  return guarded([&] {
    require_out(out);
    if (!chart) fail(ErrorCode::invalid_argument, "null chart");
    *out = dup_string(chart_spec_to_json(chart->spec).dump(2));
  });
}

ld_status ld_chart_info(const ld_chart* chart, int* dimension, int* model_dim, int* curvature_sign) {
  return guarded([&] {
    if (!chart) fail(ErrorCode::invalid_argument, "null chart");
    const auto& c = chart->built.chart;
    if (dimension) *dimension = c.dimension();
    if (model_dim) *model_dim = c.space().model_dim();
    if (curvature_sign) *curvature_sign = c.space().c();
  });
}

ld_status ld_chart_domain(const ld_chart* chart, double* lower, double* upper, int capacity) {
  return guarded([&] {
    if (!chart) fail(ErrorCode::invalid_argument, "null chart");
    const Box& b = chart->built.chart.domain();
    if (capacity < b.dim()) fail(ErrorCode::invalid_argument, "domain buffer too small");
    require_out(lower);
    require_out(upper);
    for (int i = 0; i < b.dim(); ++i) {
      lower[i] = b.lower[i];
      upper[i] = b.upper[i];
    }
  });
}

ld_status ld_chart_evaluate(const ld_chart* chart, const double* u, int m, double* out, int capacity) {
  return guarded([&] {
    if (!chart || !u) fail(ErrorCode::invalid_argument, "null chart or point");
    require_out(out);
    const auto& c = chart->built.chart;
    if (m != c.dimension()) fail(ErrorCode::invalid_argument, "point has wrong dimension");
    if (capacity < 2 * c.space().model_dim()) fail(ErrorCode::invalid_argument, "output buffer too small");
    AmbientVector z = c.value(Eigen::Map<const Eigen::VectorXd>(u, m));
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      out[2 * k] = z[k].real();
      out[2 * k + 1] = z[k].imag();
    }
  });
}

ld_status ld_verify(const ld_chart* chart, const char* options_json, char** report_json, int* passed) {
  return guarded([&] {
    if (!chart) fail(ErrorCode::invalid_argument, "null chart");
    require_out(report_json);
    VerifyOptions o = verify_options(parse_options(options_json));
    VerificationReport r = verify_chart(chart->built, o, &chart->spec);
    *report_json = dup_string(report_to_json(r).dump(2));
    if (passed) *passed = r.passed ? 1 : 0;
  });
}

ld_status ld_delta_tensor(const char* tensor_json, const int* parts, int k, const char* options_json,
                          char** result_json) {
  return guarded([&] {
    require_out(result_json);
    if (!tensor_json) fail(ErrorCode::invalid_argument, "null tensor document");
    ordered_json tj;
    try {
      tj = ordered_json::parse(tensor_json);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse_error, std::string("tensor: invalid JSON: ") + e.what());
    }
    CurvatureTensor R = curvature_tensor_from_json(tj);
    TupleSpec spec = tuple(R.dim(), parts, k);
    DeltaOptions o = delta_options_from_json(parse_options(options_json));
    DeltaResult d = delta_invariant(R, spec, o);
    *result_json = dup_string(delta_result_to_json(d, spec, o).dump(2));
  });
}

ld_status ld_delta_chart(const ld_chart* chart, const double* u, int m, const int* parts, int k,
                         const char* options_json, char** result_json) {
  return guarded([&] {
    require_out(result_json);
    if (!chart || !u) fail(ErrorCode::invalid_argument, "null chart or point");
    const auto& c = chart->built.chart;
    if (m != c.dimension()) fail(ErrorCode::invalid_argument, "point has wrong dimension");
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(u, m);
    PointGeometry pg = second_fundamental_form(c, p);
    CurvatureTensor R = gauss_curvature_tensor(pg);
    TupleSpec spec = tuple(m, parts, k);
    DeltaOptions o = delta_options_from_json(parse_options(options_json));
    DeltaResult d = delta_invariant(R, spec, o);
    ordered_json j = delta_result_to_json(d, spec, o);
    j["point"] = std::vector<double>(u, u + m);
    j["mean_sq"] = pg.mean_sq;
    j["c"] = pg.c;
    j["classical_rhs"] = classical_rhs(spec, pg.mean_sq, pg.c);
    j["improved_rhs"] = spec.strict() ? ordered_json(improved_rhs(spec, pg.mean_sq, pg.c)) : ordered_json(nullptr);
    *result_json = dup_string(j.dump(2));
  });
}

ld_status ld_rhs_coefficients(int n, const int* parts, int k, int improved, long long out[4]) {
  return guarded([&] {
    require_out(out);
    TupleSpec spec = tuple(n, parts, k);
    RhsCoefficients r = improved ? improved_rhs_coefficients(spec) : classical_rhs_coefficients(spec);
    out[0] = r.mean_sq.numerator();
    out[1] = r.mean_sq.denominator();
    out[2] = r.constant.numerator();
    out[3] = r.constant.denominator();
  });
}

ld_status ld_scan_parameter(const char* chart_json, const char* param, const char* values, const char* point,
                            const char* options_json, char** csv) {
  return guarded([&] {
    require_out(csv);
    if (!chart_json || !param || !values) fail(ErrorCode::invalid_argument, "scan: chart, param and values are required");
    ChartSpec base = parse_chart_spec(chart_json);
    ParameterScan scan;
    scan.param = param;
    scan.values = parse_value_list(values);
    if (point && *point) {
      std::vector<double> p;
      std::string s(point);
      std::size_t pos = 0;
      try {
        while (pos <= s.size()) {
          std::size_t next = s.find(',', pos);
          p.push_back(std::stod(s.substr(pos, next - pos)));
          if (next == std::string::npos) break;
          pos = next + 1;
        }
      } catch (const std::logic_error&) {
        fail(ErrorCode::invalid_argument, "scan: cannot parse point '" + s + "'");
      }
      scan.point = p;
    }
    scan.verify = verify_options(parse_options(options_json));
    *csv = dup_string(scan_parameter_csv(base, scan));
  });
}

ld_status ld_scan_trajectory(const char* family, double mu0, double nu0, double t_end, double step, int every,
                             char** csv) {
  return guarded([&] {
    require_out(csv);
    if (!family) fail(ErrorCode::invalid_argument, "null family");
    std::string f(family);
    TrajectoryScan s;
    if (f == "C5") s.family = OdeFamily::C5;
    else if (f == "CP5") s.family = OdeFamily::CP5;
    else if (f == "CH5") s.family = OdeFamily::CH5;
    else fail(ErrorCode::invalid_argument, "trajectory family must be C5, CP5 or CH5");
    s.mu0 = mu0;
    s.nu0 = nu0;
    s.t_end = t_end;
    s.step = step;
    s.every = every;
    *csv = dup_string(scan_trajectory_csv(s));
  });
}

ld_status ld_families(char** json) {
  return guarded([&] {
    require_out(json);
    ordered_json a = ordered_json::array();
    for (const auto& f : family_registry()) {
      ordered_json params = ordered_json::array();
      for (const auto& p : f.params)
        params.push_back(
            {{"name", p.name}, {"default", p.default_value}, {"min", p.min}, {"max", p.max}, {"help", p.help}});
      a.push_back({{"name", f.name},
                   {"aliases", f.aliases},
                   {"ambient", f.ambient},
                   {"summary", f.summary},
                   {"improved_ideal", f.improved_ideal},
                   {"plugins", f.plugins},
                   {"params", params}});
    }
    *json = dup_string(a.dump(2));
  });
}

}  // extern "C"
