#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagdelta/chart_spec.hpp"
#include "lagdelta/delta.hpp"

namespace lagdelta {

inline constexpr const char* kReportSchema = "lagdelta-report/1";
inline constexpr const char* kTensorSchema = "lagdelta-tensor/1";

struct VerifyOptions {
  int grid = 8;
  // equality tolerance for improved-ideal families
  double tol = 1e-5;
  double lagrangian_tol = 1e-9;
  double constraint_tol = 1e-8;
  double horizontal_tol = 1e-8;
  double symmetry_tol = 1e-8;
  // delta(2,2) - rhs may exceed zero by this much before the inequality counts as broken
  double inequality_slack = 1e-7;
  double mu_tol = 1e-6;
  double intrinsic_tol_jets = 1e-8;
  double intrinsic_tol_fd = 1e-5;
  bool intrinsic = true;
  int restarts = 64;
  std::uint64_t seed = 0;
  int oracle = 0;
  int threads = 0;
};

struct FitRecord {
  double a = 0.0, b = 0.0, mu = 0.0, residual = 0.0;
  bool minimal = false;
};

struct PointRecord {
  std::vector<double> u;
  double lagrangian = 0.0;
  std::optional<double> constraint;
  std::optional<double> horizontality;
  std::optional<double> symmetry;
  std::optional<double> mean_sq;
  std::optional<double> delta22;
  std::optional<double> rhs;
  // delta(2,2) - (25/4) H^2 - 8c
  std::optional<double> equality_residual;
  std::optional<double> oracle_gap;
  std::optional<FitRecord> fit;
  std::optional<double> expected_mu;
  std::optional<double> intrinsic;
  std::string error;
};

struct Criterion {
  std::string name;
  double max = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct VerificationReport {
  std::string chart;
  std::string family;
  std::string description;
  std::string ambient;
  int dimension = 0;
  bool improved_ideal = false;
  nlohmann::ordered_json spec;
  std::vector<PluginReport> plugins;
  VerifyOptions options;
  std::vector<PointRecord> points;
  std::vector<Criterion> criteria;
  int errors = 0;
  bool passed = false;
};

PointRecord evaluate_point(const BuiltChart& b, const Eigen::VectorXd& u, const VerifyOptions& opts);
VerificationReport verify_chart(const BuiltChart& b, const VerifyOptions& opts, const ChartSpec* spec = nullptr);
nlohmann::ordered_json report_to_json(const VerificationReport& r);

// ---- tensors and delta ---------------------------------------------------

// {"dim": m, "constant": c} | {"dim": 5, "pattern": {"a", "b", "mu"}, "c": c}
// | {"dim": m, "data": [m^4 values]} | {"dim": m, "components": [[i, j, k, l, value], ...]}
CurvatureTensor curvature_tensor_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json curvature_tensor_to_json(const CurvatureTensor& R);
nlohmann::ordered_json delta_result_to_json(const DeltaResult& d, const TupleSpec& spec, const DeltaOptions& opts);
DeltaOptions delta_options_from_json(const nlohmann::ordered_json& j);

// ---- scans ---------------------------------------------------------------

struct ParameterScan {
  std::string param;
  std::vector<double> values;
  // evaluation point; defaults to the domain center
  std::optional<std::vector<double>> point;
  VerifyOptions verify;
};
// one row per value; failing rows are kept with their status
std::string scan_parameter_csv(const ChartSpec& base, const ParameterScan& scan);

struct TrajectoryScan {
  OdeFamily family = OdeFamily::CH5;
  double mu0 = 1.0;
  double nu0 = 0.0;
  double t_end = 2.0;
  double step = 1e-3;
  int every = 10;
};
std::string scan_trajectory_csv(const TrajectoryScan& scan);

// "a:b:h" or "x,y,z"
std::vector<double> parse_value_list(const std::string& s);

}  // namespace lagdelta
