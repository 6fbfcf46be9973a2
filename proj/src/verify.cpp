#include "lagdelta/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "lagdelta/error.hpp"

namespace lagdelta {

using nlohmann::ordered_json;

namespace {

DeltaOptions point_delta_options(const VerifyOptions& o) {
  DeltaOptions d;
  d.restarts = o.restarts;
  d.max_restarts = std::max(o.restarts, 256);
  d.seed = o.seed;
  d.threads = 1;
  d.oracle_samples = o.oracle;
  d.oracle_seed = o.seed + 1;
  return d;
}

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string num(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : ""; }

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

template <class F>
void parallel_for(int count, int threads, F&& body) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

PointRecord evaluate_point(const BuiltChart& b, const Eigen::VectorXd& u, const VerifyOptions& opts) {
  const ChartImmersion& f = b.chart;
  PointRecord r;
  r.u.assign(u.data(), u.data() + u.size());
  try {
    Jet3 jet = f.evaluate_jet(u, 2);
    r.lagrangian = lagrangian_residual(f.space(), jet);
    if (f.is_lift()) {
      r.constraint = f.space().sphere_constraint_residual(jet.value);
      r.horizontality = horizontality_residual(f.space(), jet);
    }
    PointGeometry pg = second_fundamental_form(f.space(), jet);
    r.symmetry = pg.h.symmetry_residual();
    r.mean_sq = pg.mean_sq;
    if (pg.dim == 5) {
      CurvatureTensor R = gauss_curvature_tensor(pg);
      EqualityCheck ec = improved_equality_check(R, pg, point_delta_options(opts));
      r.delta22 = ec.delta.value;
      r.rhs = ec.rhs;
      r.equality_residual = ec.residual;
      if (ec.delta.oracle_gap) r.oracle_gap = *ec.delta.oracle_gap;
      if (!ec.delta.converged && r.error.empty()) r.error = "delta optimizer restarts did not agree";
      if (b.improved_ideal) {
        CanonicalFit fit = canonical_frame_fit(pg);
        r.fit = FitRecord{fit.a, fit.b, fit.mu, fit.residual, fit.minimal};
        if (b.expected_mu) r.expected_mu = b.expected_mu(u);
      }
    }
    if (opts.intrinsic) r.intrinsic = intrinsic_curvature_crosscheck(f, u);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

VerificationReport verify_chart(const BuiltChart& b, const VerifyOptions& opts, const ChartSpec* spec) {
  require(opts.grid >= 1, "verify: grid must be positive");
  VerificationReport rep;
  rep.chart = b.chart.name();
  rep.family = spec ? spec->family : b.chart.name();
  rep.description = b.description;
  rep.ambient = b.chart.space().name();
  rep.dimension = b.chart.dimension();
  rep.improved_ideal = b.improved_ideal;
  if (spec) rep.spec = chart_spec_to_json(*spec);
  rep.plugins = b.plugin_reports;
  rep.options = opts;

  auto pts = sample_points(b.chart.domain(), opts.grid);
  rep.points.resize(pts.size());
  parallel_for(static_cast<int>(pts.size()), opts.threads,
               [&](int i) { rep.points[i] = evaluate_point(b, pts[i], opts); });

  const bool lift = b.chart.is_lift();
  const bool five = rep.dimension == 5;
  const bool ideal = five && b.improved_ideal;
  Criterion lag{"lagrangian", 0.0, opts.lagrangian_tol}, cons{"constraint", 0.0, opts.constraint_tol},
      hor{"horizontality", 0.0, opts.horizontal_tol}, sym{"cubic_symmetry", 0.0, opts.symmetry_tol},
      ineq{"inequality", -INFINITY, opts.inequality_slack}, eq{"equality", 0.0, opts.tol},
      mu{"canonical_mu", 0.0, opts.mu_tol},
      intr{"intrinsic", 0.0, b.chart.has_jets() ? opts.intrinsic_tol_jets : opts.intrinsic_tol_fd},
      orc{"oracle", 0.0, 1e-4}, err{"evaluation", 0.0, 0.0};
  bool any_mu = false;
  for (const auto& p : rep.points) {
    lag.max = std::max(lag.max, p.lagrangian);
    if (p.constraint) cons.max = std::max(cons.max, *p.constraint);
    if (p.horizontality) hor.max = std::max(hor.max, *p.horizontality);
    if (p.symmetry) sym.max = std::max(sym.max, *p.symmetry);
    if (p.equality_residual) {
      ineq.max = std::max(ineq.max, *p.equality_residual);
      eq.max = std::max(eq.max, std::abs(*p.equality_residual));
    }
    if (p.fit && p.expected_mu) {
      any_mu = true;
      mu.max = std::max(mu.max, std::abs(p.fit->mu - *p.expected_mu));
    }
    if (p.intrinsic) intr.max = std::max(intr.max, *p.intrinsic);
    if (p.oracle_gap) orc.max = std::max(orc.max, *p.oracle_gap);
    if (!p.error.empty()) {
      err.max += 1.0;
      ++rep.errors;
    }
  }
  rep.criteria.push_back(err);
  rep.criteria.push_back(lag);
  if (lift) {
    rep.criteria.push_back(cons);
    rep.criteria.push_back(hor);
  }
  rep.criteria.push_back(sym);
  if (five) rep.criteria.push_back(ineq);
  if (ideal) rep.criteria.push_back(eq);
  if (ideal && any_mu) rep.criteria.push_back(mu);
  if (opts.intrinsic) rep.criteria.push_back(intr);
  if (five && opts.oracle > 0) rep.criteria.push_back(orc);
  rep.passed = true;
  for (auto& c : rep.criteria) {
    c.passed = std::isfinite(c.max) ? c.max <= c.tolerance : c.max < 0;
    rep.passed = rep.passed && c.passed;
  }
  for (const auto& pr : rep.plugins) rep.passed = rep.passed && pr.passed();
  return rep;
}

ordered_json report_to_json(const VerificationReport& r) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["tool_version"] = kToolVersion;
  j["chart"] = {{"name", r.chart},
                {"family", r.family},
                {"description", r.description},
                {"ambient", r.ambient},
                {"dimension", r.dimension},
                {"improved_ideal", r.improved_ideal}};
  if (!r.spec.is_null()) j["chart"]["spec"] = r.spec;
  const VerifyOptions& o = r.options;
  j["provenance"] = {{"seed", o.seed},
                     {"grid", o.grid},
                     {"restarts", o.restarts},
                     {"oracle_samples", o.oracle},
                     {"tolerances",
                      {{"equality", o.tol},
                       {"lagrangian", o.lagrangian_tol},
                       {"constraint", o.constraint_tol},
                       {"horizontality", o.horizontal_tol},
                       {"cubic_symmetry", o.symmetry_tol},
                       {"inequality_slack", o.inequality_slack},
                       {"canonical_mu", o.mu_tol},
                       {"intrinsic_jets", o.intrinsic_tol_jets},
                       {"intrinsic_fd", o.intrinsic_tol_fd}}}};
  ordered_json plugins = ordered_json::array();
  for (const auto& p : r.plugins) {
    ordered_json checks = ordered_json::array();
    for (const auto& c : p.checks)
      checks.push_back({{"property", c.name}, {"required", c.required}, {"passed", c.passed}, {"value", c.value}});
    plugins.push_back({{"plugin", p.plugin}, {"points", p.points}, {"passed", p.passed()}, {"checks", checks}});
  }
  j["plugins"] = plugins;
  ordered_json crit = ordered_json::array();
  for (const auto& c : r.criteria)
    crit.push_back({{"name", c.name},
                    {"max", std::isfinite(c.max) ? ordered_json(c.max) : ordered_json(nullptr)},
                    {"tolerance", c.tolerance},
                    {"passed", c.passed}});
  j["summary"] = {{"points", r.points.size()}, {"errors", r.errors}, {"passed", r.passed}, {"criteria", crit}};
  ordered_json pts = ordered_json::array();
  for (const auto& p : r.points) {
    ordered_json q;
    q["u"] = p.u;
    q["lagrangian"] = p.lagrangian;
    q["constraint"] = opt(p.constraint);
    q["horizontality"] = opt(p.horizontality);
    q["cubic_symmetry"] = opt(p.symmetry);
    q["mean_sq"] = opt(p.mean_sq);
    q["delta22"] = opt(p.delta22);
    q["rhs"] = opt(p.rhs);
    q["equality_residual"] = opt(p.equality_residual);
    if (p.oracle_gap) q["oracle_gap"] = *p.oracle_gap;
    if (p.fit)
      q["fit"] = {{"a", p.fit->a}, {"b", p.fit->b}, {"mu", p.fit->mu}, {"residual", p.fit->residual},
                  {"minimal", p.fit->minimal}};
    q["expected_mu"] = opt(p.expected_mu);
    q["intrinsic"] = opt(p.intrinsic);
    if (!p.error.empty()) q["error"] = p.error;
    pts.push_back(q);
  }
  j["points"] = pts;
  return j;
}

// ---- tensors -------------------------------------------------------------

CurvatureTensor curvature_tensor_from_json(const ordered_json& j) {
  try {
    if (j.contains("schema") && j.at("schema") != kTensorSchema)
      fail(ErrorCode::parse_error, "tensor: unsupported schema " + j.at("schema").dump());
    const int m = j.at("dim").get<int>();
    if (m < 2 || m > kMaxJetVars) fail(ErrorCode::parse_error, "tensor: dim out of range");
    CurvatureTensor R(m);
    if (j.contains("constant")) {
      R = CurvatureTensor::constant(m, j.at("constant").get<double>());
    } else if (j.contains("pattern")) {
      if (m != 5) fail(ErrorCode::parse_error, "tensor: the (a, b, mu) pattern is five-dimensional");
      const auto& p = j.at("pattern");
      CubicForm h = improved_ideal_pattern(p.value("a", 0.0), p.value("b", 0.0), p.at("mu").get<double>());
      R = gauss_curvature_tensor(h, j.value("c", 0.0));
    } else if (j.contains("data")) {
      auto d = j.at("data").get<std::vector<double>>();
      if (d.size() != static_cast<std::size_t>(m) * m * m * m) fail(ErrorCode::parse_error, "tensor: data needs dim^4 values");
      R = CurvatureTensor::from_data(m, std::move(d));
    } else if (j.contains("components")) {
      for (const auto& c : j.at("components")) {
        if (!c.is_array() || c.size() != 5) fail(ErrorCode::parse_error, "tensor: component entries are [i, j, k, l, value]");
        int idx[4];
        for (int a = 0; a < 4; ++a) {
          idx[a] = c[a].get<int>();
          if (idx[a] < 0 || idx[a] >= m) fail(ErrorCode::parse_error, "tensor: index out of range");
        }
        R(idx[0], idx[1], idx[2], idx[3]) = c[4].get<double>();
      }
    } else {
      fail(ErrorCode::parse_error, "tensor: need one of constant, pattern, data, components");
    }
    if (R.symmetry_residual() > 1e-8)
      fail(ErrorCode::invalid_argument, "tensor: not an algebraic curvature tensor (symmetry residual " +
                                            num(R.symmetry_residual()) + ")");
    return R;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("tensor: ") + e.what());
  }
}

ordered_json curvature_tensor_to_json(const CurvatureTensor& R) {
  return {{"schema", kTensorSchema}, {"dim", R.dim()}, {"data", R.data()}};
}

ordered_json delta_result_to_json(const DeltaResult& d, const TupleSpec& spec, const DeltaOptions& opts) {
  ordered_json blocks = ordered_json::array();
  int col = 0;
  for (int size : d.blocks) {
    ordered_json blk = ordered_json::array();
    for (int c = 0; c < size; ++c, ++col) {
      std::vector<double> v(d.minimizer.rows());
      for (Eigen::Index r = 0; r < d.minimizer.rows(); ++r) v[r] = d.minimizer(r, col);
      blk.push_back(v);
    }
    blocks.push_back(blk);
  }
  ordered_json j;
  j["tuple"] = spec.to_string();
  j["n"] = spec.n();
  j["value"] = d.value;
  j["tau"] = d.tau;
  j["inf_sum"] = d.inf_sum;
  j["minimizer_blocks"] = blocks;
  j["restarts_used"] = d.restarts_used;
  j["agreeing_restarts"] = d.agreeing_restarts;
  j["converged"] = d.converged;
  j["oracle_value"] = d.oracle_value ? ordered_json(*d.oracle_value) : ordered_json(nullptr);
  j["oracle_gap"] = d.oracle_gap ? ordered_json(*d.oracle_gap) : ordered_json(nullptr);
  j["provenance"] = {{"seed", opts.seed},
                     {"restarts", opts.restarts},
                     {"max_restarts", opts.max_restarts},
                     {"oracle_samples", opts.oracle_samples},
                     {"oracle_seed", opts.oracle_seed},
                     {"tool_version", kToolVersion}};
  return j;
}

DeltaOptions delta_options_from_json(const ordered_json& j) {
  DeltaOptions o;
  if (j.is_null()) return o;
  try {
    o.restarts = j.value("restarts", o.restarts);
    o.max_restarts = j.value("max_restarts", std::max(o.max_restarts, o.restarts));
    o.seed = j.value("seed", o.seed);
    o.threads = j.value("threads", o.threads);
    o.oracle_samples = j.value("oracle", o.oracle_samples);
    o.oracle_seed = j.value("oracle_seed", o.seed + 1);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse_error, std::string("delta options: ") + e.what());
  }
  if (o.restarts < 1 || o.max_restarts < o.restarts) fail(ErrorCode::invalid_argument, "delta options: bad restart counts");
  return o;
}

// ---- scans ---------------------------------------------------------------

std::vector<double> parse_value_list(const std::string& s) {
  std::vector<double> out;
  try {
    if (s.find(':') != std::string::npos) {
      std::vector<double> p;
      std::stringstream ss(s);
      std::string part;
      while (std::getline(ss, part, ':')) p.push_back(std::stod(part));
      if (p.size() != 3 || !(p[2] > 0.0) || p[1] < p[0]) fail(ErrorCode::invalid_argument, "value list: expected a:b:step with a <= b, step > 0");
      const long n = std::lround(std::floor((p[1] - p[0]) / p[2] + 1e-9));
      for (long i = 0; i <= n; ++i) out.push_back(p[0] + static_cast<double>(i) * p[2]);
    } else {
      std::stringstream ss(s);
      std::string part;
      while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
    }
  } catch (const std::logic_error&) {
    fail(ErrorCode::invalid_argument, "value list: cannot parse '" + s + "'");
  }
  if (out.empty()) fail(ErrorCode::invalid_argument, "value list: empty");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1])) fail(ErrorCode::invalid_argument, "value list: values must increase");
  return out;
}

std::string scan_parameter_csv(const ChartSpec& base, const ParameterScan& scan) {
  std::vector<std::string> rows(scan.values.size());
  VerifyOptions vo = scan.verify;
  vo.intrinsic = false;
  parallel_for(static_cast<int>(scan.values.size()), vo.threads, [&](int i) {
    const double v = scan.values[i];
    std::string row = csv_quote(scan.param) + "," + num(v) + ",";
    try {
      ChartSpec s = base;
      s.params[scan.param] = v;
      spec_param(s, scan.param);
      BuiltChart b = build_chart(s);
      Eigen::VectorXd u = b.chart.domain().center();
      if (scan.point) {
        if (static_cast<int>(scan.point->size()) != b.chart.dimension())
          fail(ErrorCode::invalid_argument, "scan: point dimension mismatch");
        u = Eigen::Map<const Eigen::VectorXd>(scan.point->data(), b.chart.dimension());
      }
      PointRecord p = evaluate_point(b, u, vo);
      std::optional<double> slack;
      if (p.equality_residual) slack = -*p.equality_residual;
      row += csv_quote(p.error.empty() ? "ok" : "error: " + p.error) + "," + num(p.delta22) + "," + num(p.rhs) + "," +
             num(slack) + "," + num(p.mean_sq) + "," + num(p.lagrangian) + "," + num(p.constraint) + "," +
             num(p.horizontality) + "," + num(p.fit ? std::optional<double>(p.fit->mu) : std::nullopt) + "," +
             num(p.expected_mu);
    } catch (const std::exception& e) {
      row += csv_quote(std::string("error: ") + e.what()) + ",,,,,,,,,";
    }
    rows[i] = row;
  });
  std::string out = "param,value,status,delta22,rhs,slack,mean_sq,lagrangian,constraint,horizontality,fit_mu,expected_mu\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

std::string scan_trajectory_csv(const TrajectoryScan& scan) {
  require(scan.every >= 1, "trajectory scan: every must be positive");
  OdeState init = make_state(scan.family, 0.0, scan.mu0, scan.nu0);
  Trajectory tr = integrate_mu_nu(scan.family, init, scan.t_end, scan.step);
  std::string out = "t,mu,nu,theta,first_integral,integral_residual,mu2_plus_nu2\n";
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    if (i % static_cast<std::size_t>(scan.every) != 0 && i + 1 != tr.states.size()) continue;
    const auto& s = tr.states[i];
    out += num(s.t) + "," + num(s.mu) + "," + num(s.nu) + "," + num(s.theta) + "," +
           num(first_integral(scan.family, s.mu, s.nu)) + "," +
           num(std::abs(s.nu * s.nu - radicand(scan.family, tr.invariant, s.mu))) + "," + num(s.mu * s.mu + s.nu * s.nu) +
           "\n";
  }
  if (tr.truncated) out += "# truncated: " + tr.reason + "\n";
  return out;
}

}  // namespace lagdelta
