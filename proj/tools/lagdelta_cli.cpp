// lagdelta command line front end; talks to the library only through lagdelta.h

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lagdelta/lagdelta.h"

using nlohmann::ordered_json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// a library failure that ends the run with the given exit code
struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(ld_status s) {
  // a chart that is not Lagrangian or a rejected plugin is a failed verification, not a usage mistake
  if (s == LD_NOT_LAGRANGIAN || s == LD_PLUGIN_REJECTED) return kExitFail;
  return kExitUsage;
}

void check(ld_status s, const char* what) {
  if (s == LD_OK) return;
  throw CliError{exit_code_for(s), std::string(what) + ": " + ld_status_name(s) + ": " + ld_last_error()};
}

struct LdString {
  char* p = nullptr;
  ~LdString() { ld_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct ChartDeleter {
  void operator()(ld_chart* c) const { ld_chart_free(c); }
};
using ChartPtr = std::unique_ptr<ld_chart, ChartDeleter>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitUsage, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw CliError{kExitUsage, "cannot write " + out_path};
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

// "1" stays an integer so chart documents round-trip unchanged
ordered_json parse_scalar(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    std::size_t used = 0;
    long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::logic_error&) {
  }
  throw CliError{kExitUsage, "not a number: '" + v + "'"};
}

std::pair<std::string, std::string> split_assignment(const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw CliError{kExitUsage, "expected key=value, got '" + kv + "'"};
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw CliError{kExitUsage, "cannot parse number list '" + s + "'"};
    }
  }
  if (out.empty()) throw CliError{kExitUsage, "empty number list"};
  return out;
}

std::vector<int> parse_tuple(const std::string& s) {
  std::vector<int> out;
  for (double d : parse_doubles(s)) {
    if (d != std::floor(d)) throw CliError{kExitUsage, "tuple entries must be integers: '" + s + "'"};
    out.push_back(static_cast<int>(d));
  }
  return out;
}

// options shared by every subcommand that needs a chart
struct ChartArgs {
  std::string family;
  std::string chart_file;
  std::vector<std::string> params;
  std::vector<std::string> flags;
  std::string plugin;
  double mu0 = NAN;
  double c = NAN;

  void add(CLI::App* app) {
    app->add_option("--family", family, "built-in family name (see 'families')");
    app->add_option("--chart", chart_file, "chart document (lagdelta-chart/1 JSON)")->check(CLI::ExistingFile);
    app->add_option("--param", params, "family parameter override, key=value (repeatable)");
    app->add_option("--flag", flags, "family flag, name or name=true|false (repeatable)");
    app->add_option("--plugin", plugin, "plugin name for the families that take one");
    app->add_option("--mu0", mu0, "shorthand for --param mu0=...");
    app->add_option("--c", c, "shorthand for --param c=...");
  }

  bool given() const { return !family.empty() || !chart_file.empty(); }

  std::string document() const {
    if (family.empty() == chart_file.empty()) throw CliError{kExitUsage, "give exactly one of --family or --chart"};
    ordered_json j;
    if (!chart_file.empty()) {
      try {
        j = ordered_json::parse(read_file(chart_file));
      } catch (const nlohmann::json::exception& e) {
        throw CliError{kExitUsage, chart_file + ": invalid JSON: " + e.what()};
      }
      if (!j.is_object()) throw CliError{kExitUsage, chart_file + ": chart must be a JSON object"};
    } else {
      j["schema"] = "lagdelta-chart/1";
      j["family"] = family;
    }
    for (const auto& kv : params) {
      auto [k, v] = split_assignment(kv);
      j["params"][k] = parse_scalar(v);
    }
    if (!std::isnan(mu0)) j["params"]["mu0"] = mu0;
    if (!std::isnan(c)) j["params"]["c"] = c;
    for (const auto& f : flags) {
      if (f.find('=') == std::string::npos) {
        j["flags"][f] = true;
      } else {
        auto [k, v] = split_assignment(f);
        ordered_json b = parse_scalar(v);
        if (!b.is_boolean()) throw CliError{kExitUsage, "flag " + k + " needs true or false"};
        j["flags"][k] = b;
      }
    }
    if (!plugin.empty()) j["plugin"] = plugin;
    return j.dump();
  }

  ChartPtr build() const {
    std::string doc = document();
    ld_chart* raw = nullptr;
    check(ld_chart_from_json(doc.c_str(), &raw), "chart");
    return ChartPtr(raw);
  }
};

struct Tolerances {
  int grid = 8;
  double tol = 1e-5;
  double lagrangian_tol = 1e-9;
  double constraint_tol = 1e-8;
  double horizontal_tol = 1e-8;
  double symmetry_tol = 1e-8;
  double slack = 1e-7;
  double mu_tol = 1e-6;
  double intrinsic_jets = 1e-8;
  double intrinsic_fd = 1e-5;
  bool no_intrinsic = false;
  int restarts = 64;
  unsigned long long seed = 0;
  int oracle = 0;
  int threads = 0;

  void add(CLI::App* app) {
    app->add_option("--grid", grid, "sample points per axis")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--tol", tol, "equality residual tolerance")->capture_default_str();
    app->add_option("--lagrangian-tol", lagrangian_tol, "Lagrangian residual tolerance")->capture_default_str();
    app->add_option("--constraint-tol", constraint_tol, "lift constraint tolerance")->capture_default_str();
    app->add_option("--horizontal-tol", horizontal_tol, "horizontality tolerance")->capture_default_str();
    app->add_option("--symmetry-tol", symmetry_tol, "cubic form symmetry tolerance")->capture_default_str();
    app->add_option("--slack", slack, "allowed excess of delta(2,2) over the bound")->capture_default_str();
    app->add_option("--mu-tol", mu_tol, "canonical fit mu tolerance")->capture_default_str();
    app->add_option("--intrinsic-tol-jets", intrinsic_jets, "intrinsic crosscheck tolerance, analytic jets")->capture_default_str();
    app->add_option("--intrinsic-tol-fd", intrinsic_fd, "intrinsic crosscheck tolerance, finite differences")->capture_default_str();
    app->add_flag("--no-intrinsic", no_intrinsic, "skip the intrinsic curvature crosscheck");
    app->add_option("--restarts", restarts, "optimizer restarts per point")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "optimizer seed")->capture_default_str();
    app->add_option("--oracle", oracle, "brute-force oracle samples per point (0 = off)")->capture_default_str();
    app->add_option("--threads", threads, "worker threads (0 = hardware)")->capture_default_str();
  }

  std::string json() const {
    ordered_json j = {{"grid", grid},
                      {"tol", tol},
                      {"lagrangian_tol", lagrangian_tol},
                      {"constraint_tol", constraint_tol},
                      {"horizontal_tol", horizontal_tol},
                      {"symmetry_tol", symmetry_tol},
                      {"inequality_slack", slack},
                      {"mu_tol", mu_tol},
                      {"intrinsic_tol_jets", intrinsic_jets},
                      {"intrinsic_tol_fd", intrinsic_fd},
                      {"intrinsic", !no_intrinsic},
                      {"restarts", restarts},
                      {"seed", seed},
                      {"oracle", oracle},
                      {"threads", threads}};
    return j.dump();
  }
};

std::string num(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_number()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", v.get<double>());
    return buf;
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string report_points_csv(const ordered_json& report) {
  std::ostringstream out;
  out << "u,lagrangian,constraint,horizontality,cubic_symmetry,mean_sq,delta22,rhs,equality_residual,"
         "oracle_gap,fit_a,fit_b,fit_mu,expected_mu,intrinsic,error\n";
  for (const auto& p : report.at("points")) {
    std::string u;
    for (const auto& x : p.at("u")) u += (u.empty() ? "" : ";") + num(x);
    auto get = [&](const char* k) { return p.contains(k) ? num(p.at(k)) : std::string(); };
    auto fit = [&](const char* k) { return p.contains("fit") ? num(p.at("fit").at(k)) : std::string(); };
    out << u << ',' << get("lagrangian") << ',' << get("constraint") << ',' << get("horizontality") << ','
        << get("cubic_symmetry") << ',' << get("mean_sq") << ',' << get("delta22") << ',' << get("rhs") << ','
        << get("equality_residual") << ',' << get("oracle_gap") << ',' << fit("a") << ',' << fit("b") << ','
        << fit("mu") << ',' << get("expected_mu") << ',' << get("intrinsic") << ','
        << csv_field(p.value("error", std::string())) << '\n';
  }
  return out.str();
}

void print_summary(const ordered_json& report, std::ostream& os) {
  const auto& chart = report.at("chart");
  const auto& summary = report.at("summary");
  os << "chart " << chart.at("name").get<std::string>() << " (" << chart.at("ambient").get<std::string>()
     << ", dimension " << chart.at("dimension").get<int>() << "): " << summary.at("points").get<int>()
     << " points, " << summary.at("errors").get<int>() << " errors\n";
  for (const auto& c : summary.at("criteria")) {
    os << "  " << (c.at("passed").get<bool>() ? "PASS " : "FAIL ") << c.at("name").get<std::string>()
       << "  max " << (c.at("max").is_null() ? std::string("n/a") : num(c.at("max"))) << "  tol "
       << num(c.at("tolerance")) << '\n';
  }
  for (const auto& p : report.at("plugins"))
    os << "  plugin " << p.at("plugin").get<std::string>() << ": " << (p.at("passed").get<bool>() ? "ok" : "rejected")
       << '\n';
  os << (summary.at("passed").get<bool>() ? "PASS" : "FAIL") << '\n';
}

int run_verify(const ChartArgs& ca, const Tolerances& tol, const std::string& format, const std::string& out_path,
               bool quiet) {
  ChartPtr chart = ca.build();
  LdString report;
  int passed = 0;
  std::string opts = tol.json();
  check(ld_verify(chart.get(), opts.c_str(), &report.p, &passed), "verify");
  ordered_json j = ordered_json::parse(report.str());
  emit(format == "csv" ? report_points_csv(j) : report.str(), out_path);
  if (!quiet) print_summary(j, std::cerr);
  return passed ? kExitPass : kExitFail;
}

std::string delta_text(const ordered_json& j) {
  std::ostringstream os;
  os << "tuple " << j.at("tuple").get<std::string>() << " n=" << j.at("n").get<int>() << '\n';
  os << "value " << num(j.at("value")) << '\n';
  os << "tau " << num(j.at("tau")) << "  inf_sum " << num(j.at("inf_sum")) << '\n';
  int b = 0;
  for (const auto& blk : j.at("minimizer_blocks")) {
    os << "block " << ++b << '\n';
    for (const auto& v : blk) {
      os << "  [";
      bool first = true;
      for (const auto& x : v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s% .9f", first ? "" : " ", x.get<double>());
        os << buf;
        first = false;
      }
      os << " ]\n";
    }
  }
  os << "restarts " << j.at("restarts_used").get<int>() << "  agreeing " << j.at("agreeing_restarts").get<int>()
     << "  converged " << (j.at("converged").get<bool>() ? "yes" : "no") << '\n';
  if (!j.at("oracle_value").is_null())
    os << "oracle " << num(j.at("oracle_value")) << "  gap " << num(j.at("oracle_gap")) << '\n';
  if (j.contains("mean_sq")) {
    os << "mean_sq " << num(j.at("mean_sq")) << "  c " << num(j.at("c")) << '\n';
    os << "classical_rhs " << num(j.at("classical_rhs"));
    if (!j.at("improved_rhs").is_null()) os << "  improved_rhs " << num(j.at("improved_rhs"));
    os << '\n';
  }
  return os.str();
}

std::string delta_csv(const ordered_json& j) {
  std::ostringstream os;
  os << "tuple,n,value,tau,inf_sum,restarts_used,agreeing_restarts,converged,oracle_value,oracle_gap\n";
  os << csv_field(j.at("tuple").get<std::string>()) << ',' << j.at("n").get<int>() << ',' << num(j.at("value"))
     << ',' << num(j.at("tau")) << ',' << num(j.at("inf_sum")) << ',' << j.at("restarts_used").get<int>() << ','
     << j.at("agreeing_restarts").get<int>() << ',' << num(j.at("converged")) << ',' << num(j.at("oracle_value"))
     << ',' << num(j.at("oracle_gap")) << '\n';
  return os.str();
}

void print_families(const std::string& format, const std::string& out_path) {
  LdString s;
  check(ld_families(&s.p), "families");
  if (format == "json") {
    emit(s.str(), out_path);
    return;
  }
  ordered_json fams = ordered_json::parse(s.str());
  std::ostringstream os;
  if (format == "csv") {
    os << "family,ambient,improved_ideal,param,default,min,max\n";
    for (const auto& f : fams)
      for (const auto& p : f.at("params"))
        os << f.at("name").get<std::string>() << ',' << f.at("ambient").get<std::string>() << ','
           << num(f.at("improved_ideal")) << ',' << p.at("name").get<std::string>() << ',' << num(p.at("default"))
           << ',' << num(p.at("min")) << ',' << num(p.at("max")) << '\n';
  } else {
    for (const auto& f : fams) {
      os << f.at("name").get<std::string>();
      if (!f.at("aliases").empty()) {
        os << " (alias";
        for (const auto& a : f.at("aliases")) os << ' ' << a.get<std::string>();
        os << ')';
      }
      os << "  [" << f.at("ambient").get<std::string>() << (f.at("improved_ideal").get<bool>() ? ", ideal" : "")
         << "]\n    " << f.at("summary").get<std::string>() << '\n';
      for (const auto& p : f.at("params"))
        os << "    --param " << p.at("name").get<std::string>() << "=" << p.at("default").get<double>() << "  in ["
           << p.at("min").get<double>() << ", " << p.at("max").get<double>() << "]  "
           << p.at("help").get<std::string>() << '\n';
      if (!f.at("plugins").empty()) {
        os << "    plugins:";
        for (const auto& p : f.at("plugins")) os << ' ' << p.get<std::string>();
        os << '\n';
      }
    }
  }
  emit(os.str(), out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lagdelta: verification lab for delta(2,2)-ideal Lagrangian submanifolds"};
  app.set_version_flag("--version", std::string(ld_version()));
  app.require_subcommand(1);

  std::string format;
  std::string out_path;
  bool quiet = false;

  auto* verify = app.add_subcommand("verify", "sample a chart and check every enabled criterion");
  ChartArgs verify_chart;
  Tolerances verify_tol;
  verify_chart.add(verify);
  verify_tol.add(verify);
  verify->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  verify->add_option("--out", out_path, "write the report here instead of stdout");
  verify->add_flag("--quiet", quiet, "no summary on stderr");

  auto* delta = app.add_subcommand("delta", "delta invariant of a curvature tensor or a chart point");
  ChartArgs delta_chart;
  delta_chart.add(delta);
  std::string tensor_file, point_text, tuple_text = "2,2";
  int restarts = 64, max_restarts = 0, oracle = 0, threads = 0;
  unsigned long long seed = 0;
  double oracle_tol = 1e-4;
  delta->add_option("--tensor", tensor_file, "curvature tensor document (lagdelta-tensor/1 JSON)")
      ->check(CLI::ExistingFile);
  delta->add_option("--point", point_text, "chart point, comma separated (default: domain center)");
  delta->add_option("--tuple", tuple_text, "tuple n_1,...,n_k")->capture_default_str();
  delta->add_option("--restarts", restarts, "optimizer restarts")->capture_default_str()->check(CLI::PositiveNumber);
  delta->add_option("--max-restarts", max_restarts, "restart budget when restarts disagree");
  delta->add_option("--seed", seed, "optimizer seed")->capture_default_str();
  delta->add_option("--oracle", oracle, "brute-force oracle samples (0 = off)")->capture_default_str();
  delta->add_option("--oracle-tol", oracle_tol, "largest accepted oracle gap")->capture_default_str();
  delta->add_option("--threads", threads, "worker threads (0 = hardware)")->capture_default_str();
  delta->add_option("--format", format, "output format (default: text)")->check(CLI::IsMember({"json", "csv", "text"}));
  delta->add_option("--out", out_path, "write output here instead of stdout");

  auto* scan = app.add_subcommand("scan", "sweep a family parameter or integrate a trajectory, as CSV");
  ChartArgs scan_chart;
  Tolerances scan_tol;
  scan_chart.add(scan);
  scan_tol.add(scan);
  std::string sweep, values, trajectory;
  double nu0 = 0.0, t_end = 2.0, step = 1e-3;
  int every = 10;
  scan->add_option("--sweep", sweep, "parameter to sweep");
  scan->add_option("--values", values, "sweep values, a:b:h or a comma list");
  scan->add_option("--point", point_text, "evaluation point (default: domain center)");
  scan->add_option("--trajectory", trajectory, "integrate the mu-nu system instead")
      ->check(CLI::IsMember({"C5", "CP5", "CH5"}));
  scan->add_option("--nu0", nu0, "initial nu for --trajectory")->capture_default_str();
  scan->add_option("--t-end", t_end, "end time for --trajectory")->capture_default_str();
  scan->add_option("--step", step, "RK4 step for --trajectory")->capture_default_str();
  scan->add_option("--every", every, "keep every k-th step")->capture_default_str();
  scan->add_option("--format", format, "output format")->check(CLI::IsMember({"csv"}));
  scan->add_option("--out", out_path, "write the CSV here instead of stdout");

  auto* families = app.add_subcommand("families", "list built-in families and parameter ranges");
  families->add_option("--format", format, "output format (default: text)")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  families->add_option("--out", out_path, "write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (verify->parsed()) return run_verify(verify_chart, verify_tol, format, out_path, quiet);

    if (delta->parsed()) {
      std::vector<int> parts = parse_tuple(tuple_text);
      ordered_json o = {{"restarts", restarts}, {"seed", seed}, {"oracle", oracle}, {"threads", threads}};
      if (max_restarts > 0) o["max_restarts"] = max_restarts;
      std::string opts = o.dump();
      LdString result;
      if (!tensor_file.empty()) {
        if (delta_chart.given()) throw CliError{kExitUsage, "give either --tensor or a chart, not both"};
        std::string doc = read_file(tensor_file);
        check(ld_delta_tensor(doc.c_str(), parts.data(), static_cast<int>(parts.size()), opts.c_str(), &result.p),
              "delta");
      } else {
        ChartPtr chart = delta_chart.build();
        int m = 0;
        check(ld_chart_info(chart.get(), &m, nullptr, nullptr), "chart");
        std::vector<double> u;
        if (point_text.empty()) {
          std::vector<double> lo(m), hi(m);
          check(ld_chart_domain(chart.get(), lo.data(), hi.data(), m), "chart");
          for (int i = 0; i < m; ++i) u.push_back(0.5 * (lo[i] + hi[i]));
        } else {
          u = parse_doubles(point_text);
        }
        check(ld_delta_chart(chart.get(), u.data(), static_cast<int>(u.size()), parts.data(),
                             static_cast<int>(parts.size()), opts.c_str(), &result.p),
              "delta");
      }
      ordered_json j = ordered_json::parse(result.str());
      if (format == "json") emit(j.dump(2), out_path);
      else if (format == "csv") emit(delta_csv(j), out_path);
      else emit(delta_text(j), out_path);
      if (!j.at("oracle_gap").is_null() && j.at("oracle_gap").get<double>() > oracle_tol) {
        std::cerr << "oracle gap " << num(j.at("oracle_gap")) << " exceeds " << oracle_tol << '\n';
        return kExitFail;
      }
      return kExitPass;
    }

    if (scan->parsed()) {
      LdString csv;
      if (!trajectory.empty()) {
        if (scan_chart.given() || !sweep.empty())
          throw CliError{kExitUsage, "--trajectory does not take a chart or --sweep"};
        double mu0 = std::isnan(scan_chart.mu0) ? 1.0 : scan_chart.mu0;
        check(ld_scan_trajectory(trajectory.c_str(), mu0, nu0, t_end, step, every, &csv.p), "scan");
      } else {
        if (sweep.empty() || values.empty()) throw CliError{kExitUsage, "scan needs --sweep and --values"};
        std::string doc = scan_chart.document();
        std::string opts = scan_tol.json();
        check(ld_scan_parameter(doc.c_str(), sweep.c_str(), values.c_str(), point_text.c_str(), opts.c_str(),
                                &csv.p),
              "scan");
      }
      emit(csv.str(), out_path);
      return kExitPass;
    }

    if (families->parsed()) {
      print_families(format, out_path);
      return kExitPass;
    }
  } catch (const CliError& e) {
    std::cerr << "lagdelta: " << e.message << '\n';
    return e.exit_code;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "lagdelta: malformed library output: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
