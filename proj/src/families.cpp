#include "lagdelta/families.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "lagdelta/delta.hpp"
#include "lagdelta/error.hpp"

namespace lagdelta {

namespace {

using RealFn = std::function<Jet<double>(const Jet<double>&)>;
using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr int kGkDepth = 15;
constexpr double kGkTol = 1e-12;

template <class F>
double integrate(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return GK::integrate(f, a, b, kGkDepth, kGkTol);
}

Jet<cplx> compose_complex(const Jet<double>& a, const std::array<cplx, 4>& d) {
  Jet<double> re = compose(a, {d[0].real(), d[1].real(), d[2].real(), d[3].real()});
  Jet<double> im = compose(a, {d[0].imag(), d[1].imag(), d[2].imag(), d[3].imag()});
  return make_complex(re, im);
}

// x -> int_anchor^x g as a jet; the value by quadrature, the derivatives from g itself
Jet<double> antiderivative(const RealFn& g, double anchor, const Jet<double>& x) {
  const double x0 = x.value();
  const JetLayout& L0 = JetLayout::get(1, 0);
  auto scalar = [&](double s) { return g(Jet<double>(L0, s)).value(); };
  std::array<double, 4> d{integrate(scalar, anchor, x0), 0.0, 0.0, 0.0};
  if (x.order() >= 1) {
    const JetLayout& L = JetLayout::get(1, x.order() - 1);
    Jet<double> y = g(Jet<double>::variable(L, 0, x0));
    d[1] = y.value();
    if (x.order() >= 2) d[2] = y.first(0);
    if (x.order() >= 3) d[3] = y.second(0, 0);
  }
  return compose(x, d);
}

// sum_alpha f_alpha (x - x0)^alpha, with f a Taylor jet in x.size() variables
Jet<double> compose_taylor(const Jet<double>& f, std::span<const Jet<double>> x, const Eigen::VectorXd& x0) {
  const JetLayout& out_layout = x[0].layout();
  const int m = static_cast<int>(x.size());
  require(f.nvars() == m, "compose: variable count mismatch");
  const int order = std::min(f.order(), out_layout.order());
  std::vector<std::vector<Jet<double>>> pw(m);
  for (int v = 0; v < m; ++v) {
    pw[v].push_back(Jet<double>(out_layout, 1.0));
    Jet<double> dx = x[v] - x0[v];
    for (int k = 1; k <= order; ++k) pw[v].push_back(pw[v].back() * dx);
  }
  Jet<double> out(out_layout, 0.0);
  for (int i = 0; i < f.layout().size(); ++i) {
    auto alpha = f.layout().exponents(i);
    int deg = 0;
    for (int v = 0; v < m; ++v) deg += alpha[v];
    if (deg > order || f[i] == 0.0) continue;
    Jet<double> term(out_layout, f[i]);
    for (int v = 0; v < m; ++v)
      if (alpha[v] > 0) term = term * pw[v][alpha[v]];
    out += term;
  }
  return out;
}

std::vector<Jet<double>> sphere_point(std::span<const Jet<double>> s) {
  const JetLayout& L = s[0].layout();
  Jet<double> r2(L, 1.0);
  for (const auto& x : s) r2 += x * x;
  Jet<double> inv = reciprocal(sqrt(r2));
  std::vector<Jet<double>> y;
  for (const auto& x : s) y.push_back(x * inv);
  y.push_back(inv);
  return y;
}

std::vector<Jet<double>> hyperboloid_point(std::span<const Jet<double>> s) {
  const JetLayout& L = s[0].layout();
  Jet<double> r2(L, 1.0);
  for (const auto& x : s) r2 += x * x;
  std::vector<Jet<double>> y{sqrt(r2)};
  for (const auto& x : s) y.push_back(x);
  return y;
}

Box prepend(double lo, double hi, const Box& rest) {
  Box b;
  b.lower.resize(rest.dim() + 1);
  b.upper.resize(rest.dim() + 1);
  b.lower << lo, rest.lower;
  b.upper << hi, rest.upper;
  return b;
}

double find_root(const std::function<double(double)>& f, double a, double b) {
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, a, b, tol, iters);
  return 0.5 * (r.first + r.second);
}

std::pair<double, double> shrink(double lo, double hi, double margin) {
  const double w = hi - lo;
  return {lo + margin * w, hi - margin * w};
}

std::vector<Eigen::VectorXd> halton_points(const Box& box, int count) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  std::vector<Eigen::VectorXd> pts;
  for (int k = 1; k <= count; ++k) {
    Eigen::VectorXd u(box.dim());
    for (int d = 0; d < box.dim(); ++d)
      u[d] = box.lower[d] + halton(static_cast<std::uint64_t>(k), primes[d % 12]) * (box.upper[d] - box.lower[d]);
    pts.push_back(std::move(u));
  }
  return pts;
}

void check_plugin(const ChartImmersion& phi, const PluginRequirements& req, const BuildOptions& opts,
                  BuiltChart& out) {
  if (!opts.verify_plugins) return;
  PluginRequirements r = req;
  if (opts.allow_totally_geodesic) r.non_totally_geodesic = false;
  PluginReport rep = verify_plugin(phi, r, opts.plugin_tolerances);
  out.plugin_reports.push_back(rep);
  if (!rep.passed()) fail(ErrorCode::plugin_rejected, "plugin " + phi.name() + " rejected: " + rep.failures());
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

}  // namespace

// ---- curves and extensors ------------------------------------------------

PlanarCurve unit_circle_curve() {
  PlanarCurve g;
  g.name = "unit-circle";
  g.t_min = -1.0;
  g.t_max = 1.0;
  g.map = [](const Jet<double>& t) { return expi(t); };
  return g;
}

PlanarCurve ray_curve() {
  PlanarCurve g;
  g.name = "ray";
  g.t_min = 0.5;
  g.t_max = 1.5;
  g.map = [](const Jet<double>& t) { return Jet<cplx>(t); };
  return g;
}

PlanarCurve ratio4_generating_curve(double mu0, double span) {
  require(mu0 > 0.0, "ratio-4 curve: mu0 must be positive");
  if (span <= 0.0) span = 0.4 / mu0;
  auto sol = std::make_shared<DenseSolution>(mu_nu_rhs(OdeFamily::C5), DenseSolution::State{mu0, 0.0, 0.0}, 0.0,
                                             -span, span, 1e-3 / std::max(1.0, mu0));
  for (double t : {-span, span})
    if (sol->at(t)[0] <= 0.0) fail(ErrorCode::domain_error, "ratio-4 curve: mu reaches zero inside the span");
  PlanarCurve g;
  g.name = "ratio4-curve";
  g.t_min = -span;
  g.t_max = span;
  g.map = [sol](const Jet<double>& t) {
    auto y = sol->at(t.value());
    auto d = state_derivatives(OdeFamily::C5, y[0], y[1], y[2]);
    Jet<double> mu = compose(t, d[0]), nu = compose(t, d[1]), phi = compose(t, d[2]);
    return expi(-phi) / make_complex(nu, mu);
  };
  g.mu = [sol](double t) { return sol->at(t)[0]; };
  return g;
}

ChartImmersion complex_extensor(const PlanarCurve& gamma, int n, double sphere_half_width) {
  require(n >= 2, "extensor: n must be at least 2");
  Box dom = prepend(gamma.t_min, gamma.t_max, Box::cube(n - 1, sphere_half_width));
  auto map = gamma.map;
  JetMap jm = [map](std::span<const Jet<double>> x) {
    Jet<cplx> g = map(x[0]);
    if (std::abs(g.value()) < 1e-8) fail(ErrorCode::domain_error, "extensor: generating curve too close to the origin");
    auto y = sphere_point(x.subspan(1));
    std::vector<Jet<cplx>> out;
    for (const auto& yk : y) out.push_back(g * yk);
    return out;
  };
  return ChartImmersion("extensor(" + gamma.name + ")", dom, AmbientSpace::complex_euclidean(n), jm);
}

// ---- plugins -------------------------------------------------------------

ChartImmersion totally_real_sphere(int m, double half_width) {
  JetMap jm = [](std::span<const Jet<double>> s) {
    std::vector<Jet<cplx>> out;
    for (auto& y : sphere_point(s)) out.emplace_back(y);
    return out;
  };
  return ChartImmersion("totally-real-sphere", Box::cube(m, half_width), AmbientSpace::complex_projective(m), jm);
}

ChartImmersion totally_real_hyperboloid(int m, double half_width) {
  JetMap jm = [](std::span<const Jet<double>> s) {
    std::vector<Jet<cplx>> out;
    for (auto& y : hyperboloid_point(s)) out.emplace_back(y);
    return out;
  };
  return ChartImmersion("totally-real-hyperboloid", Box::cube(m, half_width), AmbientSpace::complex_hyperbolic(m),
                        jm);
}

ChartImmersion harmonic_gradient_surface(const Polynomial& f, double half_width, bool allow_flat) {
  require(f.nvars() == 2, "harmonic surface: f must have two variables");
  if (!f.laplacian().is_zero()) fail(ErrorCode::invalid_argument, "harmonic surface: f is not harmonic");
  bool curved = false;
  for (const auto& t : f.terms())
    if (t.powers[0] + t.powers[1] >= 2) curved = true;
  if (!curved && !allow_flat) fail(ErrorCode::invalid_argument, "harmonic surface: Hess f vanishes identically");
  return gradient_graph(f, Box::cube(2, half_width), curved ? "harmonic-surface" : "flat-plane");
}

ChartImmersion product_immersion(const ChartImmersion& a, const ChartImmersion& b) {
  require(a.space().c() == 0 && b.space().c() == 0, "product: both factors must be flat");
  require(a.has_jets() && b.has_jets(), "product: factors need analytic jets");
  const int ma = a.dimension();
  Box dom;
  dom.lower.resize(ma + b.dimension());
  dom.upper.resize(ma + b.dimension());
  dom.lower << a.domain().lower, b.domain().lower;
  dom.upper << a.domain().upper, b.domain().upper;
  JetMap ja = a.jet_map(), jb = b.jet_map();
  JetMap jm = [ja, jb, ma](std::span<const Jet<double>> x) {
    auto out = ja(x.subspan(0, ma));
    auto rest = jb(x.subspan(ma));
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  };
  const int n = a.space().n() + b.space().n();
  return ChartImmersion(a.name() + "x" + b.name(), dom, AmbientSpace::complex_euclidean(n), jm);
}

bool PluginReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return !c.required || c.passed; });
}

std::string PluginReport::failures() const {
  std::string s;
  for (const auto& c : checks) {
    if (!c.required || c.passed) continue;
    if (!s.empty()) s += ", ";
    s += c.name + " (" + fmt(c.value) + ")";
  }
  return s;
}

PluginReport verify_plugin(const ChartImmersion& phi, const PluginRequirements& req, const PluginTolerances& tol) {
  PluginReport rep;
  rep.plugin = phi.name();
  const int m = phi.dimension();
  const bool lift = phi.is_lift();
  double lag = 0.0, cons = 0.0, hor = 0.0, mean = 0.0, d2 = 0.0, hmax = 0.0;
  bool sff_ok = true;
  std::string sff_error;
  auto pts = halton_points(phi.domain().shrunk(0.9), tol.samples);
  DeltaOptions dopts;
  dopts.restarts = 16;
  dopts.max_restarts = 64;
  for (const auto& u : pts) {
    Jet3 jet = phi.evaluate_jet(u, 2);
    lag = std::max(lag, lagrangian_residual(phi.space(), jet));
    if (lift) {
      cons = std::max(cons, phi.space().sphere_constraint_residual(jet.value));
      hor = std::max(hor, horizontality_residual(phi.space(), jet));
    }
    try {
      PointGeometry pg = second_fundamental_form(phi.space(), jet);
      mean = std::max(mean, std::sqrt(pg.mean_sq));
      hmax = std::max(hmax, pg.h.norm());
      if (m >= 3 && req.delta2_ideal) {
        CurvatureTensor R = gauss_curvature_tensor(pg);
        TupleSpec spec(m, {2});
        DeltaResult dr = delta_invariant(R, spec, dopts);
        d2 = std::max(d2, std::abs(dr.value - classical_rhs(spec, pg.mean_sq, pg.c)));
      }
    } catch (const Error& e) {
      sff_ok = false;
      sff_error = e.what();
    }
  }
  rep.points = static_cast<int>(pts.size());
  rep.checks.push_back({"lagrangian", true, sff_ok && lag < 1e-8, lag});
  rep.checks.push_back({"constraint", lift, !lift || cons < tol.constraint, cons});
  rep.checks.push_back({"horizontal", req.horizontal && lift, !lift || hor < tol.horizontal, hor});
  rep.checks.push_back({"minimal", req.minimal, sff_ok && mean < tol.mean_curvature, mean});
  rep.checks.push_back({"delta2_ideal", req.delta2_ideal && m >= 3, sff_ok && (m < 3 || d2 < tol.delta2), d2});
  rep.checks.push_back({"non_totally_geodesic", req.non_totally_geodesic, sff_ok && hmax > tol.totally_geodesic, hmax});
  return rep;
}

// ---- w potential ---------------------------------------------------------

WPotential::WPotential(ChartImmersion psi, double closed_tol) : psi_(std::move(psi)) {
  require(psi_.space().c() == 0, "w: psi must map into flat C^n");
  require(psi_.has_jets(), "w: psi needs analytic jets");
  const Box& b = psi_.domain();
  anchor_ = b.contains(Eigen::VectorXd::Zero(b.dim())) ? Eigen::VectorXd::Zero(b.dim()) : b.center();
  if (psi_.dimension() >= 2) {
    for (const auto& u : halton_points(b.shrunk(0.95), 8)) {
      double r = closedness_residual(u);
      if (r > closed_tol)
        fail(ErrorCode::not_lagrangian, "w: input not Lagrangian (closedness residual " + fmt(r) + ")");
    }
  }
}

Eigen::VectorXd WPotential::gradient(const Eigen::VectorXd& u) const {
  auto p = psi_.jets(u, 1);
  Eigen::VectorXd g(psi_.dimension());
  for (int j = 0; j < psi_.dimension(); ++j) {
    cplx s = 0.0;
    for (const auto& c : p) s += c.first(j) * std::conj(c.value());
    g[j] = 2.0 * s.imag();
  }
  return g;
}

double WPotential::closedness_residual(const Eigen::VectorXd& u) const {
  auto p = psi_.jets(u, 1);
  double r = 0.0;
  for (int i = 0; i < psi_.dimension(); ++i)
    for (int j = i + 1; j < psi_.dimension(); ++j) {
      cplx s = 0.0;
      for (const auto& c : p) s += c.first(j) * std::conj(c.first(i));
      r = std::max(r, 4.0 * std::abs(s.imag()));
    }
  return r;
}

double WPotential::line_integral(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const Eigen::VectorXd d = b - a;
  if (d.norm() == 0.0) return 0.0;
  auto f = [&](double s) { return gradient(a + s * d).dot(d); };
  return integrate(f, 0.0, 1.0);
}

double WPotential::value(const Eigen::VectorXd& u) const { return line_integral(anchor_, u); }

Jet<double> WPotential::taylor(const Eigen::VectorXd& u, int order) const {
  const int m = psi_.dimension();
  const JetLayout& L = JetLayout::get(m, order);
  const double w0 = value(u);
  if (order == 0) return Jet<double>(L, w0);
  auto p = psi_.jets(u, order);
  std::vector<Jet<double>> grads;
  for (int j = 0; j < m; ++j) {
    Jet<cplx> s(JetLayout::get(m, order - 1), 0.0);
    for (const auto& c : p) s += c.partial(j) * conj(c).truncated(order - 1);
    grads.push_back(imag(s) * 2.0);
  }
  return Jet<double>::from_gradient(L, w0, grads);
}

double WPotential::loop_residual(const Eigen::VectorXd& u, int i, int j, double side) const {
  const Box& b = psi_.domain();
  double room = std::min({u[i] - b.lower[i], b.upper[i] - u[i], u[j] - b.lower[j], b.upper[j] - u[j]});
  double h = std::min(0.5 * side, 0.9 * room);
  require(h > 0.0, "w loop: point on the domain boundary");
  Eigen::VectorXd p0 = u, p1 = u, p2 = u, p3 = u;
  p0[i] -= h, p0[j] -= h;
  p1[i] += h, p1[j] -= h;
  p2[i] += h, p2[j] += h;
  p3[i] -= h, p3[j] += h;
  return std::abs(line_integral(p0, p1) + line_integral(p1, p2) + line_integral(p2, p3) + line_integral(p3, p0));
}

double WPotential::max_loop_residual(int grid, double side) const {
  double r = 0.0;
  if (psi_.dimension() < 2) return 0.0;
  for (const auto& u : sample_points(psi_.domain().shrunk(0.8), grid))
    for (int i = 0; i < psi_.dimension(); ++i)
      for (int j = i + 1; j < psi_.dimension(); ++j) r = std::max(r, loop_residual(u, i, j, side));
  return r;
}

double WPotential::path_independence_residual(const Eigen::VectorXd& u) const {
  Eigen::VectorXd p = anchor_;
  double stair = 0.0;
  for (int d = 0; d < psi_.dimension(); ++d) {
    Eigen::VectorXd q = p;
    q[d] = u[d];
    stair += line_integral(p, q);
    p = q;
  }
  return std::abs(stair - value(u));
}

WPotential integrate_w(const ChartImmersion& psi) { return WPotential(psi); }

// ---- intervals -----------------------------------------------------------

std::string to_string(CH5Branch b) {
  switch (b) {
    case CH5Branch::iii: return "iii";
    case CH5Branch::iv: return "iv";
    case CH5Branch::v: return "v";
    case CH5Branch::vi: return "vi";
  }
  return "?";
}

CH5Branch parse_ch5_branch(const std::string& s) {
  if (s == "iii") return CH5Branch::iii;
  if (s == "iv") return CH5Branch::iv;
  if (s == "v") return CH5Branch::v;
  if (s == "vi") return CH5Branch::vi;
  fail(ErrorCode::invalid_argument, "unknown CH5 branch '" + s + "' (expected iii, iv, v or vi)");
}

std::pair<double, double> mu_interval_C5(double c, double margin) {
  require(c > 0.0, "C5 family: c must be positive");
  return shrink(0.0, std::cbrt(c * c), margin);
}

std::pair<double, double> mu_interval_CP5(double c, double margin) {
  require(c > 0.0, "CP5 family: c must be positive");
  const double c2 = c * c;
  double r = find_root([c2](double m) { return m * m * m + m - c2; }, 0.0, c2);
  return shrink(0.0, r, margin);
}

std::pair<double, double> mu_interval_CH5(CH5Branch b, double c, double margin) {
  require(c > 0.0, "CH5 family: c must be positive");
  const double c2 = c * c;
  if (b == CH5Branch::iii) {
    const double crit = 1.0 / std::sqrt(3.0);
    if (!(c2 < 2.0 / (3.0 * std::sqrt(3.0))))
      fail(ErrorCode::invalid_argument, "CH5 (iii): need c^2 < 2/(3 sqrt 3) for a nonempty mu-interval");
    auto f = [c2](double m) { return m * m * m - m + c2; };
    return shrink(find_root(f, 0.0, crit), find_root(f, crit, 1.0), margin);
  }
  if (b == CH5Branch::iv) {
    double r = find_root([c2](double m) { return m * m * m - m - c2; }, 1.0, 1.0 + c2);
    return shrink(0.0, r, margin);
  }
  fail(ErrorCode::invalid_argument, "CH5 branches (v) and (vi) are parametrized by t, not mu");
}

// ---- builders ------------------------------------------------------------

BuiltChart build_family_C5(double c, const ChartImmersion& phi, const BuildOptions& opts) {
  require(phi.space() == AmbientSpace::complex_projective(4) && phi.dimension() == 4,
          "C5 family: phi must be a 4-dimensional chart into S^9 in C^5");
  require(phi.has_jets(), "C5 family: phi needs analytic jets");
  auto [lo, hi] = mu_interval_C5(c, opts.margin);
  BuiltChart out{ChartImmersion("c5", prepend(lo, hi, phi.domain()), AmbientSpace::complex_euclidean(5), JetMap{}),
                 {}, true, "", {}};
  check_plugin(phi, {}, opts, out);
  const double c2 = c * c;
  const double sgn = opts.negative_branch ? -1.0 : 1.0;
  JetMap pm = phi.jet_map();
  JetMap jm = [pm, c2, sgn](std::span<const Jet<double>> x) {
    const Jet<double>& mu = x[0];
    Jet<double> mu3 = mu * mu * mu;
    Jet<double> phase = atan(sqrt(mu3 / (c2 - mu3))) * (sgn * 4.0 / 3.0);
    Jet<double> root = sqrt(c2 / mu - mu * mu) * sgn;
    Jet<cplx> pre = expi(phase) / make_complex(root, mu);
    auto p = pm(x.subspan(1));
    for (auto& z : p) z = pre * z;
    return p;
  };
  out.chart = ChartImmersion("c5", prepend(lo, hi, phi.domain()), AmbientSpace::complex_euclidean(5), jm);
  out.expected_mu = [](const Eigen::VectorXd& u) { return u[0]; };
  out.description = "C5 warped family, c = " + fmt(c) + ", plugin " + phi.name();
  return out;
}

namespace {

// theta(mu) = int_mid^mu g, g the given rate
Jet<double> theta_jet(const RealFn& rate, double mid, const Jet<double>& mu) { return antiderivative(rate, mid, mu); }

}  // namespace

BuiltChart build_family_CP5(double c, const ChartImmersion& phi, const BuildOptions& opts) {
  require(phi.space() == AmbientSpace::complex_projective(4) && phi.dimension() == 4,
          "CP5 family: phi must be a 4-dimensional chart into S^9 in C^5");
  require(phi.has_jets(), "CP5 family: phi needs analytic jets");
  if (opts.negative_branch) fail(ErrorCode::invalid_argument, "negative_branch is only implemented for the C5 family");
  auto [lo, hi] = mu_interval_CP5(c, opts.margin);
  Box dom = prepend(lo, hi, phi.domain());
  BuiltChart out{ChartImmersion("cp5", dom, AmbientSpace::complex_projective(5), JetMap{}), {}, true, "", {}};
  check_plugin(phi, {}, opts, out);
  const double c2 = c * c, mid = 0.5 * (lo + hi);
  RealFn rate = [c2](const Jet<double>& m) { return reciprocal(sqrt(c2 / m - m * m - 1.0) * 2.0); };
  JetMap pm = phi.jet_map();
  JetMap jm = [pm, rate, c, c2, mid](std::span<const Jet<double>> x) {
    const Jet<double>& mu = x[0];
    Jet<double> th = theta_jet(rate, mid, mu);
    Jet<cplx> e1 = expi(th) * sqrt(mu) * (1.0 / c);
    auto out = pm(x.subspan(1));
    for (auto& z : out) z = e1 * z;
    Jet<double> s = sqrt(c2 - mu * mu * mu - mu);
    Jet<double> m32 = pow(mu, 1.5);
    out.push_back(expi(th * 3.0) * make_complex(s, -m32) * (1.0 / c));
    return out;
  };
  out.chart = ChartImmersion("cp5", dom, AmbientSpace::complex_projective(5), jm);
  out.expected_mu = [](const Eigen::VectorXd& u) { return u[0]; };
  out.description = "CP5 family, c = " + fmt(c) + ", plugin " + phi.name();
  return out;
}

namespace {

BuiltChart build_ch5_mu_branch(CH5Branch branch, double c, const ChartImmersion& phi, const BuildOptions& opts) {
  const bool iii = branch == CH5Branch::iii;
  const AmbientSpace want = iii ? AmbientSpace::complex_hyperbolic(4) : AmbientSpace::complex_projective(4);
  require(phi.space() == want && phi.dimension() == 4,
          iii ? "CH5 (iii): phi must be a 4-dimensional chart into H^9_1" : "CH5 (iv): phi must be a 4-dimensional chart into S^9");
  require(phi.has_jets(), "CH5 family: phi needs analytic jets");
  if (opts.negative_branch) fail(ErrorCode::invalid_argument, "negative_branch is only implemented for the C5 family");
  auto [lo, hi] = mu_interval_CH5(branch, c, opts.margin);
  Box dom = prepend(lo, hi, phi.domain());
  const std::string name = "ch5-" + to_string(branch);
  BuiltChart out{ChartImmersion(name, dom, AmbientSpace::complex_hyperbolic(5), JetMap{}), {}, true, "", {}};
  check_plugin(phi, {}, opts, out);
  const double c2 = iii ? c * c : -c * c;  // radicand 1 - mu^2 - c2/mu
  const double mid = 0.5 * (lo + hi);
  RealFn rate;
  if (opts.ch5_statement_theta)
    rate = [c2](const Jet<double>& m) { return sqrt(1.0 - m * m - c2 / m) * 0.5; };
  else
    rate = [c2](const Jet<double>& m) { return reciprocal(sqrt(1.0 - m * m - c2 / m) * 2.0); };
  const double k2 = opts.ch5_printed_phase ? -1.0 : 3.0;
  JetMap pm = phi.jet_map();
  JetMap jm = [pm, rate, c, c2, mid, k2, iii](std::span<const Jet<double>> x) {
    const Jet<double>& mu = x[0];
    Jet<double> th = theta_jet(rate, mid, mu);
    Jet<cplx> e1 = expi(th) * sqrt(mu) * (1.0 / c);
    auto block = pm(x.subspan(1));
    for (auto& z : block) z = e1 * z;
    Jet<double> s = sqrt(mu - mu * mu * mu - c2);
    Jet<cplx> last = expi(th * k2) * make_complex(s, -pow(mu, 1.5)) * (1.0 / c);
    if (iii) {
      block.push_back(last);
      return block;
    }
    block.insert(block.begin(), last);
    return block;
  };
  out.chart = ChartImmersion(name, dom, AmbientSpace::complex_hyperbolic(5), jm);
  out.expected_mu = [](const Eigen::VectorXd& u) { return u[0]; };
  out.description = "CH5 branch (" + to_string(branch) + "), c = " + fmt(c) + ", plugin " + phi.name();
  return out;
}

BuiltChart build_ch5_t_branch(CH5Branch branch, double t_half, const ChartImmersion& psi, const BuildOptions& opts) {
  require(psi.space() == AmbientSpace::complex_euclidean(4) && psi.dimension() == 4,
          "CH5 (v)/(vi): psi must be a 4-dimensional chart into C^4");
  require(t_half > 0.0, "CH5 (v)/(vi): t half-width must be positive");
  Box dom = prepend(-t_half, t_half, psi.domain());
  const std::string name = "ch5-" + to_string(branch);
  BuiltChart out{ChartImmersion(name, dom, AmbientSpace::complex_hyperbolic(5), JetMap{}), {}, true, "", {}};
  auto w = std::make_shared<WPotential>(psi);
  const bool printed = opts.ch5_printed_phi;
  JetMap pm = psi.jet_map();
  JetMap jm = [pm, w, printed](std::span<const Jet<double>> x) {
    const Jet<double>& t = x[0];
    auto u = x.subspan(1);
    Eigen::VectorXd u0(4);
    for (int k = 0; k < 4; ++k) u0[k] = u[k].value();
    Jet<double> wj = compose_taylor(w->taylor(u0, t.order()), u, u0);
    auto p = pm(u);
    Jet<double> P(t.layout(), 0.0);
    for (const auto& z : p) P += real(z * conj(z));
    Jet<double> C = cosh(t * 2.0);
    Jet<cplx> pre = reciprocal(make_complex(cosh(t), -sinh(t)));
    Jet<double> A = printed ? t * 2.0 + wj : t * 2.0 - wj;
    Jet<double> B1 = printed ? C - P - 0.25 : C + P + 0.25;
    Jet<double> B6 = printed ? C - P + 0.25 : C + P - 0.25;
    std::vector<Jet<cplx>> out{pre * make_complex(A, B1)};
    for (const auto& z : p) out.push_back(pre * z);
    out.push_back(pre * make_complex(A, B6));
    return out;
  };
  out.chart = ChartImmersion(name, dom, AmbientSpace::complex_hyperbolic(5), jm);
  out.expected_mu = [](const Eigen::VectorXd& u) { return 1.0 / std::cosh(2.0 * u[0]); };
  out.description = "CH5 branch (" + to_string(branch) + ") over " + psi.name();
  return out;
}

}  // namespace

BuiltChart build_family_CH5(CH5Branch branch, const CH5Params& params, const std::vector<ChartImmersion>& plugins,
                            const BuildOptions& opts) {
  switch (branch) {
    case CH5Branch::iii:
    case CH5Branch::iv:
      require(plugins.size() == 1, "CH5 (iii)/(iv): exactly one plugin expected");
      return build_ch5_mu_branch(branch, params.c, plugins[0], opts);
    case CH5Branch::v: {
      require(plugins.size() == 1, "CH5 (v): exactly one plugin expected");
      PluginRequirements req;
      req.horizontal = false;
      BuiltChart b = build_ch5_t_branch(branch, params.t_half_width, plugins[0], opts);
      check_plugin(plugins[0], req, opts, b);
      return b;
    }
    case CH5Branch::vi: {
      require(plugins.size() == 2, "CH5 (vi): exactly two surfaces expected");
      PluginRequirements req;
      req.horizontal = false;
      req.delta2_ideal = false;
      std::vector<PluginReport> reports;
      for (const auto& s : plugins) {
        require(s.space() == AmbientSpace::complex_euclidean(2) && s.dimension() == 2,
                "CH5 (vi): factors must be surfaces in C^2");
        BuiltChart tmp{s, {}, true, "", {}};
        check_plugin(s, req, opts, tmp);
        reports.insert(reports.end(), tmp.plugin_reports.begin(), tmp.plugin_reports.end());
      }
      BuiltChart b = build_ch5_t_branch(branch, params.t_half_width, product_immersion(plugins[0], plugins[1]), opts);
      b.plugin_reports = reports;
      return b;
    }
  }
  fail(ErrorCode::internal, "unreachable");
}

BuiltChart ch5_sech_example(double t_half_width, double u_half_width) {
  Box dom = prepend(-t_half_width, t_half_width, Box::cube(4, u_half_width));
  JetMap jm = [](std::span<const Jet<double>> x) {
    const Jet<double>& t = x[0];
    const JetLayout& L = t.layout();
    Jet<double> S(L, 0.0);
    for (int k = 1; k <= 4; ++k) S += x[k] * x[k];
    Jet<double> C = cosh(t * 2.0);
    Jet<cplx> pre = expi(atan(tanh(t))) * reciprocal(sqrt(C));
    Jet<double> half(L, 0.5);
    std::vector<Jet<cplx>> out;
    out.push_back(pre * make_complex(half + S * 0.5 + C * 0.5, -t));
    out.push_back(pre * make_complex(t, S * 0.5 + C * 0.5 - 0.5));
    for (int k = 1; k <= 4; ++k) out.push_back(pre * x[k]);
    return out;
  };
  BuiltChart b{ChartImmersion("ch5-sech-example", dom, AmbientSpace::complex_hyperbolic(5), jm), {}, true, "", {}};
  b.expected_mu = [](const Eigen::VectorXd& u) { return 1.0 / std::cosh(2.0 * u[0]); };
  b.description = "closed-form lift into H^11_1 with mu = sech 2t";
  return b;
}

BuiltChart ratio4_extensor(double mu0, double span) {
  PlanarCurve g = ratio4_generating_curve(mu0, span);
  BuiltChart b{complex_extensor(g, 5).renamed("ratio4-extensor"), {}, true, "", {}};
  auto mu = g.mu;
  b.expected_mu = [mu](const Eigen::VectorXd& u) { return mu(u[0]); };
  b.description = "complex extensor of the ratio-4 curve, mu0 = " + fmt(mu0);
  return b;
}

Ratio4Legendre ratio4_legendre_flow(double mu0, double t_min, double t_max, double step) {
  require(mu0 > 0.0, "ratio-4 Legendre: mu0 must be positive");
  const double s = 1.0 / std::sqrt(1.0 + mu0 * mu0);
  // (mu, nu, z1, z2, z1', z2') with complex entries split into real pairs
  DenseSolution::State y0{mu0, 0.0, 0.0, -mu0 * s, s, 0.0, -s, 0.0, 0.0, mu0 * s};
  DenseSolution::Rhs rhs = [](const DenseSolution::State& y, DenseSolution::State& dy, double) {
    const double mu = y[0], nu = y[1], lam = 4.0 * mu;
    dy[0] = 2.0 * mu * nu;
    dy[1] = -3.0 * mu * mu - nu * nu - 1.0;
    for (int k = 0; k < 2; ++k) {
      cplx z(y[2 + 2 * k], y[3 + 2 * k]), dz(y[6 + 2 * k], y[7 + 2 * k]);
      cplx d2 = cplx(0.0, lam) * dz - z;
      dy[2 + 2 * k] = dz.real();
      dy[3 + 2 * k] = dz.imag();
      dy[6 + 2 * k] = d2.real();
      dy[7 + 2 * k] = d2.imag();
    }
  };
  Ratio4Legendre f{DenseSolution(rhs, y0, 0.0, t_min, t_max, step), mu0};
  for (double t : {t_min, t_max})
    if (f.solution.at(t)[0] <= 0.0) fail(ErrorCode::domain_error, "ratio-4 Legendre: mu reaches zero inside the span");
  return f;
}

BuiltChart cp5_ratio4_legendre(double mu0, double span) {
  if (span <= 0.0) span = 0.3;
  auto flow = std::make_shared<Ratio4Legendre>(ratio4_legendre_flow(mu0, -span, span));
  JetMap jm = [flow](std::span<const Jet<double>> x) {
    const Jet<double>& t = x[0];
    auto y = flow->solution.at(t.value());
    const double mu = y[0], nu = y[1];
    const double dmu = 2.0 * mu * nu, lam = 4.0 * mu, dlam = 4.0 * dmu;
    std::array<Jet<cplx>, 2> z;
    for (int k = 0; k < 2; ++k) {
      cplx z0(y[2 + 2 * k], y[3 + 2 * k]), z1(y[6 + 2 * k], y[7 + 2 * k]);
      cplx z2 = cplx(0.0, lam) * z1 - z0;
      cplx z3 = cplx(0.0, dlam) * z1 + cplx(0.0, lam) * z2 - z1;
      z[k] = compose_complex(t, {z0, z1, z2, z3});
    }
    std::vector<Jet<cplx>> out{z[0]};
    for (auto& yk : sphere_point(x.subspan(1))) out.push_back(z[1] * yk);
    return out;
  };
  Box dom = prepend(-span, span, Box::cube(4, 0.5));
  BuiltChart b{ChartImmersion("cp5-ratio4", dom, AmbientSpace::complex_projective(5), jm), {}, true, "", {}};
  b.expected_mu = [flow](const Eigen::VectorXd& u) { return flow->solution.at(u[0])[0]; };
  b.description = "ratio-4 H-umbilical lift into S^11 from the Legendre curve with lambda = 4 mu, mu0 = " + fmt(mu0);
  return b;
}

}  // namespace lagdelta
