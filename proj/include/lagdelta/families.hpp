#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagdelta/curvature.hpp"
#include "lagdelta/immersion.hpp"
#include "lagdelta/ode.hpp"

namespace lagdelta {

// planar curve gamma: (t_min, t_max) -> C, evaluated on jets
struct PlanarCurve {
  std::string name;
  double t_min = 0.0;
  double t_max = 0.0;
  std::function<Jet<cplx>(const Jet<double>&)> map;
  // H-umbilical mu along the curve when known (ratio-4 curves)
  std::function<double(double)> mu;
};

PlanarCurve unit_circle_curve();
PlanarCurve ray_curve();
// gamma = e^{-i phi} / (nu + i mu) with (mu, nu, phi) from the C5 system, nu(0) = 0;
// span <= 0 picks +-0.4/mu0
PlanarCurve ratio4_generating_curve(double mu0, double span = 0.0);

// (t, s) -> gamma(t) y(s) with y(s) = (s, 1)/sqrt(1 + |s|^2) on S^{n-1}
ChartImmersion complex_extensor(const PlanarCurve& gamma, int n = 5, double sphere_half_width = 0.5);

// ---- plugins -------------------------------------------------------------

// s -> (s, 1)/sqrt(1 + |s|^2): real points of S^m in C^{m+1}, a horizontal totally geodesic lift
ChartImmersion totally_real_sphere(int m = 4, double half_width = 0.5);
// s -> (sqrt(1 + |s|^2), s): real points of H^m in C^{m+1}_1
ChartImmersion totally_real_hyperboloid(int m = 4, double half_width = 0.5);
// u -> u + i grad f(u) in C^2 for harmonic f; rejects non-harmonic or affine-gradient input
ChartImmersion harmonic_gradient_surface(const Polynomial& f, double half_width = 0.5, bool allow_flat = false);
// a x b into C^{n_a + n_b}; both factors flat
ChartImmersion product_immersion(const ChartImmersion& a, const ChartImmersion& b);

struct PluginRequirements {
  bool horizontal = true;
  bool minimal = true;
  bool delta2_ideal = true;
  bool non_totally_geodesic = true;
};

struct PropertyCheck {
  std::string name;
  bool required = false;
  bool passed = false;
  // max residual, or max |h| for the non-totally-geodesic property
  double value = 0.0;
};

struct PluginReport {
  std::string plugin;
  std::vector<PropertyCheck> checks;
  int points = 0;
  bool passed() const;
  std::string failures() const;
};

struct PluginTolerances {
  double constraint = 1e-8;
  double horizontal = 1e-8;
  double mean_curvature = 1e-7;
  double delta2 = 1e-5;
  double totally_geodesic = 1e-6;
  int samples = 8;
};

PluginReport verify_plugin(const ChartImmersion& phi, const PluginRequirements& req,
                           const PluginTolerances& tol = {});

// ---- w potential ---------------------------------------------------------

// w with dw = 2 <d psi, i psi>, anchored at the origin (or the box center if the
// origin is outside) by straight-line Gauss-Kronrod quadrature
class WPotential {
 public:
  explicit WPotential(ChartImmersion psi, double closed_tol = 1e-8);

  const ChartImmersion& psi() const { return psi_; }
  const Eigen::VectorXd& anchor() const { return anchor_; }
  double value(const Eigen::VectorXd& u) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;
  // Taylor jet of w in psi's own variables at u, of the given order
  Jet<double> taylor(const Eigen::VectorXd& u, int order) const;
  // 4 <psi_j, i psi_i>: the exterior derivative of the 1-form; zero iff psi is Lagrangian
  double closedness_residual(const Eigen::VectorXd& u) const;
  // integral of dw around the square of the given side in the (i, j) plane centred at u
  double loop_residual(const Eigen::VectorXd& u, int i, int j, double side) const;
  // max loop residual over sample points and coordinate planes
  double max_loop_residual(int grid = 3, double side = 0.1) const;
  // |w(u) by the straight path - w(u) by the coordinate staircase path|
  double path_independence_residual(const Eigen::VectorXd& u) const;

 private:
  double line_integral(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  ChartImmersion psi_;
  Eigen::VectorXd anchor_;
};

WPotential integrate_w(const ChartImmersion& psi);

// ---- family builders -----------------------------------------------------

struct BuildOptions {
  bool allow_totally_geodesic = false;
  // printed (uncorrected) variants of the CH5 formulas, kept for comparison
  bool ch5_printed_phase = false;
  bool ch5_statement_theta = false;
  bool ch5_printed_phi = false;
  bool negative_branch = false;
  bool verify_plugins = true;
  // relative shrink of open mu-intervals away from radicand zeros
  double margin = 1e-3;
  PluginTolerances plugin_tolerances;
};

struct BuiltChart {
  ChartImmersion chart;
  // H-umbilical / pattern mu predicted at a chart point, when the construction fixes it
  std::function<double(const Eigen::VectorXd&)> expected_mu;
  bool improved_ideal = true;
  std::string description;
  std::vector<PluginReport> plugin_reports;
};

enum class CH5Branch { iii, iv, v, vi };
std::string to_string(CH5Branch b);
CH5Branch parse_ch5_branch(const std::string& s);

// open mu-intervals of the mu-parametrized constructions
std::pair<double, double> mu_interval_C5(double c, double margin = 1e-3);
std::pair<double, double> mu_interval_CP5(double c, double margin = 1e-3);
std::pair<double, double> mu_interval_CH5(CH5Branch b, double c, double margin = 1e-3);

BuiltChart build_family_C5(double c, const ChartImmersion& phi, const BuildOptions& opts = {});
BuiltChart build_family_CP5(double c, const ChartImmersion& phi, const BuildOptions& opts = {});

struct CH5Params {
  double c = 0.5;
  double t_half_width = 0.5;
};
// (iii), (iv): one plugin into H^9_1 resp. S^9; (v): one plugin into C^4; (vi): two surfaces in C^2
BuiltChart build_family_CH5(CH5Branch branch, const CH5Params& params, const std::vector<ChartImmersion>& plugins,
                            const BuildOptions& opts = {});

// the closed-form lift with mu = sech 2t
BuiltChart ch5_sech_example(double t_half_width = 1.0, double u_half_width = 0.5);
// complex extensor of the ratio-4 generating curve in C^5
BuiltChart ratio4_extensor(double mu0, double span = 0.0);
// (z1(t), z2(t) y(s)) in S^11 from the Legendre curve with lambda = 4 mu
BuiltChart cp5_ratio4_legendre(double mu0, double span = 0.0);

// joint (mu, nu, z, z') flow used by cp5_ratio4_legendre; exposed for tests
struct Ratio4Legendre {
  DenseSolution solution;
  double mu0;
};
Ratio4Legendre ratio4_legendre_flow(double mu0, double t_min, double t_max, double step = 1e-3);

}  // namespace lagdelta
