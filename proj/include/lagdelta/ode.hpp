#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagdelta/ambient.hpp"

namespace lagdelta {

// The three (mu, nu) systems share nu' = -3mu^2 - nu^2 - c, mu' = 2 mu nu with c the
// ambient sign; the angle obeys theta' = mu (CP5, CH5) or phi' = -4 mu (C5).
enum class OdeFamily { C5, CP5, CH5 };
enum class FamilyClass { C5, CP5, CH5_k_positive, CH5_k_negative, CH5_k_zero };

std::string to_string(OdeFamily f);
std::string to_string(FamilyClass f);
double ambient_c(OdeFamily f);
double angle_rate(OdeFamily f);

struct OdeState {
  double t = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double theta = 0.0;
  // c of the first integral for C5/CP5; sqrt|k| for CH5
  double c_param = 0.0;
  FamilyClass family = FamilyClass::C5;
};

// I = mu (nu^2 + mu^2 + c); equals c^2 (C5, CP5) and -k (CH5)
double first_integral(OdeFamily f, double mu, double nu);
// nu^2 predicted by the first integral: I/mu - mu^2 - c
double radicand(OdeFamily f, double invariant, double mu);
OdeState make_state(OdeFamily f, double t, double mu, double nu, double theta = 0.0);

// derivatives of (mu, nu, theta) of orders 1..3 at a state; index [quantity][order]
std::array<std::array<double, 4>, 3> state_derivatives(OdeFamily f, double mu, double nu, double theta);

struct Trajectory {
  OdeFamily family = OdeFamily::C5;
  std::vector<OdeState> states;
  double invariant = 0.0;
  bool truncated = false;
  std::string reason;
};

// classical RK4; integrates from init.t towards t_end (either direction)
Trajectory integrate_mu_nu(OdeFamily f, const OdeState& init, double t_end, double step = 1e-3);
double first_integral_residual(const Trajectory& traj);

// Tabulated RK4 solution; values between nodes come from one RK4 step off the nearest node.
class DenseSolution {
 public:
  using State = std::vector<double>;
  using Rhs = std::function<void(const State&, State&, double)>;

  DenseSolution(Rhs rhs, State y0, double t0, double t_min, double t_max, double step = 1e-3);
  State at(double t) const;
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }

 private:
  Rhs rhs_;
  double t0_, t_min_, t_max_, step_;
  std::vector<State> nodes_;  // nodes_[i] at t0 + (i - origin_) * step
  long origin_ = 0;
};

DenseSolution::Rhs mu_nu_rhs(OdeFamily f);

struct LegendreSample {
  double t = 0.0;
  Eigen::Vector2cd z;
  Eigen::Vector2cd dz;
};

struct LegendreCurve {
  AmbientSpace model = AmbientSpace::complex_projective(1);
  std::function<double(double)> lambda;
  std::vector<LegendreSample> samples;
  double max_constraint = 0.0;
  double max_speed = 0.0;
  double max_horizontal = 0.0;
};

// z'' = i lambda z' - eps z on S^3(1) (eps = 1) or H^3_1(-1) (eps = -1)
LegendreCurve integrate_legendre(std::function<double(double)> lambda, const AmbientSpace& model,
                                 const Eigen::Vector2cd& z0, const Eigen::Vector2cd& dz0, double t0, double t1,
                                 double step = 1e-3);

// mu mu'' - ((r-3)/(r-2)) mu'^2 + (r-2) mu^2 ((r-1) mu^2 + c)
double ratio_ode_residual(double mu, double dmu, double d2mu, double r, double c);
// uniform samples; derivatives by fourth-order central differences at interior points
double ratio_ode_residual(const std::vector<double>& t, const std::vector<double>& mu, double r, double c);

}  // namespace lagdelta
