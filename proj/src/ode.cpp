#include "lagdelta/ode.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include "lagdelta/error.hpp"

namespace lagdelta {

namespace {
using Stepper = boost::numeric::odeint::runge_kutta4<std::vector<double>>;
}

std::string to_string(OdeFamily f) {
  switch (f) {
    case OdeFamily::C5: return "C5";
    case OdeFamily::CP5: return "CP5";
    case OdeFamily::CH5: return "CH5";
  }
  return "?";
}

std::string to_string(FamilyClass f) {
  switch (f) {
    case FamilyClass::C5: return "C5";
    case FamilyClass::CP5: return "CP5";
    case FamilyClass::CH5_k_positive: return "CH5k>0";
    case FamilyClass::CH5_k_negative: return "CH5k<0";
    case FamilyClass::CH5_k_zero: return "CH5k=0";
  }
  return "?";
}

double ambient_c(OdeFamily f) { return f == OdeFamily::C5 ? 0.0 : f == OdeFamily::CP5 ? 1.0 : -1.0; }
double angle_rate(OdeFamily f) { return f == OdeFamily::C5 ? -4.0 : 1.0; }

double first_integral(OdeFamily f, double mu, double nu) { return mu * (nu * nu + mu * mu + ambient_c(f)); }

double radicand(OdeFamily f, double invariant, double mu) { return invariant / mu - mu * mu - ambient_c(f); }

OdeState make_state(OdeFamily f, double t, double mu, double nu, double theta) {
  if (!(mu > 0.0)) fail(ErrorCode::domain_error, "ode: mu must be positive");
  OdeState s{t, mu, nu, theta, 0.0, FamilyClass::C5};
  double I = first_integral(f, mu, nu);
  switch (f) {
    case OdeFamily::C5:
      s.family = FamilyClass::C5;
      s.c_param = std::sqrt(std::max(I, 0.0));
      break;
    case OdeFamily::CP5:
      s.family = FamilyClass::CP5;
      s.c_param = std::sqrt(std::max(I, 0.0));
      break;
    case OdeFamily::CH5: {
      double k = -I;
      s.family = std::abs(k) < 1e-12 ? FamilyClass::CH5_k_zero
                 : k > 0.0           ? FamilyClass::CH5_k_positive
                                     : FamilyClass::CH5_k_negative;
      s.c_param = std::sqrt(std::abs(k));
      break;
    }
  }
  return s;
}

std::array<std::array<double, 4>, 3> state_derivatives(OdeFamily f, double mu, double nu, double theta) {
  const double c = ambient_c(f), w = angle_rate(f);
  const double m1 = 2.0 * mu * nu;
  const double n1 = -3.0 * mu * mu - nu * nu - c;
  const double m2 = 2.0 * (m1 * nu + mu * n1);
  const double n2 = -6.0 * mu * m1 - 2.0 * nu * n1;
  const double m3 = 2.0 * (m2 * nu + 2.0 * m1 * n1 + mu * n2);
  const double n3 = -6.0 * (m1 * m1 + mu * m2) - 2.0 * (n1 * n1 + nu * n2);
  return {{{mu, m1, m2, m3}, {nu, n1, n2, n3}, {theta, w * mu, w * m1, w * m2}}};
}

DenseSolution::Rhs mu_nu_rhs(OdeFamily f) {
  const double c = ambient_c(f), w = angle_rate(f);
  return [c, w](const std::vector<double>& y, std::vector<double>& dy, double) {
    dy[0] = 2.0 * y[0] * y[1];
    dy[1] = -3.0 * y[0] * y[0] - y[1] * y[1] - c;
    dy[2] = w * y[0];
  };
}

Trajectory integrate_mu_nu(OdeFamily f, const OdeState& init, double t_end, double step) {
  require(step > 0.0, "ode: step must be positive");
  Trajectory tr;
  tr.family = f;
  OdeState s0 = make_state(f, init.t, init.mu, init.nu, init.theta);
  tr.invariant = first_integral(f, s0.mu, s0.nu);
  tr.states.push_back(s0);
  const double dir = t_end >= init.t ? 1.0 : -1.0;
  const long count = std::lround(std::abs(t_end - init.t) / step);
  const double h = count > 0 ? (t_end - init.t) / count : 0.0;
  Stepper stepper;
  auto rhs = mu_nu_rhs(f);
  std::vector<double> y{s0.mu, s0.nu, s0.theta};
  (void)dir;
  for (long i = 0; i < count; ++i) {
    double t = init.t + i * h;
    stepper.do_step(rhs, y, t, h);
    if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || y[0] <= 1e-12 || std::abs(y[1]) > 1e8) {
      tr.truncated = true;
      tr.reason = "left the admissible mu-interval near t = " + std::to_string(t + h);
      break;
    }
    OdeState s = s0;
    s.t = init.t + (i + 1) * h;
    s.mu = y[0];
    s.nu = y[1];
    s.theta = y[2];
    tr.states.push_back(s);
  }
  return tr;
}

double first_integral_residual(const Trajectory& traj) {
  double r = 0.0;
  for (const auto& s : traj.states)
    r = std::max(r, std::abs(s.nu * s.nu - radicand(traj.family, traj.invariant, s.mu)));
  return r;
}

DenseSolution::DenseSolution(Rhs rhs, State y0, double t0, double t_min, double t_max, double step)
    : rhs_(std::move(rhs)), t0_(t0), t_min_(t_min), t_max_(t_max), step_(step) {
  require(step > 0.0 && t_min <= t0 && t0 <= t_max, "dense solution: bad span");
  const long back = static_cast<long>(std::ceil((t0 - t_min) / step)) + 1;
  const long fwd = static_cast<long>(std::ceil((t_max - t0) / step)) + 1;
  origin_ = back;
  nodes_.assign(back + fwd + 1, State{});
  nodes_[origin_] = y0;
  Stepper stepper;
  auto check = [](const State& y) {
    for (double v : y)
      if (!std::isfinite(v)) fail(ErrorCode::domain_error, "dense solution: state blew up inside the span");
  };
  State y = y0;
  for (long i = 1; i <= fwd; ++i) {
    stepper.do_step(rhs_, y, t0 + (i - 1) * step, step);
    check(y);
    nodes_[origin_ + i] = y;
  }
  y = y0;
  for (long i = 1; i <= back; ++i) {
    stepper.do_step(rhs_, y, t0 - (i - 1) * step, -step);
    check(y);
    nodes_[origin_ - i] = y;
  }
}

DenseSolution::State DenseSolution::at(double t) const {
  if (t < t_min_ - 1e-12 || t > t_max_ + 1e-12) fail(ErrorCode::domain_error, "dense solution: t outside the tabulated span");
  long i = std::lround((t - t0_) / step_);
  i = std::clamp(i, -origin_, static_cast<long>(nodes_.size()) - 1 - origin_);
  State y = nodes_[origin_ + i];
  const double tn = t0_ + i * step_;
  if (t != tn) {
    Stepper stepper;
    stepper.do_step(rhs_, y, tn, t - tn);
  }
  return y;
}

LegendreCurve integrate_legendre(std::function<double(double)> lambda, const AmbientSpace& model,
                                 const Eigen::Vector2cd& z0, const Eigen::Vector2cd& dz0, double t0, double t1,
                                 double step) {
  require(model.n() == 1 && model.c() != 0, "legendre: model must be S^3(1) or H^3_1(-1)");
  require(step > 0.0, "legendre: step must be positive");
  const double eps = model.epsilon();
  LegendreCurve out;
  out.model = model;
  out.lambda = lambda;

  auto invariants = [&](const Eigen::Vector2cd& z, const Eigen::Vector2cd& dz) {
    AmbientVector a = z, b = dz;
    out.max_constraint = std::max(out.max_constraint, model.sphere_constraint_residual(a));
    out.max_speed = std::max(out.max_speed, std::abs(model.inner(b, b) - 1.0));
    out.max_horizontal = std::max(out.max_horizontal, model.horizontality_residual(a, b));
  };
  invariants(z0, dz0);
  if (out.max_constraint > 1e-9 || out.max_speed > 1e-8 || out.max_horizontal > 1e-9)
    fail(ErrorCode::invalid_argument, "legendre: initial data must be on the model, unit speed and horizontal");

  // real state (Re z1, Im z1, Re z2, Im z2, then the same for z')
  auto rhs = [&](const std::vector<double>& y, std::vector<double>& dy, double t) {
    const double lam = lambda(t);
    for (int k = 0; k < 2; ++k) {
      cplx z(y[2 * k], y[2 * k + 1]), dz(y[4 + 2 * k], y[5 + 2 * k]);
      cplx d2z = cplx(0.0, lam) * dz - eps * z;
      dy[2 * k] = dz.real();
      dy[2 * k + 1] = dz.imag();
      dy[4 + 2 * k] = d2z.real();
      dy[5 + 2 * k] = d2z.imag();
    }
  };
  std::vector<double> y{z0[0].real(), z0[0].imag(), z0[1].real(), z0[1].imag(),
                        dz0[0].real(), dz0[0].imag(), dz0[1].real(), dz0[1].imag()};
  auto unpack = [](const std::vector<double>& v, double t) {
    LegendreSample s;
    s.t = t;
    s.z << cplx(v[0], v[1]), cplx(v[2], v[3]);
    s.dz << cplx(v[4], v[5]), cplx(v[6], v[7]);
    return s;
  };
  out.samples.push_back(unpack(y, t0));
  const long count = std::max(1L, std::lround(std::abs(t1 - t0) / step));
  const double h = (t1 - t0) / count;
  Stepper stepper;
  for (long i = 0; i < count; ++i) {
    stepper.do_step(rhs, y, t0 + i * h, h);
    auto s = unpack(y, t0 + (i + 1) * h);
    invariants(s.z, s.dz);
    out.samples.push_back(s);
  }
  double worst = std::max({out.max_constraint, out.max_speed, out.max_horizontal});
  if (worst > 1e-7) fail(ErrorCode::nonconvergence, "legendre: invariant drift " + std::to_string(worst) + " (step too large)");
  return out;
}

double ratio_ode_residual(double mu, double dmu, double d2mu, double r, double c) {
  if (r == 2.0) fail(ErrorCode::invalid_argument, "ratio ODE is undefined for r = 2");
  return mu * d2mu - ((r - 3.0) / (r - 2.0)) * dmu * dmu + (r - 2.0) * mu * mu * ((r - 1.0) * mu * mu + c);
}

double ratio_ode_residual(const std::vector<double>& t, const std::vector<double>& mu, double r, double c) {
  if (r == 2.0) fail(ErrorCode::invalid_argument, "ratio ODE is undefined for r = 2");
  require(t.size() == mu.size() && t.size() >= 5, "ratio ODE: need at least five uniform samples");
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < mu.size(); ++i) {
    double d1 = (-mu[i + 2] + 8.0 * mu[i + 1] - 8.0 * mu[i - 1] + mu[i - 2]) / (12.0 * h);
    double d2 = (-mu[i + 2] + 16.0 * mu[i + 1] - 30.0 * mu[i] + 16.0 * mu[i - 1] - mu[i - 2]) / (12.0 * h * h);
    worst = std::max(worst, std::abs(ratio_ode_residual(mu[i], d1, d2, r, c)));
  }
  return worst;
}

}  // namespace lagdelta
