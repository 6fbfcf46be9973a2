#include "lagdelta/ambient.hpp"

#include <cmath>

#include "lagdelta/error.hpp"

namespace lagdelta {

AmbientSpace AmbientSpace::complex_euclidean(int n) {
  require(n >= 1, "ambient: dimension must be positive");
  return AmbientSpace(n, 0);
}
AmbientSpace AmbientSpace::complex_projective(int n) {
  require(n >= 1, "ambient: dimension must be positive");
  return AmbientSpace(n, 1);
}
AmbientSpace AmbientSpace::complex_hyperbolic(int n) {
  require(n >= 1, "ambient: dimension must be positive");
  return AmbientSpace(n, -1);
}
AmbientSpace AmbientSpace::for_curvature(int n, int c) {
  require(c >= -1 && c <= 1, "ambient: curvature sign must be -1, 0 or 1");
  return c == 0 ? complex_euclidean(n) : c > 0 ? complex_projective(n) : complex_hyperbolic(n);
}

ModelKind AmbientSpace::kind() const {
  return c_ == 0 ? ModelKind::flat : c_ > 0 ? ModelKind::sphere : ModelKind::anti_de_sitter;
}

double AmbientSpace::epsilon() const { return c_ >= 0 ? 1.0 : -1.0; }

std::string AmbientSpace::name() const {
  std::string d = std::to_string(n_);
  return c_ == 0 ? "C" + d : c_ > 0 ? "CP" + d : "CH" + d;
}

void AmbientSpace::check(const AmbientVector& u) const {
  if (u.size() != model_dim())
    fail(ErrorCode::invalid_argument, "ambient: vector has " + std::to_string(u.size()) +
                                          " components, model " + name() + " needs " +
                                          std::to_string(model_dim()));
}

cplx AmbientSpace::hermitian(const AmbientVector& u, const AmbientVector& v) const {
  check(u);
  check(v);
  cplx s = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) s += u[j] * std::conj(v[j]);
  if (signature_index() == 1) s -= 2.0 * u[0] * std::conj(v[0]);
  return s;
}

double AmbientSpace::inner(const AmbientVector& u, const AmbientVector& v) const {
  return hermitian(u, v).real();
}

double AmbientSpace::sphere_constraint_residual(const AmbientVector& z) const {
  if (c_ == 0) fail(ErrorCode::invalid_argument, "ambient: C^n has no constraint hypersurface");
  return std::abs(inner(z, z) - epsilon());
}

double AmbientSpace::horizontality_residual(const AmbientVector& z, const AmbientVector& dz) const {
  return std::abs(inner(dz, apply_J(z)));
}

namespace {

// real-bilinear B with pi(z) = B(z, z)
std::array<double, 3> hopf_bilinear(const AmbientSpace& space, const AmbientVector& a, const AmbientVector& b) {
  cplx m = a[0] * std::conj(b[1]);
  double p = (a[0] * std::conj(b[0])).real();
  double q = (a[1] * std::conj(b[1])).real();
  if (space.c() > 0) return {m.real(), m.imag(), 0.5 * (p - q)};
  return {0.5 * (p + q), m.real(), m.imag()};
}

void check_curve_space(const AmbientSpace& space) {
  require(space.c() != 0 && space.n() == 1, "hopf: needs the S^3 or H^3_1 model (n = 1, c != 0)");
}

// metric of the target quadric's ambient R^3 or R^{1,2}
double target_dot(const AmbientSpace& space, const std::array<double, 3>& x, const std::array<double, 3>& y) {
  double s = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
  return space.c() > 0 ? s : s - 2.0 * x[0] * y[0];
}

}  // namespace

std::array<double, 3> hopf_project_curve_point(const AmbientSpace& space, const AmbientVector& z, double tol) {
  check_curve_space(space);
  double r = space.sphere_constraint_residual(z);
  if (r > tol) fail(ErrorCode::domain_error, "hopf: point is off the model hypersurface (residual " + std::to_string(r) + ")");
  return hopf_bilinear(space, z, z);
}

double projected_speed(const AmbientSpace& space, const AmbientVector& z, const AmbientVector& dz) {
  check_curve_space(space);
  auto a = hopf_bilinear(space, dz, z);
  auto b = hopf_bilinear(space, z, dz);
  std::array<double, 3> x1{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
  return std::sqrt(std::abs(target_dot(space, x1, x1)));
}

double projected_curvature(const AmbientSpace& space, const AmbientVector& z, const AmbientVector& dz,
                           const AmbientVector& d2z) {
  check_curve_space(space);
  auto x = hopf_bilinear(space, z, z);
  std::array<double, 3> x1{}, x2{};
  auto a = hopf_bilinear(space, dz, z), b = hopf_bilinear(space, z, dz);
  auto p = hopf_bilinear(space, d2z, z), q = hopf_bilinear(space, z, d2z), r = hopf_bilinear(space, dz, dz);
  for (int k = 0; k < 3; ++k) {
    x1[k] = a[k] + b[k];
    x2[k] = p[k] + q[k] + 2.0 * r[k];
  }
  double det = x[0] * (x1[1] * x2[2] - x1[2] * x2[1]) - x[1] * (x1[0] * x2[2] - x1[2] * x2[0]) +
               x[2] * (x1[0] * x2[1] - x1[1] * x2[0]);
  double radius = std::sqrt(std::abs(target_dot(space, x, x)));
  double speed = std::sqrt(std::abs(target_dot(space, x1, x1)));
  // oriented so that z'' = i lambda z' - eps z projects with curvature +lambda
  return -det / (radius * speed * speed * speed);
}

}  // namespace lagdelta
