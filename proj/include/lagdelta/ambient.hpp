#pragma once

#include <array>
#include <complex>
#include <string>

#include <Eigen/Dense>

namespace lagdelta {

using cplx = std::complex<double>;
using AmbientVector = Eigen::VectorXcd;

enum class ModelKind { flat, sphere, anti_de_sitter };

// C^n (c = 0), or the lift models S^{2n+1} in C^{n+1} (c = 1) and
// H^{2n+1}_1 in C^{n+1}_1 (c = -1). Holomorphic sectional curvature is 4c.
class AmbientSpace {
 public:
  static AmbientSpace complex_euclidean(int n);
  static AmbientSpace complex_projective(int n);
  static AmbientSpace complex_hyperbolic(int n);
  static AmbientSpace for_curvature(int n, int c);

  int n() const { return n_; }
  int c() const { return c_; }
  int signature_index() const { return c_ < 0 ? 1 : 0; }
  int model_dim() const { return c_ == 0 ? n_ : n_ + 1; }
  ModelKind kind() const;
  // +1 on the sphere model, -1 on the anti-de Sitter model
  double epsilon() const;
  std::string name() const;

  cplx hermitian(const AmbientVector& u, const AmbientVector& v) const;
  double inner(const AmbientVector& u, const AmbientVector& v) const;
  static AmbientVector apply_J(const AmbientVector& u) { return u * cplx(0.0, 1.0); }
  // omega(X, Y) = <JX, Y>
  double omega(const AmbientVector& u, const AmbientVector& v) const { return inner(apply_J(u), v); }

  double sphere_constraint_residual(const AmbientVector& z) const;
  double horizontality_residual(const AmbientVector& z, const AmbientVector& dz) const;

  bool operator==(const AmbientSpace& o) const { return n_ == o.n_ && c_ == o.c_; }

 private:
  AmbientSpace(int n, int c) : n_(n), c_(c) {}
  void check(const AmbientVector& u) const;
  int n_;
  int c_;
};

inline double inner(const AmbientVector& u, const AmbientVector& v, const AmbientSpace& space) {
  return space.inner(u, v);
}

// curves in S^3(1) or H^3_1(-1); space must be the n = 1 lift model
std::array<double, 3> hopf_project_curve_point(const AmbientSpace& space, const AmbientVector& z,
                                               double tol = 1e-9);

// geodesic curvature of the projected curve pi(z(t)) on S^2(1/2) or H^2(-1/2),
// signed by -det(x, x', x''), so a Legendre curve z'' = i lambda z' - eps z gives +lambda
double projected_curvature(const AmbientSpace& space, const AmbientVector& z, const AmbientVector& dz,
                           const AmbientVector& d2z);
double projected_speed(const AmbientSpace& space, const AmbientVector& z, const AmbientVector& dz);

}  // namespace lagdelta
