#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lagdelta/immersion.hpp"

namespace lagdelta {

// h(i, j, k) = h^i_{jk} = <h(e_j, e_k), J e_i>
class CubicForm {
 public:
  CubicForm() = default;
  explicit CubicForm(int m) : m_(m), v_(static_cast<std::size_t>(m) * m * m, 0.0) {}

  int dim() const { return m_; }
  double& operator()(int i, int j, int k) { return v_[(i * m_ + j) * m_ + k]; }
  double operator()(int i, int j, int k) const { return v_[(i * m_ + j) * m_ + k]; }
  const std::vector<double>& data() const { return v_; }

  double symmetry_residual() const;
  CubicForm symmetrized() const;
  // components in the frame e'_a = sum_b Q(b, a) e_b
  CubicForm rotated(const Eigen::MatrixXd& Q) const;
  // t_i = sum_j h^i_{jj}; the mean curvature vector is (1/m) sum_i t_i J e_i
  Eigen::VectorXd trace_vector() const;
  double mean_sq() const;
  double norm() const;
  double distance(const CubicForm& o) const;

 private:
  int m_ = 0;
  std::vector<double> v_;
};

struct PointGeometry {
  int dim = 0;
  double c = 0.0;
  std::vector<AmbientVector> frame;
  // e_a = sum_i B(i, a) dL/du_i
  Eigen::MatrixXd basis_change;
  Eigen::MatrixXd metric;
  CubicForm h;
  double mean_sq = 0.0;
  Eigen::VectorXd mean_curvature;
  // lift bookkeeping: deviation of the L and JL components from -eps*delta and 0
  double umbilical_residual = 0.0;
  double vertical_residual = 0.0;
  // part of the second derivatives outside span{e_i, J e_i, L, JL}
  double normal_residual = 0.0;
};

struct SffOptions {
  double tolerance = 1e-7;
  double floor = 1e-6;
};

PointGeometry second_fundamental_form(const ChartImmersion& f, const Eigen::VectorXd& u, const SffOptions& opts = {});
PointGeometry second_fundamental_form(const AmbientSpace& space, const Jet3& jet, const SffOptions& opts = {});
// synthetic point: identity frame, given cubic form
PointGeometry geometry_from_cubic_form(const CubicForm& h, double c);

// Gram-Schmidt with column pivoting in the metric g; returns B with B^T g B = I
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& g);

class CurvatureTensor {
 public:
  CurvatureTensor() = default;
  explicit CurvatureTensor(int m) : m_(m), r_(static_cast<std::size_t>(m) * m * m * m, 0.0) {}
  static CurvatureTensor constant(int m, double c);
  static CurvatureTensor from_data(int m, std::vector<double> data);

  int dim() const { return m_; }
  double& operator()(int i, int j, int k, int l) { return r_[((i * m_ + j) * m_ + k) * m_ + l]; }
  double operator()(int i, int j, int k, int l) const { return r_[((i * m_ + j) * m_ + k) * m_ + l]; }
  const std::vector<double>& data() const { return r_; }

  double sectional(int i, int j) const { return (*this)(i, j, j, i); }
  double scalar() const;
  // max violation of antisymmetries, pair symmetry and the first Bianchi identity
  double symmetry_residual() const;
  CurvatureTensor rotated(const Eigen::MatrixXd& Q) const;
  double max_abs_difference(const CurvatureTensor& o) const;
  // quadratic form on bivectors (basis e_i ^ e_j, i < j) whose value on a unit
  // simple bivector is the sectional curvature
  Eigen::MatrixXd bivector_operator() const;

 private:
  int m_ = 0;
  std::vector<double> r_;
};

CurvatureTensor gauss_curvature_tensor(const PointGeometry& pg);
CurvatureTensor gauss_curvature_tensor(const CubicForm& h, double c);
double scalar_curvature(const CurvatureTensor& R);

// Riemann tensor of the induced metric alone (Christoffel symbols from metric
// derivatives), expressed in the frame of pg
CurvatureTensor intrinsic_curvature_tensor(const AmbientSpace& space, const Jet3& jet3, const Eigen::MatrixXd& B);
double intrinsic_curvature_crosscheck(const ChartImmersion& f, const Eigen::VectorXd& u);

// 1/2 sum_k s_k (A_k wedge-product A_k), A_k random symmetric: satisfies every algebraic identity
CurvatureTensor random_algebraic_curvature(std::uint64_t seed, int m, int terms = 4);

}  // namespace lagdelta
