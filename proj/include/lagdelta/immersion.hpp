#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagdelta/ambient.hpp"
#include "lagdelta/jet.hpp"
#include "lagdelta/polynomial.hpp"

namespace lagdelta {

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box cube(int m, double half_width);
  static Box cube(int m, double lo, double hi);
  int dim() const { return static_cast<int>(lower.size()); }
  Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
  double scale() const { return (upper - lower).minCoeff(); }
  bool contains(const Eigen::VectorXd& u) const;
  // same center, widths multiplied by factor
  Box shrunk(double factor) const;
};

// the map itself, evaluated on identity jets of the chart variables
using JetMap = std::function<std::vector<Jet<cplx>>(std::span<const Jet<double>>)>;
using ValueMap = std::function<AmbientVector(const Eigen::VectorXd&)>;

// derivatives of the chart map at one point; packed symmetric storage
struct Jet3 {
  int m = 0;
  int order = 0;
  AmbientVector value;
  std::vector<AmbientVector> d1;
  std::vector<AmbientVector> d2;
  std::vector<AmbientVector> d3;

  const AmbientVector& second(int i, int j) const { return d2[index2(i, j)]; }
  const AmbientVector& third(int i, int j, int k) const { return d3[index3(i, j, k)]; }
  int index2(int i, int j) const;
  int index3(int i, int j, int k) const;
};

struct FdOptions {
  // base step relative to the domain scale; order k uses step * 10^(k-1)
  double step = 1e-4;
};

class ChartImmersion {
 public:
  ChartImmersion(std::string name, Box domain, AmbientSpace space, JetMap jets);
  static ChartImmersion black_box(std::string name, Box domain, AmbientSpace space, ValueMap values,
                                  FdOptions fd = {});

  const std::string& name() const { return name_; }
  int dimension() const { return domain_.dim(); }
  const Box& domain() const { return domain_; }
  const AmbientSpace& space() const { return space_; }
  bool is_lift() const { return space_.c() != 0; }
  bool has_jets() const { return static_cast<bool>(jets_); }
  const JetMap& jet_map() const { return jets_; }
  const FdOptions& fd_options() const { return fd_; }

  ChartImmersion with_finite_differences(FdOptions fd = {}) const;
  ChartImmersion with_domain(Box domain) const;
  ChartImmersion renamed(std::string name) const;

  AmbientVector value(const Eigen::VectorXd& u) const;
  // raw Taylor jets (analytic backend only)
  std::vector<Jet<cplx>> jets(const Eigen::VectorXd& u, int order) const;
  Jet3 evaluate_jet(const Eigen::VectorXd& u, int order) const;

 private:
  void check_point(const Eigen::VectorXd& u) const;
  Jet3 jet_from_taylor(const Eigen::VectorXd& u, int order) const;
  Jet3 jet_from_differences(const Eigen::VectorXd& u, int order) const;

  std::string name_;
  Box domain_;
  AmbientSpace space_;
  JetMap jets_;
  ValueMap values_;
  FdOptions fd_;
};

double lagrangian_residual(const ChartImmersion& f, const Eigen::VectorXd& u);
double lagrangian_residual(const AmbientSpace& space, const Jet3& jet);
double constraint_residual(const ChartImmersion& f, const Eigen::VectorXd& u);
// max over coordinate directions of |<L_i, iL>|
double horizontality_residual(const AmbientSpace& space, const Jet3& jet);
double horizontality_residual(const ChartImmersion& f, const Eigen::VectorXd& u);

Eigen::MatrixXd induced_metric(const ChartImmersion& f, const Eigen::VectorXd& u, double floor = 1e-6);
Eigen::MatrixXd induced_metric(const AmbientSpace& space, const Jet3& jet, double floor = 1e-6);

// u -> u + i grad f(u) in C^m
ChartImmersion gradient_graph(const Polynomial& f, Box domain, std::string name = "graph");
ChartImmersion random_gradient_graph(std::uint64_t seed, int m, int degree, double half_width = 0.5);
// u -> sum (re_k + i im_k) e_k; used for arbitrary (possibly non-Lagrangian) test charts
ChartImmersion polynomial_map(const std::vector<Polynomial>& re, const std::vector<Polynomial>& im, Box domain,
                              std::string name = "polynomial-map");
// (e^{i u_1}, ..., e^{i u_m}) in C^m
ChartImmersion circle_torus(int m);

// radical-inverse low-discrepancy sequence
double halton(std::uint64_t index, int base);
// grid^2 points: the first two coordinates on a cell-centred tensor grid, the rest from Halton
std::vector<Eigen::VectorXd> sample_points(const Box& box, int grid);

}  // namespace lagdelta
