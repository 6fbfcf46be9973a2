#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include "lagdelta/curvature.hpp"

namespace lagdelta {

using Rational = boost::rational<long long>;

// (n_1, ..., n_k) with 2 <= n_j < n and sum n_j <= n
class TupleSpec {
 public:
  TupleSpec(int n, std::vector<int> parts);
  int n() const { return n_; }
  const std::vector<int>& parts() const { return parts_; }
  int k() const { return static_cast<int>(parts_.size()); }
  int total() const;
  // the improved inequality needs sum n_j < n
  bool strict() const { return total() < n_; }
  std::string to_string() const;

 private:
  int n_;
  std::vector<int> parts_;
};

// S(n): all non-decreasing admissible tuples
std::vector<TupleSpec> enumerate_tuples(int n);

struct DeltaOptions {
  int restarts = 64;
  std::uint64_t seed = 0;
  // restarts are doubled up to this count while fewer than two agree on the minimum
  int max_restarts = 256;
  double agreement = 1e-8;
  double min_step = 1e-7;
  int threads = 0;
  // > 0 also runs the brute-force oracle and records the gap
  int oracle_samples = 0;
  std::uint64_t oracle_seed = 1;
};

struct DeltaResult {
  double value = 0.0;
  double tau = 0.0;
  double inf_sum = 0.0;
  // m x (sum n_j) orthonormal frame, blocks in the order of the tuple
  Eigen::MatrixXd minimizer;
  std::vector<int> blocks;
  // tau minus the oracle infimum, comparable with value
  std::optional<double> oracle_value;
  std::optional<double> oracle_gap;
  int restarts_used = 0;
  int agreeing_restarts = 0;
  bool converged = false;
};

// sum of sectional curvatures over pairs of the given orthonormal columns
double tau_subspace(const CurvatureTensor& R, const Eigen::MatrixXd& basis, double tol = 1e-10);

DeltaResult delta_invariant(const CurvatureTensor& R, const TupleSpec& spec, const DeltaOptions& opts = {});

struct OracleResult {
  double sampled_min = 0.0;
  double refined = 0.0;
  Eigen::MatrixXd frame;
};
// random Haar frames, then a (1+1) evolution-strategy refinement; estimates the infimum of sum tau(L_j)
OracleResult delta_oracle(const CurvatureTensor& R, const TupleSpec& spec, int samples, std::uint64_t seed);
double delta_bruteforce_oracle(const CurvatureTensor& R, const TupleSpec& spec, int samples, std::uint64_t seed);

struct RhsCoefficients {
  Rational mean_sq;
  Rational constant;
  double evaluate(double Hsq, double c) const;
};
RhsCoefficients classical_rhs_coefficients(const TupleSpec& spec);
RhsCoefficients improved_rhs_coefficients(const TupleSpec& spec);
double classical_rhs(const TupleSpec& spec, double Hsq, double c);
double improved_rhs(const TupleSpec& spec, double Hsq, double c);

struct EqualityCheck {
  DeltaResult delta;
  double rhs = 0.0;
  // delta(2,2) - (25/4) H^2 - 8c
  double residual = 0.0;
};
EqualityCheck improved_equality_check(const CurvatureTensor& R, const PointGeometry& pg, const DeltaOptions& opts = {});
double improved_equality_residual(const CurvatureTensor& R, const PointGeometry& pg, const DeltaOptions& opts = {});

// the (a, b, mu) equality pattern: h(e1,e1) = a Je1 + 3mu Je5, ... in dimension 5
CubicForm improved_ideal_pattern(double a, double b, double mu);
// H-umbilical pattern with the distinguished direction last: h(em,em) = phi Jem,
// h(em,ej) = mu Jej, h(ej,ej) = mu Jem
CubicForm h_umbilical_pattern(int m, double phi, double mu);

struct CanonicalFit {
  double a = 0.0;
  double b = 0.0;
  double mu = 0.0;
  double residual = 0.0;
  // columns are the fitted e_1..e_5 in the coordinates of the input frame
  Eigen::MatrixXd frame;
  bool minimal = false;
};
CanonicalFit canonical_frame_fit(const CubicForm& h, int restarts = 12, std::uint64_t seed = 7);
CanonicalFit canonical_frame_fit(const PointGeometry& pg);

}  // namespace lagdelta
