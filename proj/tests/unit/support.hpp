#pragma once

// Seeded generators for the property tests. Every property runs over a fixed
// seed list so a failure reproduces exactly; the seed is CAPTUREd.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "lagdelta/curvature.hpp"
#include "lagdelta/delta.hpp"
#include "lagdelta/immersion.hpp"
#include "lagdelta/polynomial.hpp"

namespace testgen {

using lagdelta::cplx;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::uint64_t bits() { return rng_(); }

  Eigen::VectorXd vec(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  Eigen::VectorXcd cvec(int n) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(normal(), normal());
    return v;
  }
  Eigen::VectorXd point_in(const lagdelta::Box& b) {
    Eigen::VectorXd u(b.dim());
    for (int i = 0; i < b.dim(); ++i) u[i] = uniform(b.lower[i], b.upper[i]);
    return u;
  }
  Eigen::MatrixXd rotation(int m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::NullaryExpr(m, m, [&] { return normal(); }));
    Eigen::MatrixXd Q = qr.householderQ();
    return Q;
  }
  // totally symmetric cubic form with N(0, scale^2) entries
  lagdelta::CubicForm symmetric_cubic(int m, double scale = 1.0) {
    lagdelta::CubicForm h(m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        for (int k = j; k < m; ++k) {
          double v = scale * normal();
          h(i, j, k) = h(i, k, j) = h(j, i, k) = h(j, k, i) = h(k, i, j) = h(k, j, i) = v;
        }
    return h;
  }
  lagdelta::Polynomial polynomial(int nvars, int degree, double scale = 0.5) {
    return lagdelta::Polynomial::random(bits(), nvars, degree, scale);
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// runs body(gen, seed) for seeds base..base+count-1
template <class F>
void for_seeds(int count, std::uint64_t base, F&& body) {
  for (int s = 0; s < count; ++s) {
    std::uint64_t seed = base + static_cast<std::uint64_t>(s);
    CAPTURE(seed);
    Gen g(seed);
    body(g, seed);
  }
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace testgen
