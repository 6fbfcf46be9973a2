#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lagdelta/jet.hpp"

namespace lagdelta {

// sparse real polynomial in nvars variables
class Polynomial {
 public:
  struct Term {
    double coef;
    std::vector<int> powers;
  };

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}
  Polynomial(int nvars, std::vector<Term> terms);

  // all monomials of total degree 2..degree with N(0, scale^2) coefficients
  static Polynomial random(std::uint64_t seed, int nvars, int degree, double scale);

  int nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }

  double evaluate(std::span<const double> x) const;
  Jet<double> evaluate(std::span<const Jet<double>> x) const;

  Polynomial derivative(int var) const;
  Polynomial laplacian() const;
  Polynomial scaled(double s) const;
  Polynomial operator+(const Polynomial& o) const;

 private:
  void normalize();
  int nvars_ = 0;
  std::vector<Term> terms_;
};

}  // namespace lagdelta
