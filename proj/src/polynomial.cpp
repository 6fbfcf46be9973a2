#include "lagdelta/polynomial.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace lagdelta {

Polynomial::Polynomial(int nvars, std::vector<Term> terms) : nvars_(nvars), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    require(static_cast<int>(t.powers.size()) == nvars_, "polynomial: term has wrong number of exponents");
    for (int p : t.powers) require(p >= 0, "polynomial: negative exponent");
  }
  normalize();
}

// merge like terms, drop zeros, keep a canonical (lexicographic) order
void Polynomial::normalize() {
  std::map<std::vector<int>, double> acc;
  for (const auto& t : terms_) acc[t.powers] += t.coef;
  terms_.clear();
  for (auto& [p, c] : acc)
    if (c != 0.0) terms_.push_back({c, p});
}

Polynomial Polynomial::random(std::uint64_t seed, int nvars, int degree, double scale) {
  require(nvars >= 1 && degree >= 0, "polynomial: bad random parameters");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<Term> terms;
  std::vector<int> p(nvars, 0);
  // odometer over exponent vectors with total degree <= degree
  while (true) {
    int d = 0;
    for (int v : p) d += v;
    if (d >= 2 && d <= degree) terms.push_back({normal(rng), p});
    int k = 0;
    while (k < nvars) {
      if (++p[k] <= degree) break;
      p[k] = 0;
      ++k;
    }
    if (k == nvars) break;
  }
  return Polynomial(nvars, std::move(terms));
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int p : t.powers) s += p;
    d = std::max(d, s);
  }
  return d;
}

double Polynomial::evaluate(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == nvars_, "polynomial: wrong argument count");
  double s = 0.0;
  for (const auto& t : terms_) {
    double m = t.coef;
    for (int v = 0; v < nvars_; ++v)
      for (int k = 0; k < t.powers[v]; ++k) m *= x[v];
    s += m;
  }
  return s;
}

Jet<double> Polynomial::evaluate(std::span<const Jet<double>> x) const {
  require(static_cast<int>(x.size()) == nvars_ && nvars_ > 0, "polynomial: wrong argument count");
  const JetLayout& layout = x[0].layout();
  int maxp = 0;
  for (const auto& t : terms_)
    for (int p : t.powers) maxp = std::max(maxp, p);
  std::vector<std::vector<Jet<double>>> pw(nvars_);
  for (int v = 0; v < nvars_; ++v) {
    pw[v].push_back(Jet<double>(layout, 1.0));
    for (int k = 1; k <= maxp; ++k) pw[v].push_back(pw[v].back() * x[v]);
  }
  Jet<double> s(layout);
  for (const auto& t : terms_) {
    Jet<double> m(layout, t.coef);
    for (int v = 0; v < nvars_; ++v)
      if (t.powers[v] > 0) m = m * pw[v][t.powers[v]];
    s += m;
  }
  return s;
}

Polynomial Polynomial::derivative(int var) const {
  require(var >= 0 && var < nvars_, "polynomial: variable out of range");
  std::vector<Term> out;
  for (const auto& t : terms_) {
    if (t.powers[var] == 0) continue;
    Term d = t;
    d.coef *= t.powers[var];
    d.powers[var] -= 1;
    out.push_back(std::move(d));
  }
  return Polynomial(nvars_, std::move(out));
}

Polynomial Polynomial::laplacian() const {
  Polynomial acc(nvars_);
  for (int v = 0; v < nvars_; ++v) acc = acc + derivative(v).derivative(v);
  return acc;
}

Polynomial Polynomial::scaled(double s) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coef *= s;
  return Polynomial(nvars_, std::move(out));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  require(o.nvars_ == nvars_, "polynomial: variable count mismatch");
  std::vector<Term> out = terms_;
  out.insert(out.end(), o.terms_.begin(), o.terms_.end());
  return Polynomial(nvars_, std::move(out));
}

}  // namespace lagdelta
