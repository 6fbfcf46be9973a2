#include <array>
#include <cmath>

#include "lagdelta/jet.hpp"
#include "support.hpp"

using namespace lagdelta;

namespace {

// central difference of a scalar function along one variable
template <class F>
double fd1(F f, std::vector<double> x, int i, double h = 1e-5) {
  auto xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  return (f(xp) - f(xm)) / (2 * h);
}

}  // namespace

TEST_CASE("jet variables carry unit first derivatives") {
  const auto& L = JetLayout::get(3, 3);
  auto v = Jet<double>::variables(L, std::array<double, 3>{0.5, -1.0, 2.0});
  CHECK(v[1].value() == -1.0);
  CHECK(v[1].first(1) == 1.0);
  CHECK(v[1].first(0) == 0.0);
  CHECK(v[2].second(2, 2) == 0.0);
}

TEST_CASE("jet layout indexes every multi-index up to the order") {
  const auto& L = JetLayout::get(4, 3);
  CHECK(L.size() == 35);  // C(4+3, 3)
  int alpha[4] = {1, 0, 2, 0};
  CHECK(L.index(alpha) >= 0);
  int too_high[4] = {2, 0, 2, 0};
  CHECK(L.index(too_high) == -1);
  CHECK_THROWS_AS(JetLayout::get(kMaxJetVars + 1, 2), Error);
}

TEST_CASE("product and chain rules agree with closed forms") {
  const auto& L = JetLayout::get(2, 3);
  auto v = Jet<double>::variables(L, std::array<double, 2>{0.3, 0.7});
  auto f = sin(v[0] * v[1]) + exp(v[0]) * v[1];
  double x = 0.3, y = 0.7;
  CHECK(f.value() == doctest::Approx(std::sin(x * y) + std::exp(x) * y).epsilon(1e-14));
  CHECK(f.first(0) == doctest::Approx(y * std::cos(x * y) + std::exp(x) * y).epsilon(1e-14));
  CHECK(f.second(0, 1) == doctest::Approx(std::cos(x * y) - x * y * std::sin(x * y) + std::exp(x)).epsilon(1e-13));
  CHECK(f.third(0, 0, 0) == doctest::Approx(-y * y * y * std::cos(x * y) + std::exp(x) * y).epsilon(1e-13));
}

TEST_CASE("elementary functions invert each other") {
  const auto& L = JetLayout::get(3, 3);
  testgen::for_seeds(20, 100, [&](testgen::Gen& g, std::uint64_t) {
    std::array<double, 3> p{g.uniform(0.2, 1.5), g.uniform(0.2, 1.5), g.uniform(0.2, 1.5)};
    auto v = Jet<double>::variables(L, p);
    auto a = v[0] * v[1] + v[2] * 0.5 + 1.0;
    auto back = log(exp(a));
    auto root = square(sqrt(a));
    auto rec = a * reciprocal(a);
    for (int i = 0; i < L.size(); ++i) {
      CHECK(back[i] == doctest::Approx(a[i]).epsilon(1e-12));
      CHECK(root[i] == doctest::Approx(a[i]).epsilon(1e-12));
      CHECK(rec[i] == doctest::Approx(i == 0 ? 1.0 : 0.0).epsilon(1e-12));
    }
  });
}

TEST_CASE("hyperbolic and trigonometric identities hold to third order") {
  const auto& L = JetLayout::get(2, 3);
  auto v = Jet<double>::variables(L, std::array<double, 2>{0.4, -0.2});
  auto t = v[0] - 2.0 * v[1];
  auto one = square(cosh(t)) - square(sinh(t));
  auto also_one = square(cos(t)) + square(sin(t));
  CHECK(one.value() == doctest::Approx(1.0));
  CHECK(also_one.value() == doctest::Approx(1.0));
  for (int i = 1; i < L.size(); ++i) {
    CHECK(std::abs(one[i]) < 1e-12);
    CHECK(std::abs(also_one[i]) < 1e-12);
  }
  auto th = tanh(t) - sinh(t) / cosh(t);
  for (int i = 0; i < L.size(); ++i) CHECK(std::abs(th[i]) < 1e-13);
}

TEST_CASE("complex jets: e^{i theta} has unit modulus and derivative i z") {
  const auto& L = JetLayout::get(1, 3);
  auto t = Jet<double>::variable(L, 0, 0.9);
  Jet<cplx> z = expi(t);
  auto mod = real(z * conj(z));
  CHECK(mod.value() == doctest::Approx(1.0));
  for (int i = 1; i < L.size(); ++i) CHECK(std::abs(mod[i]) < 1e-14);
  CHECK(std::abs(z.first(0) - cplx(0, 1) * z.value()) < 1e-14);
  CHECK(std::abs(z.second(0, 0) + z.value()) < 1e-14);
}

TEST_CASE("partial derivative matches finite differences") {
  const auto& L = JetLayout::get(3, 3);
  std::vector<double> x{0.2, 0.5, -0.3};
  auto fn = [](const auto& v) { return atan(v[0] * v[1]) + pow(v[2] + 2.0, 1.5) * v[0]; };
  auto scalar = [](std::vector<double> p) { return std::atan(p[0] * p[1]) + std::pow(p[2] + 2.0, 1.5) * p[0]; };
  auto v = Jet<double>::variables(L, x);
  auto f = fn(v);
  for (int i = 0; i < 3; ++i) {
    CHECK(f.partial(i).value() == doctest::Approx(fd1(scalar, x, i)).epsilon(1e-8));
    CHECK(f.first(i) == doctest::Approx(f.partial(i).value()).epsilon(1e-15));
  }
  // mixed partials commute
  CHECK(f.partial(0).partial(2).value() == doctest::Approx(f.partial(2).partial(0).value()).epsilon(1e-14));
}

TEST_CASE("compose applies a univariate Taylor expansion") {
  const auto& L = JetLayout::get(2, 3);
  auto v = Jet<double>::variables(L, std::array<double, 2>{0.1, 0.2});
  auto a = v[0] + v[1] * v[1];
  double x = a.value();
  auto via_compose = compose(a, std::array<double, 4>{std::exp(x), std::exp(x), std::exp(x), std::exp(x)});
  auto direct = exp(a);
  for (int i = 0; i < L.size(); ++i) CHECK(via_compose[i] == doctest::Approx(direct[i]).epsilon(1e-14));
}

TEST_CASE("from_gradient rebuilds a function from its gradient jets") {
  const auto& L3 = JetLayout::get(2, 3);
  const auto& L2 = JetLayout::get(2, 2);
  std::array<double, 2> p{0.3, -0.4};
  auto v3 = Jet<double>::variables(L3, p);
  auto f = v3[0] * v3[0] * v3[1] + sin(v3[1]);
  std::vector<Jet<double>> grads{f.partial(0).truncated(2), f.partial(1).truncated(2)};
  (void)L2;
  auto rebuilt = Jet<double>::from_gradient(L3, f.value(), grads);
  for (int i = 0; i < L3.size(); ++i) CHECK(rebuilt[i] == doctest::Approx(f[i]).epsilon(1e-14));
}
