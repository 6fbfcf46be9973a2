#include <cmath>

#include "lagdelta/families.hpp"
#include "lagdelta/delta.hpp"
#include "support.hpp"

using namespace lagdelta;

namespace {

DeltaOptions fast() {
  DeltaOptions o;
  o.restarts = 16;
  o.threads = 1;
  return o;
}

struct PointCheck {
  double lagrangian = 0, constraint = 0, horizontal = 0, symmetry = 0, equality = 0, mu_error = 0;
};

PointCheck check_point(const BuiltChart& b, const Eigen::VectorXd& u, bool equality = true) {
  PointCheck r;
  const auto& f = b.chart;
  r.lagrangian = lagrangian_residual(f, u);
  if (f.is_lift()) {
    r.constraint = constraint_residual(f, u);
    r.horizontal = horizontality_residual(f, u);
  }
  PointGeometry pg = second_fundamental_form(f, u);
  r.symmetry = pg.h.symmetry_residual();
  if (equality) {
    r.equality = std::abs(improved_equality_residual(gauss_curvature_tensor(pg), pg, fast()));
    if (b.expected_mu) r.mu_error = std::abs(canonical_frame_fit(pg).mu - b.expected_mu(u));
  }
  return r;
}

void check_family(const BuiltChart& b, int samples = 4, double eq_tol = 1e-5) {
  CAPTURE(b.chart.name());
  testgen::Gen g(31);
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd u = g.point_in(b.chart.domain().shrunk(0.95));
    PointCheck r = check_point(b, u, b.improved_ideal);
    CHECK(r.lagrangian < 1e-9);
    CHECK(r.constraint < 1e-8);
    CHECK(r.horizontal < 1e-8);
    CHECK(r.symmetry < 1e-8);
    if (b.improved_ideal) CHECK(r.equality < eq_tol);
    if (b.expected_mu) CHECK(r.mu_error < 1e-6);
  }
}

BuildOptions smoke() {
  BuildOptions o;
  o.allow_totally_geodesic = true;
  return o;
}

// a lift into S^9 that rotates the fibre along s_1: constraint holds, horizontality does not
ChartImmersion twisted_sphere() {
  auto base = totally_real_sphere(4, 0.5);
  JetMap jm = [base](std::span<const Jet<double>> s) {
    auto z = base.jet_map()(s);
    auto phase = expi(s[0] * 0.5);
    for (auto& c : z) c = c * phase;
    return z;
  };
  return ChartImmersion("twisted-sphere", base.domain(), base.space(), jm);
}

}  // namespace

TEST_CASE("complex extensors") {
  SUBCASE("unit circle: Lagrangian and H-umbilical") {
    auto f = complex_extensor(unit_circle_curve(), 5);
    Eigen::VectorXd u(5);
    u << 0.1, 0.2, -0.1, 0.3, 0.0;
    CHECK(lagrangian_residual(f, u) < 1e-12);
    PointGeometry pg = second_fundamental_form(f, u);
    CanonicalFit fit = canonical_frame_fit(pg);
    CHECK(std::abs(fit.a) < 1e-6);
    CHECK(std::abs(fit.b) < 1e-6);
  }
  SUBCASE("ray through the origin: totally geodesic") {
    auto f = complex_extensor(ray_curve(), 5);
    PointGeometry pg = second_fundamental_form(f, f.domain().center());
    CHECK(pg.h.norm() < 1e-12);
  }
}

TEST_CASE("ratio-4 extensor in C^5") {
  for (double mu0 : {0.2, 0.4, 0.9}) {
    CAPTURE(mu0);
    BuiltChart b = ratio4_extensor(mu0);
    check_family(b, 3);
    // delta(2,2) = 16 mu^2 and H^2 = 64 mu^2 / 25
    Eigen::VectorXd u = b.chart.domain().center();
    u[0] += 0.3 * (b.chart.domain().upper[0] - u[0]);
    PointGeometry pg = second_fundamental_form(b.chart, u);
    double mu = b.expected_mu(u);
    CHECK(testgen::rel_err(pg.mean_sq, 64 * mu * mu / 25) < 1e-9);
    CHECK(testgen::rel_err(delta_invariant(gauss_curvature_tensor(pg), TupleSpec(5, {2, 2}), fast()).value,
                           16 * mu * mu) < 1e-9);
  }
}

TEST_CASE("ratio-4 generating curve solves its ODE") {
  PlanarCurve g = ratio4_generating_curve(0.5);
  std::vector<double> t, mu;
  const int n = 201;
  for (int i = 0; i < n; ++i) {
    t.push_back(g.t_min + (g.t_max - g.t_min) * (0.05 + 0.9 * i / (n - 1.0)));
    mu.push_back(g.mu(t.back()));
  }
  CHECK(ratio_ode_residual(t, mu, 4.0, 0.0) < 1e-7);
}

TEST_CASE("ratio-4 Legendre curve in S^3 has projected curvature 4 mu") {
  Ratio4Legendre flow = ratio4_legendre_flow(0.5, -0.3, 0.3);
  auto S = AmbientSpace::complex_projective(1);
  for (double t : {-0.25, 0.0, 0.1, 0.28}) {
    auto y = flow.solution.at(t);
    AmbientVector z(2), dz(2);
    z << cplx(y[2], y[3]), cplx(y[4], y[5]);
    dz << cplx(y[6], y[7]), cplx(y[8], y[9]);
    AmbientVector d2z = cplx(0, 4 * y[0]) * dz - z;
    CHECK(S.sphere_constraint_residual(z) < 1e-10);
    CHECK(S.horizontality_residual(z, dz) < 1e-10);
    CHECK(projected_speed(S, z, dz) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(projected_curvature(S, z, dz, d2z) == doctest::Approx(4 * y[0]).epsilon(1e-10));
  }
  check_family(cp5_ratio4_legendre(0.5), 3);
}

TEST_CASE("closed-form CH5 example") {
  BuiltChart b = ch5_sech_example();
  check_family(b, 4);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(5);
  u[0] = 0.4;
  CHECK(b.expected_mu(u) == doctest::Approx(1 / std::cosh(0.8)));
  CHECK(b.chart.space().c() == -1);
}

TEST_CASE("mu intervals") {
  auto c5 = mu_interval_C5(1.0);
  CHECK(c5.first > 0.0);
  CHECK(c5.second < 1.0);
  CHECK(c5.second > 0.99);
  auto cp5 = mu_interval_CP5(1.0);
  double top = cp5.second / (1 - 1e-3);
  CHECK(top * top * top + top - 1.0 == doctest::Approx(0.0).epsilon(1e-3));
  auto iii = mu_interval_CH5(CH5Branch::iii, 0.5);
  CHECK(iii.first < 1 / std::sqrt(3.0));
  CHECK(iii.second > 1 / std::sqrt(3.0));
  CHECK_THROWS_AS(mu_interval_CH5(CH5Branch::iii, 0.7), Error);
  auto iv = mu_interval_CH5(CH5Branch::iv, 0.5);
  CHECK(iv.second > 1.0);
  CHECK(iv.second < 1.25);
}

TEST_CASE("mu-parametrized families with the totally real smoke plugins") {
  auto S4 = totally_real_sphere(4, 0.5);
  auto H4 = totally_real_hyperboloid(4, 0.5);
  check_family(build_family_C5(1.0, S4, smoke()));
  check_family(build_family_CP5(1.0, S4, smoke()));
  check_family(build_family_CH5(CH5Branch::iii, {0.5, 0.5}, {H4}, smoke()));
  check_family(build_family_CH5(CH5Branch::iv, {0.5, 0.5}, {S4}, smoke()));
  BuildOptions neg = smoke();
  neg.negative_branch = true;
  check_family(build_family_C5(1.0, S4, neg));
  CHECK_THROWS_AS(build_family_CP5(1.0, S4, neg), Error);
}

TEST_CASE("smoke plugins are rejected without the totally geodesic override") {
  auto S4 = totally_real_sphere(4, 0.5);
  try {
    build_family_C5(1.0, S4);
    FAIL("expected plugin rejection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::plugin_rejected);
  }
}

TEST_CASE("C5 prefactor modulus") {
  // |L|^2 = (mu / c^2) |phi|^2 with |phi| = 1
  double c = 1.3;
  BuiltChart b = build_family_C5(c, totally_real_sphere(4, 0.5), smoke());
  testgen::Gen g(5);
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd u = g.point_in(b.chart.domain());
    double mu = b.expected_mu(u);
    CHECK(b.chart.value(u).squaredNorm() == doctest::Approx(mu / (c * c)).epsilon(1e-12));
  }
}

TEST_CASE("CH5 branches (v) and (vi)") {
  Polynomial quad1(2, {{1.0, {2, 0}}, {-1.0, {0, 2}}}), quad2(2, {{1.0, {1, 1}}});
  Polynomial cub1(2, {{1.0, {3, 0}}, {-3.0, {1, 2}}}), cub2(2, {{3.0, {2, 1}}, {-1.0, {0, 3}}});
  SUBCASE("vi with quadratic harmonics") {
    auto s1 = harmonic_gradient_surface(quad1), s2 = harmonic_gradient_surface(quad2);
    BuiltChart b = build_family_CH5(CH5Branch::vi, {}, {s1, s2}, smoke());
    check_family(b, 4, 1e-4);
    CHECK_THROWS_AS(build_family_CH5(CH5Branch::vi, {}, {s1, s2}), Error);
  }
  SUBCASE("vi with cubic harmonics is a genuine example") {
    BuiltChart b = build_family_CH5(CH5Branch::vi, {}, {harmonic_gradient_surface(cub1), harmonic_gradient_surface(cub2)});
    check_family(b, 4, 1e-4);
    PointGeometry pg = second_fundamental_form(b.chart, b.chart.domain().center() + Eigen::VectorXd::Constant(5, 0.1));
    CanonicalFit fit = canonical_frame_fit(pg);
    CHECK(std::abs(fit.a) + std::abs(fit.b) > 0.1);
  }
  SUBCASE("v with a cubic surface times a flat plane") {
    auto cubic = harmonic_gradient_surface(cub1);
    auto plane = harmonic_gradient_surface(Polynomial(2), 0.5, true);
    BuiltChart b = build_family_CH5(CH5Branch::v, {}, {product_immersion(cubic, plane)}, smoke());
    check_family(b, 4, 1e-4);
  }
  SUBCASE("prefactor identity at t = 0") {
    // |cosh t - i sinh t|^2 = cosh 2t
    for (double t : {0.0, 0.3, -0.7}) {
      cplx p(std::cosh(t), -std::sinh(t));
      CHECK(std::norm(p) == doctest::Approx(std::cosh(2 * t)));
    }
  }
}

TEST_CASE("printed variants break the construction") {
  auto H4 = totally_real_hyperboloid(4, 0.5);
  auto S4 = totally_real_sphere(4, 0.5);
  Eigen::VectorXd u;
  SUBCASE("printed phase in (iii)") {
    BuildOptions o = smoke();
    o.ch5_printed_phase = true;
    BuiltChart b = build_family_CH5(CH5Branch::iii, {0.5, 0.5}, {H4}, o);
    u = b.chart.domain().center() + Eigen::VectorXd::Constant(5, 0.05);
    CHECK(horizontality_residual(b.chart, u) > 1e-2);
  }
  SUBCASE("statement form of dtheta/dmu in (iv)") {
    BuildOptions o = smoke();
    o.ch5_statement_theta = true;
    BuiltChart b = build_family_CH5(CH5Branch::iv, {0.5, 0.5}, {S4}, o);
    u = b.chart.domain().center() + Eigen::VectorXd::Constant(5, 0.05);
    CHECK(horizontality_residual(b.chart, u) > 1e-2);
  }
  SUBCASE("printed phi in (vi)") {
    BuildOptions o = smoke();
    o.ch5_printed_phi = true;
    Polynomial q1(2, {{1.0, {2, 0}}, {-1.0, {0, 2}}}), q2(2, {{1.0, {1, 1}}});
    BuiltChart b = build_family_CH5(CH5Branch::vi, {}, {harmonic_gradient_surface(q1), harmonic_gradient_surface(q2)}, o);
    u = b.chart.domain().center();
    // <L, L> = +1 instead of -1
    CHECK(constraint_residual(b.chart, u) > 1.0);
  }
}

TEST_CASE("plugin verification") {
  SUBCASE("totally real sphere") {
    PluginReport r = verify_plugin(totally_real_sphere(4, 0.5), {});
    auto get = [&](const std::string& n) {
      for (const auto& c : r.checks)
        if (c.name == n) return c;
      FAIL("missing check " << n);
      return PropertyCheck{};
    };
    CHECK(get("horizontal").passed);
    CHECK(get("minimal").passed);
    CHECK(get("delta2_ideal").passed);
    CHECK_FALSE(get("non_totally_geodesic").passed);
    CHECK_FALSE(r.passed());
    CHECK(r.failures().find("non_totally_geodesic") != std::string::npos);
  }
  SUBCASE("harmonic surfaces are minimal") {
    Polynomial quad1(2, {{1.0, {2, 0}}, {-1.0, {0, 2}}}), quad2(2, {{1.0, {1, 1}}});
    for (const auto& f : {quad1, quad2}) {
      auto s = harmonic_gradient_surface(f);
      testgen::Gen g(8);
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) worst = std::max(worst, second_fundamental_form(s, g.point_in(s.domain())).mean_sq);
      CHECK(std::sqrt(worst) < 1e-7);
      PluginRequirements req;
      req.horizontal = false;
      req.delta2_ideal = false;
      req.non_totally_geodesic = false;
      CHECK(verify_plugin(s, req).passed());
    }
  }
  SUBCASE("non-horizontal lift is caught with a quantified residual") {
    PluginRequirements req;
    req.non_totally_geodesic = false;
    PluginReport r = verify_plugin(twisted_sphere(), req);
    CHECK_FALSE(r.passed());
    bool found = false;
    for (const auto& c : r.checks)
      if (c.name == "horizontal") {
        found = true;
        CHECK_FALSE(c.passed);
        CHECK(c.value > 0.1);
      }
    CHECK(found);
  }
  SUBCASE("flat and non-harmonic inputs") {
    CHECK_THROWS_AS(harmonic_gradient_surface(Polynomial(2)), Error);
    CHECK_NOTHROW(harmonic_gradient_surface(Polynomial(2), 0.5, true));
    CHECK_THROWS_AS(harmonic_gradient_surface(Polynomial(2, {{1.0, {2, 0}}})), Error);
  }
}

TEST_CASE("w potential") {
  SUBCASE("pair of circles: dw is constant") {
    JetMap jm = [](std::span<const Jet<double>> u) {
      const double r = 1 / std::sqrt(2.0);
      return std::vector<Jet<cplx>>{expi(u[0]) * r, expi(u[1]) * r};
    };
    ChartImmersion psi("circles", Box::cube(2, 0.5), AmbientSpace::complex_euclidean(2), jm);
    WPotential w(psi);
    Eigen::Vector2d u(0.3, -0.2);
    CHECK(w.value(u) == doctest::Approx(u[0] + u[1]).epsilon(1e-12));
    CHECK(w.max_loop_residual() < 1e-10);
    CHECK(w.path_independence_residual(u) < 1e-10);
  }
  SUBCASE("real plane: w vanishes") {
    auto psi = gradient_graph(Polynomial(2), Box::cube(2, 0.5));
    // gradient graph of 0 is the real plane R^2 in C^2
    WPotential w(psi);
    CHECK(std::abs(w.value(Eigen::Vector2d(0.4, 0.1))) < 1e-15);
  }
  SUBCASE("gradient graphs: w = 2 u . grad f - 4 f") {
    testgen::for_seeds(5, 1900, [](testgen::Gen& g, std::uint64_t seed) {
      Polynomial f = Polynomial::random(seed, 2, 3, 0.5);
      auto psi = gradient_graph(f, Box::cube(2, 0.5));
      WPotential w(psi);
      Eigen::VectorXd u = g.point_in(psi.domain());
      std::array<double, 2> x{u[0], u[1]};
      double expect = 2 * (u[0] * f.derivative(0).evaluate(x) + u[1] * f.derivative(1).evaluate(x)) - 4 * f.evaluate(x);
      CHECK(w.value(u) == doctest::Approx(expect).epsilon(1e-10));
      CHECK(w.max_loop_residual() < 1e-8);
      CHECK(w.closedness_residual(u) < 1e-12);
      // Taylor jet of w agrees with the gradient
      Jet<double> j = w.taylor(u, 3);
      Eigen::VectorXd grad = w.gradient(u);
      CHECK(j.first(0) == doctest::Approx(grad[0]).epsilon(1e-12));
      CHECK(j.value() == doctest::Approx(w.value(u)).epsilon(1e-12));
    });
  }
  SUBCASE("non-Lagrangian input is refused") {
    Polynomial zero(2);
    std::vector<Polynomial> re{Polynomial(2, {{1.0, {1, 0}}}), Polynomial(2, {{1.0, {0, 1}}})};
    std::vector<Polynomial> im{Polynomial(2, {{1.0, {0, 1}}}), zero};
    try {
      integrate_w(polynomial_map(re, im, Box::cube(2, 0.5)));
      FAIL("expected not_lagrangian");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::not_lagrangian);
    }
  }
}
