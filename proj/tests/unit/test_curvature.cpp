#include <cmath>

#include "lagdelta/curvature.hpp"
#include "lagdelta/delta.hpp"
#include "lagdelta/families.hpp"
#include "support.hpp"

using namespace lagdelta;

TEST_CASE("flat graph has vanishing second fundamental form") {
  auto f = gradient_graph(Polynomial(3), Box::cube(3, 1.0));
  PointGeometry pg = second_fundamental_form(f, Eigen::Vector3d(0.1, 0.1, 0.1));
  CHECK(pg.h.norm() == 0.0);
  CHECK(pg.mean_sq == 0.0);
}

TEST_CASE("unit circle in C has h^1_11 = 1") {
  JetMap jm = [](std::span<const Jet<double>> u) { return std::vector<Jet<cplx>>{expi(u[0])}; };
  ChartImmersion f("circle", Box::cube(1, 1.0), AmbientSpace::complex_euclidean(1), jm);
  Eigen::VectorXd u(1);
  u << 0.3;
  PointGeometry pg = second_fundamental_form(f, u);
  CHECK(std::abs(std::abs(pg.h(0, 0, 0)) - 1.0) < 1e-14);
  CHECK(pg.mean_sq == doctest::Approx(1.0));
}

TEST_CASE("cubic form of a Lagrangian chart is totally symmetric") {
  testgen::for_seeds(10, 800, [](testgen::Gen& g, std::uint64_t seed) {
    auto f = random_gradient_graph(seed, 5, 3);
    PointGeometry pg = second_fundamental_form(f, g.point_in(f.domain()));
    CHECK(pg.h.symmetry_residual() < 1e-10);
    // frame is orthonormal in the induced metric
    CHECK((pg.basis_change.transpose() * pg.metric * pg.basis_change - Eigen::MatrixXd::Identity(5, 5)).norm() <
          1e-12);
  });
}

TEST_CASE("Gauss tensor of a symmetric cubic form is an algebraic curvature tensor") {
  testgen::for_seeds(20, 900, [](testgen::Gen& g, std::uint64_t) {
    int m = g.integer(2, 6);
    CubicForm h = g.symmetric_cubic(m);
    double c = g.uniform(-1.0, 1.0);
    CurvatureTensor R = gauss_curvature_tensor(h, c);
    CHECK(R.symmetry_residual() < 1e-12);
    // scalar curvature is frame independent
    Eigen::MatrixXd Q = g.rotation(m);
    CurvatureTensor Rq = gauss_curvature_tensor(h.rotated(Q), c);
    CHECK(scalar_curvature(Rq) == doctest::Approx(scalar_curvature(R)).epsilon(1e-12));
    CHECK(Rq.max_abs_difference(R.rotated(Q)) < 1e-12);
  });
}

TEST_CASE("random algebraic curvature tensors satisfy every identity") {
  testgen::for_seeds(10, 1000, [](testgen::Gen&, std::uint64_t seed) {
    CurvatureTensor R = random_algebraic_curvature(seed, 5);
    CHECK(R.symmetry_residual() < 1e-12);
    // the bivector operator reproduces sectional curvatures on coordinate planes
    Eigen::MatrixXd B = R.bivector_operator();
    CHECK(B(0, 0) == doctest::Approx(R.sectional(0, 1)).epsilon(1e-13));
  });
}

TEST_CASE("constant curvature") {
  CurvatureTensor R = CurvatureTensor::constant(5, 1.0);
  CHECK(R.sectional(0, 3) == 1.0);
  CHECK(R(0, 1, 0, 1) == -1.0);
  CHECK(scalar_curvature(R) == 10.0);
  CHECK(scalar_curvature(CurvatureTensor::constant(5, -0.5)) == -5.0);
  CHECK(scalar_curvature(CurvatureTensor(5)) == 0.0);
  // totally geodesic in the curvature-one model
  CurvatureTensor G = gauss_curvature_tensor(CubicForm(5), 1.0);
  CHECK(G.max_abs_difference(R) == 0.0);
}

TEST_CASE("ratio-4 H-umbilical form: sectional and scalar curvature") {
  for (double mu : {0.3, 0.5, 1.2}) {
    for (double c : {-1.0, 0.0, 1.0}) {
      CAPTURE(mu);
      CAPTURE(c);
      // e_5 is the distinguished direction: phi = 4 mu along it
      CubicForm h = improved_ideal_pattern(0.0, 0.0, mu);
      CurvatureTensor R = gauss_curvature_tensor(h, c);
      for (int i = 0; i < 4; ++i) {
        CHECK(R.sectional(i, 4) == doctest::Approx(3 * mu * mu + c).epsilon(1e-13));
        for (int j = i + 1; j < 4; ++j) CHECK(R.sectional(i, j) == doctest::Approx(mu * mu + c).epsilon(1e-13));
      }
      CHECK(scalar_curvature(R) == doctest::Approx(18 * mu * mu + 10 * c).epsilon(1e-13));
    }
  }
}

TEST_CASE("h_umbilical_pattern of ratio r") {
  CubicForm h = h_umbilical_pattern(5, 2.0, 0.5);
  CHECK(h(4, 4, 4) == 2.0);
  CHECK(h(1, 4, 1) == 0.5);
  CHECK(h(4, 1, 1) == 0.5);
  CHECK(h(0, 0, 0) == 0.0);
  // phi = 4 mu is the ratio-4 form
  CHECK(h_umbilical_pattern(5, 2.0, 0.5).distance(improved_ideal_pattern(0.0, 0.0, 0.5)) == 0.0);
  CHECK(h.symmetry_residual() == 0.0);
}

TEST_CASE("intrinsic and extrinsic curvature agree") {
  SUBCASE("flat graph") {
    auto f = gradient_graph(Polynomial(3), Box::cube(3, 1.0));
    CHECK(intrinsic_curvature_crosscheck(f, Eigen::Vector3d(0.2, 0.1, 0.0)) < 1e-14);
  }
  SUBCASE("flat torus") {
    auto f = circle_torus(5);
    Eigen::VectorXd u = Eigen::VectorXd::Constant(5, 0.4);
    CHECK(intrinsic_curvature_crosscheck(f, u) < 1e-13);
    CHECK(gauss_curvature_tensor(second_fundamental_form(f, u)).max_abs_difference(CurvatureTensor(5)) < 1e-13);
  }
  SUBCASE("random gradient graphs, analytic jets") {
    testgen::for_seeds(5, 1100, [](testgen::Gen& g, std::uint64_t seed) {
      auto f = random_gradient_graph(seed, 4, 3);
      CHECK(intrinsic_curvature_crosscheck(f, g.point_in(f.domain().shrunk(0.8))) < 1e-8);
    });
  }
  SUBCASE("random gradient graph, finite differences") {
    auto f = random_gradient_graph(5, 3, 3).with_finite_differences();
    CHECK(intrinsic_curvature_crosscheck(f, Eigen::Vector3d(0.05, -0.1, 0.1)) < 1e-5);
  }
  SUBCASE("closed-form lift at t = 0.3") {
    BuiltChart b = ch5_sech_example();
    Eigen::VectorXd u(5);
    u << 0.3, 0.1, -0.2, 0.05, 0.15;
    CHECK(intrinsic_curvature_crosscheck(b.chart, u) < 1e-8);
    CHECK(intrinsic_curvature_crosscheck(b.chart.with_finite_differences(), u) < 1e-5);
  }
}

TEST_CASE("mean curvature of the torus in C^5") {
  auto f = circle_torus(5);
  PointGeometry pg = second_fundamental_form(f, Eigen::VectorXd::Constant(5, 0.1));
  CHECK(pg.mean_sq == doctest::Approx(0.2).epsilon(1e-13));
}

TEST_CASE("orthonormalize returns a g-orthonormal basis") {
  testgen::for_seeds(10, 1200, [](testgen::Gen& g, std::uint64_t) {
    Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(4, 4, [&] { return g.normal(); });
    Eigen::MatrixXd G = A * A.transpose() + 0.5 * Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd B = orthonormalize(G);
    CHECK((B.transpose() * G * B - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);
  });
}
