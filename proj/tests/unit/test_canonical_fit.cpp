#include <cmath>

#include "lagdelta/delta.hpp"
#include "support.hpp"

using namespace lagdelta;

namespace {
// a and b only matter up to swapping the two blocks and flipping signs
void check_invariants(const CanonicalFit& f, double a, double b, double mu) {
  CHECK(f.mu == doctest::Approx(mu).epsilon(1e-9));
  double got_lo = std::min(std::abs(f.a), std::abs(f.b)), got_hi = std::max(std::abs(f.a), std::abs(f.b));
  double want_lo = std::min(std::abs(a), std::abs(b)), want_hi = std::max(std::abs(a), std::abs(b));
  CHECK(got_lo == doctest::Approx(want_lo).epsilon(1e-8));
  CHECK(got_hi == doctest::Approx(want_hi).epsilon(1e-8));
  CHECK(f.residual < 1e-9);
}
}  // namespace

TEST_CASE("pattern traces: mean curvature along e5") {
  CubicForm h = improved_ideal_pattern(0.7, 0.3, 0.2);
  CHECK(h.symmetry_residual() == 0.0);
  Eigen::VectorXd t = h.trace_vector();
  for (int i = 0; i < 4; ++i) CHECK(std::abs(t[i]) < 1e-15);
  CHECK(t[4] == doctest::Approx(8 * 0.2));
  CHECK(h(4, 4, 4) == doctest::Approx(4 * 0.2));
}

TEST_CASE("fit recovers a synthesized pattern") {
  check_invariants(canonical_frame_fit(improved_ideal_pattern(0.7, 0.3, 0.2)), 0.7, 0.3, 0.2);
}

TEST_CASE("fit recovers a rotated pattern") {
  testgen::for_seeds(10, 1800, [](testgen::Gen& g, std::uint64_t) {
    double a = g.uniform(-1, 1), b = g.uniform(-1, 1), mu = g.uniform(0.1, 1.0);
    Eigen::MatrixXd Q = g.rotation(5);
    CubicForm h = improved_ideal_pattern(a, b, mu).rotated(Q);
    CanonicalFit f = canonical_frame_fit(h);
    check_invariants(f, a, b, mu);
    // the fitted frame maps h back onto the pattern
    CHECK((f.frame.transpose() * f.frame - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-10);
    CHECK(h.rotated(f.frame).distance(improved_ideal_pattern(f.a, f.b, f.mu)) < 1e-8);
  });
}

TEST_CASE("ratio-4 form fits with a = b = 0") {
  CanonicalFit f = canonical_frame_fit(improved_ideal_pattern(0.0, 0.0, 0.35));
  CHECK(std::abs(f.a) < 1e-9);
  CHECK(std::abs(f.b) < 1e-9);
  CHECK(f.mu == doctest::Approx(0.35));
  CHECK_FALSE(f.minimal);
}

TEST_CASE("minimal points are flagged") {
  CanonicalFit f = canonical_frame_fit(CubicForm(5));
  CHECK(f.minimal);
  CHECK(f.mu == 0.0);
}

TEST_CASE("forms off the pattern leave a residual") {
  testgen::Gen g(77);
  CanonicalFit f = canonical_frame_fit(g.symmetric_cubic(5));
  CHECK(f.residual > 1e-3);
}
