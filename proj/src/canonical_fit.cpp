#include <algorithm>
#include <limits>
#include <cmath>
#include <random>

#include "lagdelta/delta.hpp"
#include "lagdelta/frame_search.hpp"

namespace lagdelta {

namespace {

void set_sym(CubicForm& h, int i, int j, int k, double v) {
  h(i, j, k) = h(i, k, j) = h(j, i, k) = h(j, k, i) = h(k, i, j) = h(k, j, i) = v;
}

struct PatternFit {
  double a, b, mu, residual;
};

// least squares for (a, b, mu); the three supports are disjoint
PatternFit fit_pattern(const CubicForm& h) {
  double a = (h(0, 0, 0) - h(0, 1, 1) - h(1, 0, 1) - h(1, 1, 0)) / 4.0;
  double b = (h(2, 2, 2) - h(2, 3, 3) - h(3, 2, 3) - h(3, 3, 2)) / 4.0;
  double s = 4.0 * h(4, 4, 4);
  for (int i = 0; i < 4; ++i) s += h(4, i, i) + h(i, 4, i) + h(i, i, 4);
  double mu = s / 28.0;
  CubicForm p = improved_ideal_pattern(a, b, mu);
  return {a, b, mu, h.distance(p)};
}

}  // namespace

CubicForm improved_ideal_pattern(double a, double b, double mu) {
  CubicForm h(5);
  set_sym(h, 0, 0, 0, a);
  set_sym(h, 0, 1, 1, -a);
  set_sym(h, 2, 2, 2, b);
  set_sym(h, 2, 3, 3, -b);
  for (int i = 0; i < 4; ++i) set_sym(h, 4, i, i, mu);
  set_sym(h, 4, 4, 4, 4.0 * mu);
  return h;
}

CubicForm h_umbilical_pattern(int m, double phi, double mu) {
  require(m >= 2, "h-umbilical pattern: dimension must be at least 2");
  CubicForm h(m);
  const int n = m - 1;
  for (int j = 0; j < n; ++j) set_sym(h, n, j, j, mu);
  set_sym(h, n, n, n, phi);
  return h;
}

CanonicalFit canonical_frame_fit(const CubicForm& raw, int restarts, std::uint64_t seed) {
  require(raw.dim() == 5, "canonical fit: needs a 5-dimensional cubic form");
  CanonicalFit out;
  out.frame = Eigen::MatrixXd::Identity(5, 5);
  const CubicForm h = raw.symmetrized();
  const double hn = h.norm();
  if (hn < 1e-12) {
    out.minimal = true;
    return out;
  }

  Eigen::VectorXd t = h.trace_vector();
  if (t.norm() < 1e-9 * std::max(1.0, hn)) {
    out.minimal = true;
    out.residual = hn;
    return out;
  }
  // e5 along the mean curvature; any orthonormal completion for e1..e4
  Eigen::VectorXd e5 = t.normalized();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(e5);
  Eigen::MatrixXd H = qr.householderQ() * Eigen::MatrixXd::Identity(5, 5);
  Eigen::MatrixXd F0(5, 5);
  F0.leftCols(4) = H.rightCols(4);
  F0.col(4) = e5;
  const CubicForm h0 = h.rotated(F0);

  FrameObjective objective = [&h0](const Eigen::MatrixXd& Q) { return fit_pattern(h0.rotated(Q)).residual; };
  std::vector<std::pair<int, int>> inner, all;
  for (int p = 0; p < 5; ++p)
    for (int q = p + 1; q < 5; ++q) {
      all.emplace_back(p, q);
      if (q < 4) inner.emplace_back(p, q);
    }

  FrameSearchOptions fo;
  fo.min_step = 1e-9;
  fo.polish_bracket = 0.01;
  RestartOutcome best;
  best.value = std::numeric_limits<double>::infinity();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), 0x51ed270bu};
  std::mt19937_64 rng(seq);
  for (int r = 0; r < restarts; ++r) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(5, 5);
    if (r > 0) Q.topLeftCorner(4, 4) = haar_orthogonal(rng, 4);
    RestartOutcome run = descend(objective, inner, Q, fo);
    if (run.value < best.value - 1e-14) best = std::move(run);
    if (best.value < 1e-12 * hn) break;
  }
  // small full-frame polish in case the trace direction is slightly off the pattern's e5
  fo.initial_step = 1e-3;
  RestartOutcome polished = descend(objective, all, best.frame, fo);
  if (polished.value < best.value) best = std::move(polished);

  Eigen::MatrixXd Q = best.frame;
  PatternFit pf = fit_pattern(h0.rotated(Q));
  // canonical signs and block order: a >= b >= 0
  if (pf.a < 0.0) Q.col(0) = -Q.col(0);
  if (pf.b < 0.0) Q.col(2) = -Q.col(2);
  if (std::abs(pf.b) > std::abs(pf.a)) {
    Eigen::MatrixXd tmp = Q.leftCols(2);
    Q.leftCols(2) = Q.middleCols(2, 2);
    Q.middleCols(2, 2) = tmp;
  }
  if (pf.mu < 0.0) Q.col(4) = -Q.col(4);
  if (Q.determinant() < 0.0) Q.col(1) = -Q.col(1);
  // flipping e2 alone keeps the a-block pattern (a Re((x1 + i x2)^3) is even in x2)
  pf = fit_pattern(h0.rotated(Q));
  out.a = pf.a;
  out.b = pf.b;
  out.mu = pf.mu;
  out.residual = pf.residual;
  out.frame = F0 * Q;
  return out;
}

CanonicalFit canonical_frame_fit(const PointGeometry& pg) { return canonical_frame_fit(pg.h); }

}  // namespace lagdelta
