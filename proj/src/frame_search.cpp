#include "lagdelta/frame_search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace lagdelta {

Eigen::MatrixXd haar_orthogonal(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd G(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

Eigen::MatrixXd restart_frame(std::uint64_t seed, int restart, int m) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart), 0x9e3779b9u};
  std::mt19937_64 rng(seq);
  return haar_orthogonal(rng, m);
}

void apply_givens(Eigen::MatrixXd& Q, int p, int q, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    double a = Q(i, p), b = Q(i, q);
    Q(i, p) = c * a + s * b;
    Q(i, q) = -s * a + c * b;
  }
}

namespace {

bool better(double candidate, double current) { return candidate < current - 1e-15 * (1.0 + std::abs(current)); }

}  // namespace

RestartOutcome descend(const FrameObjective& f, const std::vector<std::pair<int, int>>& planes, Eigen::MatrixXd Q,
                       const FrameSearchOptions& opts) {
  RestartOutcome out;
  double fx = f(Q);
  int evals = 1;
  Eigen::MatrixXd trial;
  for (double step = opts.initial_step; step >= opts.min_step; step *= 0.5) {
    for (int sweep = 0; sweep < opts.max_sweeps_per_level; ++sweep) {
      bool moved = false;
      for (auto [p, q] : planes) {
        for (double dir : {1.0, -1.0}) {
          trial = Q;
          apply_givens(trial, p, q, dir * step);
          double ft = f(trial);
          ++evals;
          if (better(ft, fx)) {
            Q = trial;
            fx = ft;
            moved = true;
            break;
          }
        }
      }
      if (!moved) break;
    }
  }

  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < opts.polish_sweeps; ++sweep) {
    const double before = fx;
    for (auto [p, q] : planes) {
      auto along = [&](double theta) {
        trial = Q;
        apply_givens(trial, p, q, theta);
        ++evals;
        return f(trial);
      };
      double a = -opts.polish_bracket, b = opts.polish_bracket;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = along(x1), f2 = along(x2);
      while (b - a > 1e-10) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = along(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = along(x2);
        }
      }
      double theta = 0.5 * (a + b);
      double ft = along(theta);
      if (better(ft, fx)) {
        apply_givens(Q, p, q, theta);
        fx = ft;
      }
    }
    if (before - fx < 1e-14 * (1.0 + std::abs(fx))) break;
  }
  out.value = fx;
  out.frame = std::move(Q);
  out.evaluations = evals;
  return out;
}

std::vector<RestartOutcome> multistart(const FrameObjective& f, int m, const std::vector<std::pair<int, int>>& planes,
                                       const FrameSearchOptions& opts, int first, int count) {
  std::vector<RestartOutcome> results(count);
  int workers = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, count));
  auto run = [&](int r) { results[r] = descend(f, planes, restart_frame(opts.seed, first + r, m), opts); };
  if (workers == 1) {
    for (int r = 0; r < count; ++r) run(r);
    return results;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int r = next++; r < count; r = next++) run(r);
    });
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace lagdelta
