#pragma once

// Derivative-free minimisation over O(m) by Givens-rotation coordinate descent.

#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lagdelta {

using FrameObjective = std::function<double(const Eigen::MatrixXd&)>;

struct FrameSearchOptions {
  int restarts = 64;
  std::uint64_t seed = 0;
  double initial_step = std::numbers::pi / 4.0;
  double min_step = 1e-7;
  int max_sweeps_per_level = 64;
  // golden-section line search per plane after the step schedule
  int polish_sweeps = 4;
  double polish_bracket = 0.05;
  // 0 = one worker per hardware thread
  int threads = 0;
};

struct RestartOutcome {
  double value = 0.0;
  Eigen::MatrixXd frame;
  int evaluations = 0;
};

// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed)
Eigen::MatrixXd haar_orthogonal(std::mt19937_64& rng, int m);
// restart r of a search with the given seed starts from this frame
Eigen::MatrixXd restart_frame(std::uint64_t seed, int restart, int m);

void apply_givens(Eigen::MatrixXd& Q, int p, int q, double theta);

RestartOutcome descend(const FrameObjective& f, const std::vector<std::pair<int, int>>& planes, Eigen::MatrixXd start,
                       const FrameSearchOptions& opts);

// restarts first..first+count-1; results in restart order whatever the scheduling
std::vector<RestartOutcome> multistart(const FrameObjective& f, int m, const std::vector<std::pair<int, int>>& planes,
                                       const FrameSearchOptions& opts, int first, int count);

}  // namespace lagdelta
