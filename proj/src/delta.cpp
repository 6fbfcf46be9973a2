#include "lagdelta/delta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lagdelta/frame_search.hpp"

namespace lagdelta {

TupleSpec::TupleSpec(int n, std::vector<int> parts) : n_(n), parts_(std::move(parts)) {
  auto bad = [&](const std::string& why) {
    fail(ErrorCode::invalid_argument, "tuple " + to_string() + " is not in S(" + std::to_string(n_) + "): " + why);
  };
  if (n_ < 3) bad("n must be at least 3");
  if (parts_.empty()) bad("need at least one part");
  for (int p : parts_)
    if (p < 2 || p >= n_) bad("each part must satisfy 2 <= n_j < n");
  if (total() > n_) bad("parts must sum to at most n");
}

int TupleSpec::total() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }

std::string TupleSpec::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + std::to_string(parts_[i]);
  return s + ")";
}

std::vector<TupleSpec> enumerate_tuples(int n) {
  std::vector<TupleSpec> out;
  std::vector<int> cur;
  auto rec = [&](auto& self, int lo, int left) -> void {
    if (!cur.empty()) out.emplace_back(n, cur);
    for (int p = lo; p < n && p <= left; ++p) {
      cur.push_back(p);
      self(self, p, left - p);
      cur.pop_back();
    }
  };
  rec(rec, 2, n);
  return out;
}

namespace {

// direct contraction with the full tensor; the optimiser uses the bivector operator instead
double tau_direct(const CurvatureTensor& R, const Eigen::MatrixXd& F, int first, int count) {
  const int m = R.dim();
  double s = 0.0;
  for (int a = first; a < first + count; ++a)
    for (int b = a + 1; b < first + count; ++b)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double xy = F(i, a) * F(j, b);
          if (xy == 0.0) continue;
          for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) s += R(i, j, k, l) * xy * F(k, b) * F(l, a);
        }
  return s;
}

std::vector<int> block_starts(const TupleSpec& spec) {
  std::vector<int> starts;
  int s = 0;
  for (int p : spec.parts()) {
    starts.push_back(s);
    s += p;
  }
  return starts;
}

void check_dims(const CurvatureTensor& R, const TupleSpec& spec) {
  if (R.dim() != spec.n())
    fail(ErrorCode::invalid_argument, "delta: tuple is for n = " + std::to_string(spec.n()) +
                                          " but the tensor has dimension " + std::to_string(R.dim()));
}

// flattened projector of each block; equal-size blocks sorted so the key ignores their order
std::vector<double> frame_key(const Eigen::MatrixXd& F, const TupleSpec& spec, std::vector<int>* order) {
  const auto starts = block_starts(spec);
  std::vector<std::vector<double>> keys;
  for (int b = 0; b < spec.k(); ++b) {
    Eigen::MatrixXd blk = F.middleCols(starts[b], spec.parts()[b]);
    Eigen::MatrixXd P = blk * blk.transpose();
    keys.emplace_back(P.data(), P.data() + P.size());
  }
  // blocks of equal size may be exchanged; the positions of each size stay fixed
  std::vector<int> idx(spec.k());
  std::iota(idx.begin(), idx.end(), 0);
  for (int size : spec.parts()) {
    std::vector<int> pos;
    for (int b = 0; b < spec.k(); ++b)
      if (spec.parts()[b] == size) pos.push_back(b);
    std::vector<int> members = pos;
    std::sort(members.begin(), members.end(), [&](int x, int y) { return keys[x] < keys[y]; });
    for (std::size_t i = 0; i < pos.size(); ++i) idx[pos[i]] = members[i];
  }
  std::vector<double> key;
  for (int b : idx) key.insert(key.end(), keys[b].begin(), keys[b].end());
  if (order) *order = idx;
  return key;
}

bool key_less(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-9) return true;
    if (a[i] > b[i] + 1e-9) return false;
  }
  return false;
}

}  // namespace

double tau_subspace(const CurvatureTensor& R, const Eigen::MatrixXd& basis, double tol) {
  if (basis.rows() != R.dim()) fail(ErrorCode::invalid_argument, "tau_subspace: basis has wrong ambient dimension");
  Eigen::MatrixXd gram = basis.transpose() * basis;
  double dev = (gram - Eigen::MatrixXd::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (dev > tol) fail(ErrorCode::invalid_argument, "tau_subspace: basis is not orthonormal (deviation " + std::to_string(dev) + ")");
  return tau_direct(R, basis, 0, static_cast<int>(basis.cols()));
}

DeltaResult delta_invariant(const CurvatureTensor& R, const TupleSpec& spec, const DeltaOptions& opts) {
  check_dims(R, spec);
  require(opts.restarts >= 1, "delta: need at least one restart");
  const int m = R.dim();
  const int N = spec.total();
  const auto starts = block_starts(spec);

  const Eigen::MatrixXd K = R.bivector_operator();
  std::vector<std::pair<int, int>> pairs;  // column pairs inside blocks
  for (int b = 0; b < spec.k(); ++b)
    for (int x = starts[b]; x < starts[b] + spec.parts()[b]; ++x)
      for (int y = x + 1; y < starts[b] + spec.parts()[b]; ++y) pairs.emplace_back(x, y);

  FrameObjective objective = [&K, &pairs, m](const Eigen::MatrixXd& Q) {
    Eigen::VectorXd w(K.rows());
    double s = 0.0;
    for (auto [x, y] : pairs) {
      int I = 0;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j, ++I) w[I] = Q(i, x) * Q(j, y) - Q(j, x) * Q(i, y);
      s += w.dot(K * w);
    }
    return s;
  };

  // rotations inside a block or inside the complement leave the objective unchanged
  std::vector<int> owner(m, spec.k());
  for (int b = 0; b < spec.k(); ++b)
    for (int x = starts[b]; x < starts[b] + spec.parts()[b]; ++x) owner[x] = b;
  std::vector<std::pair<int, int>> planes;
  for (int p = 0; p < m; ++p)
    for (int q = p + 1; q < m; ++q)
      if (owner[p] != owner[q] && owner[p] < spec.k()) planes.emplace_back(p, q);

  FrameSearchOptions fo;
  fo.seed = opts.seed;
  fo.min_step = opts.min_step;
  fo.threads = opts.threads;

  std::vector<RestartOutcome> runs;
  int batch = opts.restarts;
  int agree = 0;
  double best = 0.0;
  while (true) {
    auto more = multistart(objective, m, planes, fo, static_cast<int>(runs.size()), batch);
    runs.insert(runs.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    best = runs[0].value;
    for (const auto& r : runs) best = std::min(best, r.value);
    agree = 0;
    for (const auto& r : runs)
      if (r.value <= best + opts.agreement * (1.0 + std::abs(best))) ++agree;
    if (agree >= 2 || static_cast<int>(runs.size()) >= opts.max_restarts) break;
    batch = std::min(static_cast<int>(runs.size()), opts.max_restarts - static_cast<int>(runs.size()));
  }

  // deterministic tie-break among (numerically) equal minima
  int pick = -1;
  std::vector<double> pick_key;
  for (int r = 0; r < static_cast<int>(runs.size()); ++r) {
    if (runs[r].value > best + 1e-10 * (1.0 + std::abs(best))) continue;
    auto key = frame_key(runs[r].frame, spec, nullptr);
    if (pick < 0 || key_less(key, pick_key)) {
      pick = r;
      pick_key = std::move(key);
    }
  }

  DeltaResult res;
  res.tau = R.scalar();
  std::vector<int> order;
  frame_key(runs[pick].frame, spec, &order);
  res.minimizer.resize(m, N);
  int col = 0;
  for (int b : order) {
    res.minimizer.middleCols(col, spec.parts()[b]) = runs[pick].frame.middleCols(starts[b], spec.parts()[b]);
    col += spec.parts()[b];
  }
  res.inf_sum = runs[pick].value;
  res.value = res.tau - res.inf_sum;
  res.blocks = spec.parts();
  res.restarts_used = static_cast<int>(runs.size());
  res.agreeing_restarts = agree;
  res.converged = agree >= 2;

  if (opts.oracle_samples > 0) {
    double o = delta_bruteforce_oracle(R, spec, opts.oracle_samples, opts.oracle_seed);
    res.oracle_value = res.tau - o;
    res.oracle_gap = std::abs(res.inf_sum - o);
  }
  return res;
}

OracleResult delta_oracle(const CurvatureTensor& R, const TupleSpec& spec, int samples, std::uint64_t seed) {
  check_dims(R, spec);
  require(samples >= 1, "oracle: need at least one sample");
  const int m = R.dim();
  const auto starts = block_starts(spec);
  auto total = [&](const Eigen::MatrixXd& F) {
    double s = 0.0;
    for (int b = 0; b < spec.k(); ++b) s += tau_direct(R, F, starts[b], spec.parts()[b]);
    return s;
  };

  std::mt19937_64 rng(seed);
  OracleResult out;
  out.sampled_min = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd Q = haar_orthogonal(rng, m);
    double v = total(Q);
    if (v < out.sampled_min) {
      out.sampled_min = v;
      out.frame = Q;
    }
  }

  // (1+1) evolution strategy with the one-fifth success rule, own random stream
  std::mt19937_64 walk(seed ^ 0xd1b54a32d192ed03ull);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd Q = out.frame;
  double fx = out.sampled_min;
  double sigma = 0.05;
  Eigen::MatrixXd G(m, m);
  for (int it = 0; it < 4000 && sigma > 1e-10; ++it) {
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) G(i, j) = normal(walk);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Q + sigma * G);
    Eigen::MatrixXd P = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
    for (int j = 0; j < m; ++j)
      if (qr.matrixQR()(j, j) < 0.0) P.col(j) = -P.col(j);
    double v = total(P);
    if (v < fx) {
      Q = P;
      fx = v;
      sigma *= 1.5;
    } else {
      sigma *= 0.9;
    }
  }
  out.refined = fx;
  out.frame = Q;
  return out;
}

double delta_bruteforce_oracle(const CurvatureTensor& R, const TupleSpec& spec, int samples, std::uint64_t seed) {
  return delta_oracle(R, spec, samples, seed).refined;
}

double RhsCoefficients::evaluate(double Hsq, double c) const {
  return boost::rational_cast<double>(mean_sq) * Hsq + boost::rational_cast<double>(constant) * c;
}

namespace {

Rational constant_term(const TupleSpec& spec) {
  long long s = static_cast<long long>(spec.n()) * (spec.n() - 1);
  for (int p : spec.parts()) s -= static_cast<long long>(p) * (p - 1);
  return Rational(s, 2);
}

}  // namespace

RhsCoefficients classical_rhs_coefficients(const TupleSpec& spec) {
  const long long n = spec.n(), k = spec.k(), N = spec.total();
  return {Rational(n * n * (n + k - 1 - N), 2 * (n + k - N)), constant_term(spec)};
}

RhsCoefficients improved_rhs_coefficients(const TupleSpec& spec) {
  if (!spec.strict())
    fail(ErrorCode::invalid_argument, "improved inequality needs sum n_j < n; got " + spec.to_string());
  const long long n = spec.n(), k = spec.k(), N = spec.total();
  Rational S(0);
  for (int p : spec.parts()) S += Rational(1, 2 + p);
  Rational num = Rational(n - N + 3 * k - 1) - 6 * S;
  Rational den = Rational(n - N + 3 * k + 2) - 6 * S;
  return {Rational(n * n) * num / (2 * den), constant_term(spec)};
}

double classical_rhs(const TupleSpec& spec, double Hsq, double c) { return classical_rhs_coefficients(spec).evaluate(Hsq, c); }
double improved_rhs(const TupleSpec& spec, double Hsq, double c) { return improved_rhs_coefficients(spec).evaluate(Hsq, c); }

EqualityCheck improved_equality_check(const CurvatureTensor& R, const PointGeometry& pg, const DeltaOptions& opts) {
  if (pg.dim != 5 || R.dim() != 5) fail(ErrorCode::invalid_argument, "improved equality check is for dimension 5");
  TupleSpec spec(5, {2, 2});
  EqualityCheck out;
  out.delta = delta_invariant(R, spec, opts);
  out.rhs = improved_rhs(spec, pg.mean_sq, pg.c);
  out.residual = out.delta.value - out.rhs;
  return out;
}

double improved_equality_residual(const CurvatureTensor& R, const PointGeometry& pg, const DeltaOptions& opts) {
  return improved_equality_check(R, pg, opts).residual;
}

}  // namespace lagdelta
