#include "lagdelta/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lagdelta {

double CubicForm::symmetry_residual() const {
  double r = 0.0;
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      for (int k = 0; k < m_; ++k) {
        double x = (*this)(i, j, k);
        r = std::max({r, std::abs(x - (*this)(j, i, k)), std::abs(x - (*this)(k, j, i)),
                      std::abs(x - (*this)(i, k, j))});
      }
  return r;
}

CubicForm CubicForm::symmetrized() const {
  CubicForm s(m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      for (int k = 0; k < m_; ++k)
        s(i, j, k) = ((*this)(i, j, k) + (*this)(i, k, j) + (*this)(j, i, k) + (*this)(j, k, i) +
                      (*this)(k, i, j) + (*this)(k, j, i)) / 6.0;
  return s;
}

CubicForm CubicForm::rotated(const Eigen::MatrixXd& Q) const {
  const int m = m_;
  // contract one index at a time
  CubicForm a(m), b(m), c(m);
  for (int x = 0; x < m; ++x)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += Q(i, x) * (*this)(i, j, k);
        a(x, j, k) = s;
      }
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += Q(j, y) * a(x, j, k);
        b(x, y, k) = s;
      }
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int z = 0; z < m; ++z) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += Q(k, z) * b(x, y, k);
        c(x, y, z) = s;
      }
  return c;
}

Eigen::VectorXd CubicForm::trace_vector() const {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) t[i] += (*this)(i, j, j);
  return t;
}

double CubicForm::mean_sq() const {
  if (m_ == 0) return 0.0;
  return trace_vector().squaredNorm() / (static_cast<double>(m_) * m_);
}

double CubicForm::norm() const {
  double s = 0.0;
  for (double x : v_) s += x * x;
  return std::sqrt(s);
}

double CubicForm::distance(const CubicForm& o) const {
  require(o.m_ == m_, "cubic form: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) s += (v_[i] - o.v_[i]) * (v_[i] - o.v_[i]);
  return std::sqrt(s);
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& g) {
  const int m = static_cast<int>(g.rows());
  // columns of C are coordinate vectors, inner product given by g
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd B(m, m);
  std::vector<int> remaining(m);
  for (int i = 0; i < m; ++i) remaining[i] = i;
  for (int a = 0; a < m; ++a) {
    int best = -1;
    double best_norm = -1.0;
    for (int idx : remaining) {
      double nrm = C.col(idx).dot(g * C.col(idx));
      if (nrm > best_norm * (1.0 + 1e-12)) {
        best = idx;
        best_norm = nrm;
      }
    }
    if (!(best_norm > 0.0)) fail(ErrorCode::domain_error, "orthonormalize: metric is not positive definite");
    Eigen::VectorXd e = C.col(best) / std::sqrt(best_norm);
    B.col(a) = e;
    remaining.erase(std::find(remaining.begin(), remaining.end(), best));
    Eigen::VectorXd ge = g * e;
    for (int idx : remaining) C.col(idx) -= ge.dot(C.col(idx)) * e;
  }
  return B;
}

PointGeometry second_fundamental_form(const AmbientSpace& space, const Jet3& jet, const SffOptions& opts) {
  require(jet.order >= 2, "second fundamental form: needs second derivatives");
  const int m = jet.m;
  PointGeometry pg;
  pg.dim = m;
  pg.c = space.c();
  pg.metric = induced_metric(space, jet, opts.floor);
  pg.basis_change = orthonormalize(pg.metric);
  const Eigen::MatrixXd& B = pg.basis_change;

  const int n = static_cast<int>(jet.value.size());
  for (int a = 0; a < m; ++a) {
    AmbientVector e = AmbientVector::Zero(n);
    for (int i = 0; i < m; ++i) e += B(i, a) * jet.d1[i];
    pg.frame.push_back(std::move(e));
  }
  std::vector<AmbientVector> Je;
  for (const auto& e : pg.frame) Je.push_back(AmbientSpace::apply_J(e));

  const bool lift = space.c() != 0;
  const double eps = space.epsilon();
  const AmbientVector& L = jet.value;
  const AmbientVector JL = AmbientSpace::apply_J(L);

  pg.h = CubicForm(m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      AmbientVector V = AmbientVector::Zero(n);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) V += (B(i, a) * B(j, b)) * jet.second(i, j);
      const double scale = std::max(1.0, V.norm());
      AmbientVector rest = V;
      for (int c = 0; c < m; ++c) rest -= space.inner(V, pg.frame[c]) * pg.frame[c];
      if (lift) {
        // <L,L> = eps = <JL,JL>; expected coefficients -eps*delta_ab and 0
        double alpha = eps * space.inner(V, L);
        double beta = eps * space.inner(V, JL);
        pg.umbilical_residual = std::max(pg.umbilical_residual, std::abs(alpha + (a == b ? eps : 0.0)) / scale);
        pg.vertical_residual = std::max(pg.vertical_residual, std::abs(beta) / scale);
        rest -= alpha * L + beta * JL;
      }
      for (int c = 0; c < m; ++c) {
        double coef = space.inner(V, Je[c]);
        rest -= coef * Je[c];
        pg.h(c, a, b) = coef;
        if (a != b) pg.h(c, b, a) = coef;
      }
      pg.normal_residual = std::max(pg.normal_residual, rest.norm() / scale);
    }
  }
  const double worst = std::max({pg.normal_residual, pg.umbilical_residual, pg.vertical_residual});
  if (worst > opts.tolerance)
    fail(ErrorCode::not_lagrangian, "second fundamental form: normal component outside span{Je_i, L, JL} (residual " +
                                        std::to_string(worst) + "); chart is not Lagrangian/horizontal");
  Eigen::VectorXd t = pg.h.trace_vector();
  pg.mean_curvature = t / m;
  pg.mean_sq = pg.h.mean_sq();
  return pg;
}

PointGeometry second_fundamental_form(const ChartImmersion& f, const Eigen::VectorXd& u, const SffOptions& opts) {
  return second_fundamental_form(f.space(), f.evaluate_jet(u, 2), opts);
}

PointGeometry geometry_from_cubic_form(const CubicForm& h, double c) {
  PointGeometry pg;
  pg.dim = h.dim();
  pg.c = c;
  pg.h = h;
  pg.basis_change = Eigen::MatrixXd::Identity(h.dim(), h.dim());
  pg.metric = pg.basis_change;
  pg.mean_curvature = h.trace_vector() / h.dim();
  pg.mean_sq = h.mean_sq();
  return pg;
}

CurvatureTensor CurvatureTensor::constant(int m, double c) {
  CurvatureTensor R(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) {
        R(i, j, j, i) = c;
        R(i, j, i, j) = -c;
      }
  return R;
}

CurvatureTensor CurvatureTensor::from_data(int m, std::vector<double> data) {
  require(m >= 1 && data.size() == static_cast<std::size_t>(m) * m * m * m, "curvature tensor: needs m^4 components");
  CurvatureTensor R(m);
  R.r_ = std::move(data);
  return R;
}

double CurvatureTensor::scalar() const {
  double s = 0.0;
  for (int i = 0; i < m_; ++i)
    for (int j = i + 1; j < m_; ++j) s += sectional(i, j);
  return s;
}

double CurvatureTensor::symmetry_residual() const {
  double r = 0.0;
  const auto& R = *this;
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      for (int k = 0; k < m_; ++k)
        for (int l = 0; l < m_; ++l) {
          double x = R(i, j, k, l);
          r = std::max({r, std::abs(x + R(j, i, k, l)), std::abs(x + R(i, j, l, k)), std::abs(x - R(k, l, i, j)),
                        std::abs(x + R(j, k, i, l) + R(k, i, j, l))});
        }
  return r;
}

CurvatureTensor CurvatureTensor::rotated(const Eigen::MatrixXd& Q) const {
  const int m = m_;
  CurvatureTensor cur = *this;
  // contract index slot s with Q, one slot at a time
  for (int s = 0; s < 4; ++s) {
    CurvatureTensor next(m);
    int idx[4], src[4];
    for (idx[0] = 0; idx[0] < m; ++idx[0])
      for (idx[1] = 0; idx[1] < m; ++idx[1])
        for (idx[2] = 0; idx[2] < m; ++idx[2])
          for (idx[3] = 0; idx[3] < m; ++idx[3]) {
            double acc = 0.0;
            for (int t = 0; t < 4; ++t) src[t] = idx[t];
            for (int p = 0; p < m; ++p) {
              src[s] = p;
              acc += Q(p, idx[s]) * cur(src[0], src[1], src[2], src[3]);
            }
            next(idx[0], idx[1], idx[2], idx[3]) = acc;
          }
    cur = std::move(next);
  }
  return cur;
}

double CurvatureTensor::max_abs_difference(const CurvatureTensor& o) const {
  require(o.m_ == m_, "curvature tensor: dimension mismatch");
  double r = 0.0;
  for (std::size_t i = 0; i < r_.size(); ++i) r = std::max(r, std::abs(r_[i] - o.r_[i]));
  return r;
}

Eigen::MatrixXd CurvatureTensor::bivector_operator() const {
  const int p = m_ * (m_ - 1) / 2;
  Eigen::MatrixXd K(p, p);
  int I = 0;
  for (int i = 0; i < m_; ++i)
    for (int j = i + 1; j < m_; ++j, ++I) {
      int Kc = 0;
      for (int k = 0; k < m_; ++k)
        for (int l = k + 1; l < m_; ++l, ++Kc) K(I, Kc) = (*this)(i, j, l, k);
    }
  return K;
}

CurvatureTensor gauss_curvature_tensor(const CubicForm& h, double c) {
  const int m = h.dim();
  CurvatureTensor R(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double s = 0.0;
          for (int q = 0; q < m; ++q) s += h(q, j, k) * h(q, i, l) - h(q, i, k) * h(q, j, l);
          s += c * ((i == l && j == k ? 1.0 : 0.0) - (i == k && j == l ? 1.0 : 0.0));
          R(i, j, k, l) = s;
        }
  return R;
}

CurvatureTensor gauss_curvature_tensor(const PointGeometry& pg) { return gauss_curvature_tensor(pg.h, pg.c); }

double scalar_curvature(const CurvatureTensor& R) { return R.scalar(); }

CurvatureTensor intrinsic_curvature_tensor(const AmbientSpace& space, const Jet3& J, const Eigen::MatrixXd& B) {
  require(J.order >= 3, "intrinsic curvature: needs third derivatives");
  const int m = J.m;
  auto ip = [&](const AmbientVector& a, const AmbientVector& b) { return space.inner(a, b); };
  auto idx = [m](int a, int b, int c) { return (a * m + b) * m + c; };

  Eigen::MatrixXd g(m, m);
  std::vector<double> dg(m * m * m);          // dg[k][i][j] = d_k g_ij
  std::vector<double> ddg(m * m * m * m);     // ddg[k][l][i][j]
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      g(i, j) = ip(J.d1[i], J.d1[j]);
      for (int k = 0; k < m; ++k) {
        dg[idx(k, i, j)] = ip(J.second(i, k), J.d1[j]) + ip(J.d1[i], J.second(j, k));
        for (int l = 0; l < m; ++l)
          ddg[idx(k, l, i) * m + j] = ip(J.third(i, k, l), J.d1[j]) + ip(J.second(i, k), J.second(j, l)) +
                                      ip(J.second(i, l), J.second(j, k)) + ip(J.d1[i], J.third(j, k, l));
      }
    }
  Eigen::MatrixXd gi = g.inverse();

  // Gamma_{ij,l} (first kind) and its derivatives
  std::vector<double> G1(m * m * m), dG1(m * m * m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l) {
        G1[idx(i, j, l)] = 0.5 * (dg[idx(i, j, l)] + dg[idx(j, i, l)] - dg[idx(l, i, j)]);
        for (int q = 0; q < m; ++q)
          dG1[idx(q, i, j) * m + l] =
              0.5 * (ddg[idx(q, i, j) * m + l] + ddg[idx(q, j, i) * m + l] - ddg[idx(q, l, i) * m + j]);
      }
  // Gamma^k_ij and d_q Gamma^k_ij using d g^{kl} = -g^{ka} dg_ab g^{bl}
  std::vector<double> G2(m * m * m, 0.0), dG2(m * m * m * m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int l = 0; l < m; ++l) s += gi(k, l) * G1[idx(i, j, l)];
        G2[idx(k, i, j)] = s;
      }
  for (int q = 0; q < m; ++q) {
    Eigen::MatrixXd dq(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) dq(a, b) = dg[idx(q, a, b)];
    Eigen::MatrixXd dgi = -gi * dq * gi;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          double s = 0.0;
          for (int l = 0; l < m; ++l) s += dgi(k, l) * G1[idx(i, j, l)] + gi(k, l) * dG1[idx(q, i, j) * m + l];
          dG2[idx(q, k, i) * m + j] = s;
        }
  }
  // R(d_i, d_j) d_k = R^p_{ijk} d_p, then lower with g
  CurvatureTensor Rc(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        Eigen::VectorXd up(m);
        for (int p = 0; p < m; ++p) {
          double s = dG2[idx(i, p, j) * m + k] - dG2[idx(j, p, i) * m + k];
          for (int r = 0; r < m; ++r) s += G2[idx(r, j, k)] * G2[idx(p, i, r)] - G2[idx(r, i, k)] * G2[idx(p, j, r)];
          up[p] = s;
        }
        Eigen::VectorXd low = g * up;
        for (int l = 0; l < m; ++l) Rc(i, j, k, l) = low[l];
      }
  return Rc.rotated(B);
}

double intrinsic_curvature_crosscheck(const ChartImmersion& f, const Eigen::VectorXd& u) {
  Jet3 J = f.evaluate_jet(u, 3);
  PointGeometry pg = second_fundamental_form(f.space(), J);
  CurvatureTensor extrinsic = gauss_curvature_tensor(pg);
  CurvatureTensor intrinsic = intrinsic_curvature_tensor(f.space(), J, pg.basis_change);
  return extrinsic.max_abs_difference(intrinsic);
}

CurvatureTensor random_algebraic_curvature(std::uint64_t seed, int m, int terms) {
  require(m >= 2 && terms >= 1, "random curvature: bad parameters");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CurvatureTensor R(m);
  for (int t = 0; t < terms; ++t) {
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) A(i, j) = A(j, i) = normal(rng) / std::sqrt(static_cast<double>(m));
    double sign = t % 2 == 0 ? 1.0 : -1.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) R(i, j, k, l) += sign * (A(i, l) * A(j, k) - A(i, k) * A(j, l));
  }
  return R;
}

}  // namespace lagdelta
