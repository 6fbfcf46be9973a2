#include "lagdelta/immersion.hpp"

#include <algorithm>
#include <cmath>

namespace lagdelta {

Box Box::cube(int m, double half_width) { return cube(m, -half_width, half_width); }

Box Box::cube(int m, double lo, double hi) {
  require(m >= 1 && hi > lo, "box: invalid extent");
  return Box{Eigen::VectorXd::Constant(m, lo), Eigen::VectorXd::Constant(m, hi)};
}

bool Box::contains(const Eigen::VectorXd& u) const {
  if (u.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (!(u[i] > lower[i] && u[i] < upper[i])) return false;
  return true;
}

Box Box::shrunk(double factor) const {
  Eigen::VectorXd c = center();
  Eigen::VectorXd half = 0.5 * factor * (upper - lower);
  return Box{c - half, c + half};
}

namespace {

void sorted3(int& a, int& b, int& c) {
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
}

}  // namespace

int Jet3::index2(int i, int j) const {
  if (i > j) std::swap(i, j);
  return i * m - i * (i - 1) / 2 + (j - i);
}

int Jet3::index3(int i, int j, int k) const {
  sorted3(i, j, k);
  int idx = 0;
  for (int a = 0; a < i; ++a) {
    int r = m - a;
    idx += r * (r + 1) / 2;
  }
  for (int b = i; b < j; ++b) idx += m - b;
  return idx + (k - j);
}

ChartImmersion::ChartImmersion(std::string name, Box domain, AmbientSpace space, JetMap jets)
    : name_(std::move(name)), domain_(std::move(domain)), space_(space), jets_(std::move(jets)) {
  require(domain_.dim() >= 1 && domain_.dim() <= kMaxJetVars, "chart: unsupported dimension");
}

ChartImmersion ChartImmersion::black_box(std::string name, Box domain, AmbientSpace space, ValueMap values,
                                         FdOptions fd) {
  ChartImmersion c(std::move(name), std::move(domain), space, JetMap{});
  c.values_ = std::move(values);
  c.fd_ = fd;
  return c;
}

ChartImmersion ChartImmersion::with_finite_differences(FdOptions fd) const {
  ChartImmersion c = *this;
  if (!c.values_) {
    JetMap jm = jets_;
    int m = dimension();
    c.values_ = [jm, m](const Eigen::VectorXd& u) {
      auto vars = Jet<double>::variables(JetLayout::get(m, 0), u);
      auto comps = jm(vars);
      AmbientVector z(comps.size());
      for (std::size_t k = 0; k < comps.size(); ++k) z[k] = comps[k].value();
      return z;
    };
  }
  c.jets_ = JetMap{};
  c.fd_ = fd;
  return c;
}

ChartImmersion ChartImmersion::with_domain(Box domain) const {
  require(domain.dim() == dimension(), "chart: domain dimension mismatch");
  ChartImmersion c = *this;
  c.domain_ = std::move(domain);
  return c;
}

ChartImmersion ChartImmersion::renamed(std::string name) const {
  ChartImmersion c = *this;
  c.name_ = std::move(name);
  return c;
}

void ChartImmersion::check_point(const Eigen::VectorXd& u) const {
  if (u.size() != dimension()) fail(ErrorCode::invalid_argument, "chart " + name_ + ": point has wrong dimension");
  if (!domain_.contains(u)) fail(ErrorCode::domain_error, "chart " + name_ + ": point outside the open domain");
}

std::vector<Jet<cplx>> ChartImmersion::jets(const Eigen::VectorXd& u, int order) const {
  check_point(u);
  if (!jets_) fail(ErrorCode::invalid_argument, "chart " + name_ + ": no analytic jet backend");
  auto vars = Jet<double>::variables(JetLayout::get(dimension(), order), u);
  auto out = jets_(vars);
  if (static_cast<int>(out.size()) != space_.model_dim())
    fail(ErrorCode::internal, "chart " + name_ + ": map returned wrong component count");
  return out;
}

AmbientVector ChartImmersion::value(const Eigen::VectorXd& u) const {
  if (!jets_) {
    check_point(u);
    return values_(u);
  }
  auto comps = jets(u, 0);
  AmbientVector z(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) z[k] = comps[k].value();
  return z;
}

Jet3 ChartImmersion::evaluate_jet(const Eigen::VectorXd& u, int order) const {
  if (order < 1 || order > 3) fail(ErrorCode::invalid_argument, "chart: jet order must be 1, 2 or 3");
  check_point(u);
  return jets_ ? jet_from_taylor(u, order) : jet_from_differences(u, order);
}

Jet3 ChartImmersion::jet_from_taylor(const Eigen::VectorXd& u, int order) const {
  auto comps = jets(u, order);
  const int m = dimension();
  const int n = static_cast<int>(comps.size());
  Jet3 J;
  J.m = m;
  J.order = order;
  J.value.resize(n);
  for (int k = 0; k < n; ++k) J.value[k] = comps[k].value();
  J.d1.assign(m, AmbientVector(n));
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k) J.d1[i][k] = comps[k].first(i);
  if (order >= 2) {
    J.d2.assign(m * (m + 1) / 2, AmbientVector(n));
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        for (int k = 0; k < n; ++k) J.d2[J.index2(i, j)][k] = comps[k].second(i, j);
  }
  if (order >= 3) {
    J.d3.assign(m * (m + 1) * (m + 2) / 6, AmbientVector(n));
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        for (int l = j; l < m; ++l)
          for (int k = 0; k < n; ++k) J.d3[J.index3(i, j, l)][k] = comps[k].third(i, j, l);
  }
  return J;
}

// Central differences, one Richardson level (h and h/2). The order-k derivatives
// use step * 10^(k-1) so that roundoff stays well below truncation error.
Jet3 ChartImmersion::jet_from_differences(const Eigen::VectorXd& u, int order) const {
  const int m = dimension();
  const double scale = domain_.scale();
  Jet3 J;
  J.m = m;
  J.order = order;
  J.value = values_(u);

  auto at = [&](const Eigen::VectorXd& x) -> AmbientVector {
    if (!domain_.contains(x)) fail(ErrorCode::domain_error, "chart " + name_ + ": difference stencil leaves the domain");
    return values_(x);
  };
  auto unit = [&](int i) { return Eigen::VectorXd::Unit(m, i); };

  auto first = [&](int i, double h) -> AmbientVector {
    return (at(u + h * unit(i)) - at(u - h * unit(i))) / (2.0 * h);
  };
  auto second_at = [&](const Eigen::VectorXd& x, int i, int j, double h) -> AmbientVector {
    if (i == j) return (at(x + h * unit(i)) - 2.0 * at(x) + at(x - h * unit(i))) / (h * h);
    Eigen::VectorXd ei = h * unit(i), ej = h * unit(j);
    return (at(x + ei + ej) - at(x + ei - ej) - at(x - ei + ej) + at(x - ei - ej)) / (4.0 * h * h);
  };
  auto third = [&](int i, int j, int k, double h) -> AmbientVector {
    return (second_at(u + h * unit(i), j, k, h) - second_at(u - h * unit(i), j, k, h)) / (2.0 * h);
  };

  const double h1 = fd_.step * scale, h2 = 10.0 * h1, h3 = 100.0 * h1;
  J.d1.resize(m);
  for (int i = 0; i < m; ++i) J.d1[i] = (4.0 * first(i, 0.5 * h1) - first(i, h1)) / 3.0;
  if (order >= 2) {
    J.d2.resize(m * (m + 1) / 2);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        J.d2[J.index2(i, j)] = (4.0 * second_at(u, i, j, 0.5 * h2) - second_at(u, i, j, h2)) / 3.0;
  }
  if (order >= 3) {
    J.d3.resize(m * (m + 1) * (m + 2) / 6);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j)
        for (int k = j; k < m; ++k)
          J.d3[J.index3(i, j, k)] = (4.0 * third(i, j, k, 0.5 * h3) - third(i, j, k, h3)) / 3.0;
  }
  return J;
}

double lagrangian_residual(const AmbientSpace& space, const Jet3& jet) {
  double r = 0.0;
  for (int i = 0; i < jet.m; ++i)
    for (int j = i + 1; j < jet.m; ++j) r = std::max(r, std::abs(space.omega(jet.d1[i], jet.d1[j])));
  // a Legendrian lift is isotropic exactly when it is horizontal
  if (space.c() != 0) r = std::max(r, horizontality_residual(space, jet));
  return r;
}

double lagrangian_residual(const ChartImmersion& f, const Eigen::VectorXd& u) {
  return lagrangian_residual(f.space(), f.evaluate_jet(u, 1));
}

double constraint_residual(const ChartImmersion& f, const Eigen::VectorXd& u) {
  return f.space().sphere_constraint_residual(f.value(u));
}

double horizontality_residual(const AmbientSpace& space, const Jet3& jet) {
  double r = 0.0;
  for (int i = 0; i < jet.m; ++i) r = std::max(r, space.horizontality_residual(jet.value, jet.d1[i]));
  return r;
}

double horizontality_residual(const ChartImmersion& f, const Eigen::VectorXd& u) {
  return horizontality_residual(f.space(), f.evaluate_jet(u, 1));
}

Eigen::MatrixXd induced_metric(const AmbientSpace& space, const Jet3& jet, double floor) {
  const int m = jet.m;
  Eigen::MatrixXd g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) g(i, j) = g(j, i) = space.inner(jet.d1[i], jet.d1[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues()[0], hi = es.eigenvalues()[m - 1];
  // singular values of the Jacobian are square roots of these eigenvalues
  if (!(lo > 0.0) || std::sqrt(lo) < floor * std::sqrt(hi))
    fail(ErrorCode::domain_error, "degenerate immersion: induced metric eigenvalue " + std::to_string(lo));
  return g;
}

Eigen::MatrixXd induced_metric(const ChartImmersion& f, const Eigen::VectorXd& u, double floor) {
  return induced_metric(f.space(), f.evaluate_jet(u, 1), floor);
}

ChartImmersion gradient_graph(const Polynomial& f, Box domain, std::string name) {
  const int m = f.nvars();
  require(domain.dim() == m, "graph: domain dimension must match the polynomial");
  std::vector<Polynomial> grad;
  for (int v = 0; v < m; ++v) grad.push_back(f.derivative(v));
  JetMap map = [grad, m](std::span<const Jet<double>> x) {
    std::vector<Jet<cplx>> out;
    out.reserve(m);
    for (int v = 0; v < m; ++v) out.push_back(make_complex(x[v], grad[v].evaluate(x)));
    return out;
  };
  return ChartImmersion(std::move(name), std::move(domain), AmbientSpace::complex_euclidean(m), std::move(map));
}

// The real part of a gradient graph is the identity, so the Jacobian can never
// degenerate and no coefficient shrinking is needed.
ChartImmersion random_gradient_graph(std::uint64_t seed, int m, int degree, double half_width) {
  require(m >= 2 && degree >= 2, "random graph: need m >= 2 and degree >= 2");
  Polynomial f = Polynomial::random(seed, m, degree, 1.0 / degree);
  return gradient_graph(f, Box::cube(m, half_width), "random-graph");
}

ChartImmersion polynomial_map(const std::vector<Polynomial>& re, const std::vector<Polynomial>& im, Box domain,
                              std::string name) {
  require(!re.empty() && re.size() == im.size(), "polynomial map: need matching real and imaginary parts");
  const int m = domain.dim();
  for (std::size_t k = 0; k < re.size(); ++k)
    require(re[k].nvars() == m && im[k].nvars() == m, "polynomial map: component has wrong variable count");
  JetMap map = [re, im](std::span<const Jet<double>> x) {
    std::vector<Jet<cplx>> out;
    for (std::size_t k = 0; k < re.size(); ++k) out.push_back(make_complex(re[k].evaluate(x), im[k].evaluate(x)));
    return out;
  };
  return ChartImmersion(std::move(name), std::move(domain),
                        AmbientSpace::complex_euclidean(static_cast<int>(re.size())), std::move(map));
}

ChartImmersion circle_torus(int m) {
  JetMap map = [m](std::span<const Jet<double>> x) {
    std::vector<Jet<cplx>> out;
    for (int v = 0; v < m; ++v) out.push_back(expi(x[v]));
    return out;
  };
  return ChartImmersion("circle-torus", Box::cube(m, -1.0, 1.0), AmbientSpace::complex_euclidean(m), std::move(map));
}

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

std::vector<Eigen::VectorXd> sample_points(const Box& box, int grid) {
  require(grid >= 1, "sampling: grid must be positive");
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const int m = box.dim();
  const int cols = m >= 2 ? grid : 1;
  std::vector<Eigen::VectorXd> pts;
  std::uint64_t k = 1;
  for (int a = 0; a < grid; ++a) {
    for (int b = 0; b < cols; ++b, ++k) {
      Eigen::VectorXd u(m);
      for (int d = 0; d < m; ++d) {
        double s = d == 0 ? (a + 0.5) / grid : d == 1 ? (b + 0.5) / grid : halton(k, primes[(d - 2) % 12]);
        u[d] = box.lower[d] + s * (box.upper[d] - box.lower[d]);
      }
      pts.push_back(std::move(u));
    }
  }
  return pts;
}

}  // namespace lagdelta
