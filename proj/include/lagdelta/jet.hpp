#pragma once

// Truncated multivariate Taylor jets. Coefficients are stored as Taylor
// coefficients, so the partial derivative of multi-index alpha is alpha! * c_alpha.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lagdelta/error.hpp"

namespace lagdelta {

using cplx = std::complex<double>;

inline constexpr int kMaxJetOrder = 3;
inline constexpr int kMaxJetVars = 12;

class JetLayout {
 public:
  struct Product {
    int a, b, c;
  };
  struct Shift {
    int from;  // index of alpha + e_j in this layout
    int to;    // index of alpha in the lowered layout
    double factor;
  };

  static const JetLayout& get(int nvars, int order) {
    require(nvars >= 1 && nvars <= kMaxJetVars, "jet: unsupported variable count");
    require(order >= 0 && order <= kMaxJetOrder, "jet: unsupported order");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{nvars, order}];
    if (!slot) slot.reset(new JetLayout(nvars, order));
    return *slot;
  }

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(degree_.size()); }
  int degree(int idx) const { return degree_[idx]; }
  int degree_begin(int d) const { return degree_begin_[d]; }
  std::span<const std::uint8_t> exponents(int idx) const {
    return {exps_.data() + static_cast<std::size_t>(idx) * nvars_, static_cast<std::size_t>(nvars_)};
  }
  double factorial_weight(int idx) const { return weight_[idx]; }
  int variable_index(int var) const { return order_ >= 1 ? 1 + var : -1; }

  // -1 when the multi-index exceeds the truncation order
  int index(std::span<const int> alpha) const {
    if (static_cast<int>(alpha.size()) != nvars_) return -1;
    int deg = 0;
    std::uint64_t key = 0;
    for (int v = 0; v < nvars_; ++v) {
      if (alpha[v] < 0) return -1;
      deg += alpha[v];
      key = key * (order_ + 1) + static_cast<std::uint64_t>(std::min(alpha[v], order_));
    }
    if (deg > order_) return -1;
    auto it = lookup_.find(key);
    return it == lookup_.end() ? -1 : it->second;
  }

  const std::vector<Product>& products() const { return products_; }
  const std::vector<Shift>& partial_table(int var) const { return shifts_[var]; }

 private:
  JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
    std::vector<int> alpha(nvars, 0);
    for (int d = 0; d <= order; ++d) {
      degree_begin_.push_back(size());
      enumerate(alpha, 0, d);
    }
    degree_begin_.push_back(size());
    for (int i = 0; i < size(); ++i) {
      std::uint64_t key = 0;
      double w = 1.0;
      for (int v = 0; v < nvars; ++v) {
        key = key * (order + 1) + exponents(i)[v];
        w *= std::tgamma(exponents(i)[v] + 1.0);
      }
      lookup_[key] = i;
      weight_.push_back(w);
    }
    std::vector<int> sum(nvars);
    for (int a = 0; a < size(); ++a) {
      for (int b = 0; b < size(); ++b) {
        if (degree_[a] + degree_[b] > order) continue;
        for (int v = 0; v < nvars; ++v) sum[v] = exponents(a)[v] + exponents(b)[v];
        products_.push_back({a, b, index(sum)});
      }
    }
    shifts_.resize(nvars);
    for (int v = 0; v < nvars; ++v) {
      for (int i = 0; i < size(); ++i) {
        if (degree_[i] >= order) continue;
        for (int u = 0; u < nvars; ++u) sum[u] = exponents(i)[u];
        sum[v] += 1;
        shifts_[v].push_back({index(sum), i, static_cast<double>(sum[v])});
      }
    }
  }

  void enumerate(std::vector<int>& alpha, int var, int remaining) {
    if (var == nvars_ - 1) {
      alpha[var] = remaining;
      for (int v = 0; v < nvars_; ++v) exps_.push_back(static_cast<std::uint8_t>(alpha[v]));
      int deg = 0;
      for (int v = 0; v < nvars_; ++v) deg += alpha[v];
      degree_.push_back(deg);
      alpha[var] = 0;
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      alpha[var] = k;
      enumerate(alpha, var + 1, remaining - k);
    }
    alpha[var] = 0;
  }

  int nvars_;
  int order_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<int> degree_begin_;
  std::vector<double> weight_;
  std::unordered_map<std::uint64_t, int> lookup_;
  std::vector<Product> products_;
  std::vector<std::vector<Shift>> shifts_;
};

template <class T>
class Jet {
 public:
  using value_type = T;

  Jet() = default;
  explicit Jet(const JetLayout& layout, T constant = T{}) : layout_(&layout), c_(layout.size(), T{}) {
    c_[0] = constant;
  }
  template <class U>
    requires(!std::is_same_v<U, T> && std::is_convertible_v<U, T>)
  Jet(const Jet<U>& other) : layout_(&other.layout()), c_(other.coefficients().begin(), other.coefficients().end()) {}

  static Jet variable(const JetLayout& layout, int var, double value) {
    Jet j(layout, T(value));
    if (layout.order() >= 1) j.c_[layout.variable_index(var)] = T(1);
    return j;
  }

  // identity jets for all variables, anchored at the given point
  template <class Vec>
  static std::vector<Jet> variables(const JetLayout& layout, const Vec& point) {
    std::vector<Jet> out;
    out.reserve(layout.nvars());
    for (int v = 0; v < layout.nvars(); ++v) out.push_back(variable(layout, v, point[v]));
    return out;
  }

  // builds f with f(anchor) = value and grad f = grads (each one order lower)
  static Jet from_gradient(const JetLayout& layout, T value, std::span<const Jet> grads) {
    require(static_cast<int>(grads.size()) == layout.nvars(), "jet: gradient size mismatch");
    Jet f(layout, value);
    std::vector<int> beta(layout.nvars());
    for (int i = 1; i < layout.size(); ++i) {
      auto alpha = layout.exponents(i);
      int j = 0;
      while (alpha[j] == 0) ++j;
      for (int v = 0; v < layout.nvars(); ++v) beta[v] = alpha[v];
      beta[j] -= 1;
      const Jet& g = grads[j];
      require(g.order() >= layout.order() - 1, "jet: gradient order too low");
      f.c_[i] = g.coefficient(g.layout().index(beta)) / static_cast<double>(alpha[j]);
    }
    return f;
  }

  const JetLayout& layout() const { return *layout_; }
  int order() const { return layout_->order(); }
  int nvars() const { return layout_->nvars(); }
  const std::vector<T>& coefficients() const { return c_; }
  std::vector<T>& coefficients() { return c_; }
  T value() const { return c_[0]; }
  T coefficient(int idx) const { return idx >= 0 && idx < static_cast<int>(c_.size()) ? c_[idx] : T{}; }
  T& operator[](int idx) { return c_[idx]; }
  const T& operator[](int idx) const { return c_[idx]; }

  T derivative(std::span<const int> alpha) const {
    int idx = layout_->index(alpha);
    if (idx < 0) return T{};
    return c_[idx] * layout_->factorial_weight(idx);
  }
  T first(int var) const { return order() >= 1 ? c_[layout_->variable_index(var)] : T{}; }
  T second(int a, int b) const {
    int alpha[kMaxJetVars] = {};
    alpha[a] += 1;
    alpha[b] += 1;
    return derivative(std::span<const int>(alpha, nvars()));
  }
  T third(int a, int b, int c) const {
    int alpha[kMaxJetVars] = {};
    alpha[a] += 1;
    alpha[b] += 1;
    alpha[c] += 1;
    return derivative(std::span<const int>(alpha, nvars()));
  }

  Jet partial(int var) const {
    require(order() >= 1, "jet: cannot differentiate an order-0 jet");
    const JetLayout& lower = JetLayout::get(nvars(), order() - 1);
    Jet out(lower);
    for (const auto& s : layout_->partial_table(var)) out.c_[s.to] = c_[s.from] * s.factor;
    return out;
  }

  Jet truncated(int new_order) const {
    if (new_order >= order()) return *this;
    Jet out(JetLayout::get(nvars(), new_order));
    for (int i = 0; i < out.layout().size(); ++i) out.c_[i] = c_[i];
    return out;
  }

  Jet& operator+=(const Jet& o) {
    align(o);
    for (int i = 0; i < layout_->size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    align(o);
    for (int i = 0; i < layout_->size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(T s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  Jet operator-() const {
    Jet out = *this;
    for (auto& x : out.c_) x = -x;
    return out;
  }

 private:
  // operations between jets of different order truncate to the lower one
  void align(const Jet& o) {
    require(o.nvars() == nvars(), "jet: variable count mismatch");
    if (o.order() < order()) *this = truncated(o.order());
    // callers index only up to this->size(), which is <= o.size() now
  }

  const JetLayout* layout_ = nullptr;
  std::vector<T> c_;
};

namespace detail {
template <class S>
using scalar_t = std::conditional_t<std::is_arithmetic_v<S>, double, S>;
template <class S>
inline constexpr bool is_scalar_v = std::is_arithmetic_v<S> || std::is_same_v<S, cplx>;
template <class A, class B>
using mix_t = decltype(std::declval<A>() * std::declval<B>());

template <class A, class B>
const JetLayout& common_layout(const Jet<A>& a, const Jet<B>& b) {
  require(a.nvars() == b.nvars(), "jet: variable count mismatch");
  return a.order() <= b.order() ? a.layout() : b.layout();
}
}  // namespace detail

template <class A, class B>
Jet<detail::mix_t<A, B>> operator+(const Jet<A>& a, const Jet<B>& b) {
  const JetLayout& L = detail::common_layout(a, b);
  Jet<detail::mix_t<A, B>> out(L);
  for (int i = 0; i < L.size(); ++i) out[i] = a[i] + b[i];
  return out;
}
template <class A, class B>
Jet<detail::mix_t<A, B>> operator-(const Jet<A>& a, const Jet<B>& b) {
  const JetLayout& L = detail::common_layout(a, b);
  Jet<detail::mix_t<A, B>> out(L);
  for (int i = 0; i < L.size(); ++i) out[i] = a[i] - b[i];
  return out;
}
template <class A, class B>
Jet<detail::mix_t<A, B>> operator*(const Jet<A>& a, const Jet<B>& b) {
  const JetLayout& L = detail::common_layout(a, b);
  Jet<detail::mix_t<A, B>> out(L);
  for (const auto& p : L.products()) out[p.c] += a[p.a] * b[p.b];
  return out;
}

template <class A, class S>
  requires detail::is_scalar_v<S>
Jet<detail::mix_t<A, detail::scalar_t<S>>> operator*(const Jet<A>& a, S s) {
  using R = detail::mix_t<A, detail::scalar_t<S>>;
  Jet<R> out(a.layout());
  const detail::scalar_t<S> k = s;
  for (int i = 0; i < a.layout().size(); ++i) out[i] = a[i] * k;
  return out;
}
template <class A, class S>
  requires detail::is_scalar_v<S>
auto operator*(S s, const Jet<A>& a) {
  return a * s;
}
template <class A, class S>
  requires detail::is_scalar_v<S>
auto operator/(const Jet<A>& a, S s) {
  return a * (detail::scalar_t<S>(1.0) / detail::scalar_t<S>(s));
}
template <class A, class S>
  requires detail::is_scalar_v<S>
Jet<detail::mix_t<A, detail::scalar_t<S>>> operator+(const Jet<A>& a, S s) {
  Jet<detail::mix_t<A, detail::scalar_t<S>>> out(a);
  out[0] += detail::scalar_t<S>(s);
  return out;
}
template <class A, class S>
  requires detail::is_scalar_v<S>
auto operator+(S s, const Jet<A>& a) {
  return a + s;
}
template <class A, class S>
  requires detail::is_scalar_v<S>
auto operator-(const Jet<A>& a, S s) {
  return a + (-detail::scalar_t<S>(s));
}
template <class A, class S>
  requires detail::is_scalar_v<S>
auto operator-(S s, const Jet<A>& a) {
  return (-a) + s;
}

// f(a) from f and its first three derivatives at a.value()
template <class T>
Jet<T> compose(const Jet<T>& a, const std::array<T, 4>& d) {
  Jet<T> delta = a;
  delta[0] = T{};
  Jet<T> out(a.layout(), d[0]);
  Jet<T> power = delta;
  double fact = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    fact *= k;
    out += power * (d[k] / fact);
    if (k < a.order()) power = power * delta;
  }
  return out;
}

template <class T>
Jet<T> exp(const Jet<T>& a) {
  T e = std::exp(a.value());
  return compose(a, {e, e, e, e});
}
template <class T>
Jet<T> log(const Jet<T>& a) {
  T x = a.value();
  if constexpr (std::is_same_v<T, double>) {
    if (!(x > 0.0)) fail(ErrorCode::domain_error, "jet log: non-positive argument");
  }
  return compose(a, {std::log(x), T(1) / x, T(-1) / (x * x), T(2) / (x * x * x)});
}
template <class T>
Jet<T> pow(const Jet<T>& a, double p) {
  T x = a.value();
  T v = std::pow(x, p);
  return compose(a, {v, p * v / x, p * (p - 1) * v / (x * x), p * (p - 1) * (p - 2) * v / (x * x * x)});
}
template <class T>
Jet<T> sqrt(const Jet<T>& a) {
  if constexpr (std::is_same_v<T, double>) {
    if (!(a.value() > 0.0)) fail(ErrorCode::domain_error, "jet sqrt: non-positive argument");
  }
  return pow(a, 0.5);
}
template <class T>
Jet<T> reciprocal(const Jet<T>& a) {
  T x = a.value();
  if (std::abs(x) == 0.0) fail(ErrorCode::domain_error, "jet reciprocal: zero value");
  T r = T(1) / x;
  return compose(a, {r, -r * r, T(2) * r * r * r, T(-6) * r * r * r * r});
}
template <class A, class B>
auto operator/(const Jet<A>& a, const Jet<B>& b) {
  return a * reciprocal(b);
}
template <class A, class S>
  requires detail::is_scalar_v<S>
auto operator/(S s, const Jet<A>& a) {
  return reciprocal(a) * s;
}
template <class T>
Jet<T> sin(const Jet<T>& a) {
  T s = std::sin(a.value()), c = std::cos(a.value());
  return compose(a, {s, c, -s, -c});
}
template <class T>
Jet<T> cos(const Jet<T>& a) {
  T s = std::sin(a.value()), c = std::cos(a.value());
  return compose(a, {c, -s, -c, s});
}
template <class T>
Jet<T> sinh(const Jet<T>& a) {
  T s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose(a, {s, c, s, c});
}
template <class T>
Jet<T> cosh(const Jet<T>& a) {
  T s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose(a, {c, s, c, s});
}
template <class T>
Jet<T> tanh(const Jet<T>& a) {
  T t = std::tanh(a.value());
  T u = T(1) - t * t;
  return compose(a, {t, u, T(-2) * t * u, u * (T(6) * t * t - T(2))});
}
template <class T>
Jet<T> atan(const Jet<T>& a) {
  T x = a.value();
  T q = T(1) / (T(1) + x * x);
  return compose(a, {std::atan(x), q, T(-2) * x * q * q, (T(6) * x * x - T(2)) * q * q * q});
}
template <class T>
Jet<T> square(const Jet<T>& a) {
  return a * a;
}

inline Jet<double> real(const Jet<cplx>& z) {
  Jet<double> out(z.layout());
  for (int i = 0; i < z.layout().size(); ++i) out[i] = z[i].real();
  return out;
}
inline Jet<double> imag(const Jet<cplx>& z) {
  Jet<double> out(z.layout());
  for (int i = 0; i < z.layout().size(); ++i) out[i] = z[i].imag();
  return out;
}
inline Jet<cplx> conj(const Jet<cplx>& z) {
  Jet<cplx> out(z.layout());
  for (int i = 0; i < z.layout().size(); ++i) out[i] = std::conj(z[i]);
  return out;
}
inline Jet<cplx> make_complex(const Jet<double>& re, const Jet<double>& im) {
  return Jet<cplx>(re) + im * cplx(0.0, 1.0);
}
// e^{i theta} for a real jet theta
inline Jet<cplx> expi(const Jet<double>& theta) {
  return make_complex(cos(theta), sin(theta));
}

}  // namespace lagdelta
