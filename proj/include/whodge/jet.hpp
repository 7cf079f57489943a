#pragma once

// Truncated Taylor polynomials in two variables. Analytic test forms and
// potentials are written once as functions of Jet and every derivative the
// verifiers need is read off the coefficients.

#include <array>
#include <cmath>
#include <functional>

namespace whodge {

class Jet {
 public:
  static constexpr int kMaxOrder = 5;
  static constexpr int kSize = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

  Jet() : order_(kMaxOrder) { c_.fill(0.0); }
  Jet(double v) : Jet() { c_[0] = v; }  // NOLINT: implicit from scalar

  static Jet constant(double v, int order) {
    Jet j(v);
    j.order_ = order;
    return j;
  }
  static Jet variable(int axis, double v, int order) {
    Jet j = constant(v, order);
    if (order >= 1) j.c_[index(1 - axis, axis)] = 1.0;
    return j;
  }

  static constexpr int index(int i, int j) {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }

  int order() const { return order_; }
  double value() const { return c_[0]; }
  double coeff(int i, int j) const { return i + j <= order_ ? c_[index(i, j)] : 0.0; }
  // d^{i+j} / dx^i dy^j at the expansion point.
  double derivative(int i, int j) const { return coeff(i, j) * fact(i) * fact(j); }

  Jet diff(int axis) const {
    Jet r = constant(0.0, order_ > 0 ? order_ - 1 : 0);
    if (order_ == 0) return r;
    for (int d = 0; d < order_; ++d)
      for (int j = 0; j <= d; ++j) {
        const int i = d - j;
        r.c_[index(i, j)] = axis == 0 ? (i + 1) * c_[index(i + 1, j)] : (j + 1) * c_[index(i, j + 1)];
      }
    return r;
  }

  Jet& operator+=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet operator-() const {
    Jet r = *this;
    r *= -1.0;
    return r;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r = constant(0.0, std::min(a.order_, b.order_));
    const int ord = r.order_;
    for (int d1 = 0; d1 <= ord; ++d1)
      for (int j1 = 0; j1 <= d1; ++j1) {
        const double av = a.c_[index(d1 - j1, j1)];
        if (av == 0.0) continue;
        for (int d2 = 0; d2 + d1 <= ord; ++d2)
          for (int j2 = 0; j2 <= d2; ++j2)
            r.c_[index(d1 + d2 - j1 - j2, j1 + j2)] += av * b.c_[index(d2 - j2, j2)];
      }
    return r;
  }

  // f(g) from the derivatives f^{(k)}(g(0)), k = 0..order.
  template <class Derivs>
  friend Jet compose(const Jet& g, Derivs&& fk) {
    Jet h = g;
    h.c_[0] = 0.0;
    Jet r = constant(fk(0), g.order_);
    Jet hp = constant(1.0, g.order_);
    double kfact = 1.0;
    for (int k = 1; k <= g.order_; ++k) {
      hp = hp * h;
      kfact *= k;
      Jet t = hp;
      t *= fk(k) / kfact;
      r += t;
    }
    return r;
  }

 private:
  static constexpr double fact(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  }

  std::array<double, kSize> c_;
  int order_;
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator+(Jet a, double s) { return a += Jet::constant(s, a.order()); }
inline Jet operator+(double s, Jet a) { return a += Jet::constant(s, a.order()); }
inline Jet operator-(Jet a, double s) { return a -= Jet::constant(s, a.order()); }
inline Jet operator-(double s, const Jet& a) { return Jet::constant(s, a.order()) - a; }

inline Jet exp(const Jet& g) {
  const double e = std::exp(g.value());
  return compose(g, [e](int) { return e; });
}
inline Jet sin(const Jet& g) {
  const double s = std::sin(g.value()), c = std::cos(g.value());
  return compose(g, [s, c](int k) {
    const double v[4] = {s, c, -s, -c};
    return v[k % 4];
  });
}
inline Jet cos(const Jet& g) {
  const double s = std::sin(g.value()), c = std::cos(g.value());
  return compose(g, [s, c](int k) {
    const double v[4] = {c, -s, -c, s};
    return v[k % 4];
  });
}
// g^a for real a; requires g(0) > 0 unless a is a nonnegative integer.
inline Jet pow(const Jet& g, double a) {
  const double x = g.value();
  return compose(g, [x, a](int k) {
    double coef = 1.0;
    for (int m = 0; m < k; ++m) coef *= (a - m);
    return coef == 0.0 ? 0.0 : coef * std::pow(x, a - k);
  });
}
inline Jet log(const Jet& g) {
  const double x = g.value();
  return compose(g, [x](int k) {
    if (k == 0) return std::log(x);
    double f = 1.0;
    for (int m = 2; m < k; ++m) f *= m;
    return (k % 2 == 1 ? 1.0 : -1.0) * f / std::pow(x, k);
  });
}
inline Jet sqrt(const Jet& g) { return pow(g, 0.5); }
inline Jet operator/(const Jet& a, const Jet& b) { return a * pow(b, -1.0); }
inline Jet operator/(double s, const Jet& b) { return s * pow(b, -1.0); }
inline Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

// Scalar field on the plane; 1D domains evaluate with y fixed at 0.
using ScalarFn = std::function<Jet(const Jet& x, const Jet& y)>;

inline Jet eval_jet(const ScalarFn& f, double x, double y, int order) {
  return f(Jet::variable(0, x, order), Jet::variable(1, y, order));
}

}  // namespace whodge
