#pragma once
// First-order forward-mode dual number: value plus one directional derivative.

#include <cmath>

namespace symlab {

struct Jet {
  double v = 0.0;
  double d = 0.0;

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  constexpr Jet(double value, double deriv) : v(value), d(deriv) {}
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d}; }
inline Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d - b.d}; }
inline Jet operator-(Jet a) { return {-a.v, -a.d}; }
inline Jet operator*(Jet a, Jet b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Jet operator/(Jet a, Jet b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
inline Jet& operator+=(Jet& a, Jet b) { return a = a + b; }
inline Jet& operator-=(Jet& a, Jet b) { return a = a - b; }
inline Jet& operator*=(Jet& a, Jet b) { return a = a * b; }
inline Jet sqrt(Jet a) {
  const double s = std::sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}

inline double value_of(double x) { return x; }
inline double value_of(Jet x) { return x.v; }
inline double deriv_of(double) { return 0.0; }
inline double deriv_of(Jet x) { return x.d; }

}  // namespace symlab
