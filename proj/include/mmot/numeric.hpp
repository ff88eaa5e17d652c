#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>

namespace mmot {

using Rational = mpq_class;

/// Instance-level arithmetic switch. Rational is exact (GMP); Float is IEEE double.
enum class Arithmetic { Rational, Float };

std::string_view to_string(Arithmetic mode);
Arithmetic parse_arithmetic(std::string_view text);

/// Tolerances used by every float-mode comparison. Rational mode compares exactly.
struct Tolerance {
  static constexpr double kFeasibility = 1e-9;
  static constexpr double kPivot = 1e-10;
  static constexpr double kSupport = 1e-12;
  static constexpr double kMarginalSum = 1e-12;
  static constexpr double kMarginalPoint = 1e-9;
  static constexpr double kImprovement = 1e-9;
};

template <class T>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

template <class T>
T from_rational(const Rational& q);
template <>
inline Rational from_rational<Rational>(const Rational& q) {
  return q;
}
template <>
inline double from_rational<double>(const Rational& q) {
  return q.get_d();
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

/// Exact binary value of a double.
Rational exact_rational(double x);

/// Shortest decimal that round-trips to x, read back as a rational (0.1 -> 1/10).
Rational decimal_rational(double x);

/// Accepts "p/q", "p", and decimal/scientific notation ("0.25", "1e-3").
Rational parse_rational(std::string_view text);

/// q in lowest terms. Two-argument mpq_class construction does not reduce.
inline Rational canonical(Rational q) {
  q.canonicalize();
  return q;
}

/// Canonical "p/q" form ("p" when the denominator is 1).
std::string format_rational(const Rational& q);

// a <= b, with absolute slack `tol` in float mode.
inline bool leq(const Rational& a, const Rational& b, double /*tol*/) { return a <= b; }
inline bool leq(double a, double b, double tol) { return a <= b + tol; }

inline bool near(const Rational& a, const Rational& b, double /*tol*/) { return a == b; }
inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// a < b strictly, by more than `margin` in float mode.
inline bool strictly_less(const Rational& a, const Rational& b, double /*margin*/) { return a < b; }
inline bool strictly_less(double a, double b, double margin) { return a < b - margin; }

inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline bool is_zero(double x, double tol = 0.0) { return std::abs(x) <= tol; }

}  // namespace mmot
