#include "mmot/numeric.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

#include "mmot/error.hpp"

namespace mmot {

std::string_view to_string(Arithmetic mode) {
  return mode == Arithmetic::Rational ? "rational" : "float";
}

Arithmetic parse_arithmetic(std::string_view text) {
  if (text == "rational") return Arithmetic::Rational;
  if (text == "float") return Arithmetic::Float;
  throw Error(Errc::Parse, "unknown arithmetic mode '" + std::string(text) + "'");
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw Error(Errc::NonRationalInput, "non-finite value");
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

Rational decimal_rational(double x) {
  if (!std::isfinite(x)) throw Error(Errc::NonRationalInput, "non-finite value");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return exact_rational(x);
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(end - buf)));
}

namespace {

mpz_class pow10(long n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(n));
  return r;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6)
      throw Error(Errc::Parse, "bad exponent in '" + std::string(text) + "'");
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty()))
      throw Error(Errc::Parse, "bad number '" + std::string(text) + "'");
    digits = std::string(whole) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    if (!all_digits(s)) throw Error(Errc::Parse, "bad number '" + std::string(text) + "'");
    digits = std::string(s);
  }
  Rational q(mpz_class(digits, 10));
  if (exponent > 0) q *= pow10(exponent);
  if (exponent < 0) q /= pow10(-exponent);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw Error(Errc::Parse, "empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string num(text.substr(0, slash));
    std::string den(text.substr(slash + 1));
    Rational q;
    try {
      q = Rational(mpz_class(num, 10), mpz_class(den, 10));
    } catch (const std::invalid_argument&) {
      throw Error(Errc::Parse, "bad rational '" + std::string(text) + "'");
    }
    if (sgn(q.get_den()) == 0) throw Error(Errc::Parse, "zero denominator in '" + std::string(text) + "'");
    q.canonicalize();
    return q;
  }
  return parse_decimal(text);
}

std::string format_rational(const Rational& q) { return canonical(q).get_str(); }

}  // namespace mmot
