#include "thermo/rational.hpp"

#include <cmath>

#include "thermo/error.hpp"

namespace thermo {

namespace mp = boost::multiprecision;

namespace {

mp::cpp_int parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) throw Error(ErrorKind::InvalidInput, "bad rational '" + std::string(whole) + "'");
  std::size_t k = 0;
  if (text[0] == '-' || text[0] == '+') k = 1;
  if (k == text.size()) throw Error(ErrorKind::InvalidInput, "bad rational '" + std::string(whole) + "'");
  for (std::size_t i = k; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') {
      throw Error(ErrorKind::InvalidInput, "bad rational '" + std::string(whole) + "'");
    }
  }
  return mp::cpp_int(std::string(text));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const mp::cpp_int num = parse_integer(text.substr(0, slash), text);
    const mp::cpp_int den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw Error(ErrorKind::InvalidInput, "zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view integral = text.substr(0, dot);
    const std::string_view fraction = text.substr(dot + 1);
    const bool negative = !integral.empty() && integral[0] == '-';
    std::string digits(integral);
    if (digits.empty() || digits == "-" || digits == "+") digits += "0";
    const mp::cpp_int head = parse_integer(digits, text);
    if (fraction.empty()) return Rational(head);
    const mp::cpp_int tail = parse_integer(fraction, text);
    if (fraction[0] == '-' || fraction[0] == '+') {
      throw Error(ErrorKind::InvalidInput, "bad rational '" + std::string(text) + "'");
    }
    const mp::cpp_int scale = mp::pow(mp::cpp_int(10), static_cast<unsigned>(fraction.size()));
    Rational frac(tail, scale);
    return negative ? Rational(head) - frac : Rational(head) + frac;
  }
  return Rational(parse_integer(text, text));
}

std::string to_string(const Rational& value) {
  const mp::cpp_int num = mp::numerator(value);
  const mp::cpp_int den = mp::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational exact_rational(double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::InvalidInput, "non-finite value");
  int exponent = 0;
  const double mantissa = std::frexp(value, &exponent);
  // mantissa * 2^53 is an exact integer.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  Rational out{mp::cpp_int(scaled)};
  exponent -= 53;
  if (exponent > 0) {
    out *= Rational(mp::pow(mp::cpp_int(2), static_cast<unsigned>(exponent)));
  } else if (exponent < 0) {
    out /= Rational(mp::pow(mp::cpp_int(2), static_cast<unsigned>(-exponent)));
  }
  return out;
}

Rational floor(const Rational& value) {
  const mp::cpp_int num = mp::numerator(value);
  const mp::cpp_int den = mp::denominator(value);
  mp::cpp_int q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) q -= 1;
  return Rational(q);
}

Rational ceil(const Rational& value) { return -floor(-value); }

}  // namespace thermo
