#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace thermo {

/// Exact rational scalar. Expression templates are off so the type behaves as a
/// plain value inside Eigen matrices.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

/// Parses "p/q", an integer, or a finite decimal such as "0.125". Throws Error(InvalidInput).
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// The exact value of a finite double.
Rational exact_rational(double value);

Rational floor(const Rational& value);
Rational ceil(const Rational& value);

}  // namespace thermo
