#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace xworld {

/// Exact probability value. Every probability in the library is one of these.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", "p" or a decimal-free integer string. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Lowest-terms "p/q" rendering; the denominator is always present ("1/1", "0/1").
std::string to_string(const Rational& r);

/// Decimal approximation for display only.
double to_double(const Rational& r);

}  // namespace xworld
