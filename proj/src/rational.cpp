#include "xworld/rational.hpp"

#include <stdexcept>

namespace xworld {

namespace {

boost::multiprecision::cpp_int parse_integer(std::string_view digits, std::string_view whole) {
    if (digits.empty())
        throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    std::size_t start = (digits.front() == '-' || digits.front() == '+') ? 1 : 0;
    if (start == digits.size())
        throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    for (std::size_t i = start; i < digits.size(); ++i) {
        if (digits[i] < '0' || digits[i] > '9')
            throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    }
    if (digits.front() == '+') digits.remove_prefix(1);
    return boost::multiprecision::cpp_int(std::string(digits));
}

}  // namespace

Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
    auto num = parse_integer(text.substr(0, slash), text);
    auto den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
}

std::string to_string(const Rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r) {
    return r.convert_to<double>();
}

}  // namespace xworld
