#include "vslab/rational.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace vslab {

namespace {

BigInt pow10(long long e) {
    BigInt r = 1;
    for (long long i = 0; i < e; ++i) r *= 10;
    return r;
}

// Strict [+-]digits integer parse. cpp_int's own string constructor reads
// leading zeros as an octal prefix, so normalize first.
BigInt parse_bigint(const std::string& t) {
    std::size_t i = 0;
    bool neg = false;
    if (i < t.size() && (t[i] == '+' || t[i] == '-')) neg = (t[i++] == '-');
    if (i >= t.size()) throw ParameterError("parse_rational: malformed integer '" + t + "'");
    for (std::size_t k = i; k < t.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(t[k])))
            throw ParameterError("parse_rational: malformed integer '" + t + "'");
    std::size_t nz = t.find_first_not_of('0', i);
    BigInt v(nz == std::string::npos ? std::string("0") : t.substr(nz));
    return neg ? BigInt(-v) : v;
}

} // namespace

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw ParameterError("parse_rational: empty literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (num.empty() || den.empty())
            throw ParameterError("parse_rational: malformed fraction '" + text + "'");
        BigInt n = parse_bigint(num), d = parse_bigint(den);
        if (d == 0) throw ParameterError("parse_rational: zero denominator in '" + text + "'");
        return Rational(n, d);
    }

    // Decimal with optional exponent: [+-]ddd[.ddd][e[+-]dd]
    bool neg = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') neg = (s[i++] == '-');
    std::string digits;
    long long frac_digits = 0, exponent = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size(); ++i) {
        char ch = s[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits.push_back(ch);
            seen_digit = true;
            if (seen_dot) ++frac_digits;
        } else if (ch == '.' && !seen_dot) {
            seen_dot = true;
        } else if ((ch == 'e' || ch == 'E') && seen_digit) {
            const char* b = s.data() + i + 1;
            const char* e = s.data() + s.size();
            auto [p, ec] = std::from_chars(b, e, exponent);
            if (ec != std::errc() || p != e)
                throw ParameterError("parse_rational: malformed exponent in '" + text + "'");
            break;
        } else {
            throw ParameterError("parse_rational: malformed literal '" + text + "'");
        }
    }
    if (!seen_digit) throw ParameterError("parse_rational: malformed literal '" + text + "'");

    BigInt mantissa = parse_bigint(digits);
    if (neg) mantissa = -mantissa;
    const long long net = exponent - frac_digits;
    if (net >= 0) return Rational(mantissa * pow10(net), 1);
    return Rational(mantissa, pow10(-net));
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

std::string format_rational(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

} // namespace vslab
