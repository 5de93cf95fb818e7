#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "vslab/errors.hpp"

namespace vslab {

// Exact rational arithmetic. Distribution masses, region masses, error rates,
// LP tableaus and the zc/sup-zc certificates all use this type so that the
// exact-equality acceptance checks are meaningful (no float drift).
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Parses a decimal ("0.25", "1e-3", "3") or fraction ("33/64") literal into
// an exact rational. Decimal inputs are exact: 0.2 becomes 1/5, not the
// nearest double.
Rational parse_rational(const std::string& text);

// Shortest round-trip decimal formatting for doubles; used everywhere we
// serialize measured quantities, so outputs are byte-stable across runs and
// worker counts.
std::string format_double(double v);

// "p/q" (or "p" when q == 1); exact, locale-independent.
std::string format_rational(const Rational& q);

} // namespace vslab
