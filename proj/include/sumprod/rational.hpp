#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace sumprod {

/// Exact densities and thresholds (edge fractions, δ/4 cutoffs).
using Rational = boost::rational<std::int64_t>;

/// Accepts "p/q", an integer, or a finite decimal such as "0.3".
Rational parse_rational(const std::string& text);

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string to_string(const Rational& r);

/// count > r * scale, evaluated exactly.
inline bool exceeds(std::int64_t count, const Rational& r, std::int64_t scale) {
    return static_cast<__int128>(count) * r.denominator() >
           static_cast<__int128>(r.numerator()) * scale;
}

/// count <= r * scale, evaluated exactly.
inline bool at_most(std::int64_t count, const Rational& r, std::int64_t scale) {
    return !exceeds(count, r, scale);
}

}  // namespace sumprod
