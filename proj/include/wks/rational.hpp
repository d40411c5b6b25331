#pragma once

// Exact rational arithmetic used wherever the comparison targets must be
// computed without rounding (harmonic numbers, expected call counts, the
// beta selection formula).

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wks {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Smallest integer >= q.
inline BigInt ceil_rational(const Rational& q) {
    BigInt num = boost::multiprecision::numerator(q);
    BigInt den = boost::multiprecision::denominator(q);  // always > 0
    BigInt quot = num / den;                             // truncates toward zero
    if (num > 0 && quot * den != num) {
        ++quot;
    }
    return quot;
}

inline std::int64_t to_int64(const BigInt& v, const std::string& what) {
    if (v < std::numeric_limits<std::int64_t>::min() ||
        v > std::numeric_limits<std::int64_t>::max()) {
        throw std::range_error(what + " does not fit in 64 bits: " + v.str());
    }
    return v.convert_to<std::int64_t>();
}

inline double to_double(const Rational& q) {
    return q.convert_to<double>();
}

// Accepts "p/q", a plain integer, or a decimal like "0.125".
inline Rational parse_rational(std::string_view text) {
    const std::string s(text);
    auto bad = [&] { return std::invalid_argument("not a rational: '" + s + "'"); };
    if (s.empty()) throw bad();
    try {
        if (auto slash = s.find('/'); slash != std::string::npos) {
            BigInt num(s.substr(0, slash));
            BigInt den(s.substr(slash + 1));
            if (den == 0) throw bad();
            return Rational(num, den);
        }
        if (auto dot = s.find('.'); dot != std::string::npos) {
            const std::string whole = s.substr(0, dot);
            const std::string frac = s.substr(dot + 1);
            if (frac.empty()) return Rational(BigInt(whole));
            BigInt scale = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
            BigInt num = BigInt(whole.empty() || whole == "-" ? whole + "0" : whole) * scale;
            BigInt frac_num(frac);
            num += (num < 0 || whole[0] == '-') ? -frac_num : frac_num;
            return Rational(num, scale);
        }
        return Rational(BigInt(s));
    } catch (const std::runtime_error&) {
        throw bad();
    }
}

inline std::string rational_to_string(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace wks
