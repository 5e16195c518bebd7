#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "qwall/errors.hpp"

namespace qwall {

using Int = boost::multiprecision::cpp_int;
// cpp_rational keeps gcd(p,q)=1 and q>0 canonically.
using Rat = boost::multiprecision::cpp_rational;

// Parses "p", "-p" or "p/q". Anything else (in particular any float
// syntax) is an input_error; numeric input is exact by contract.
inline Rat parse_rat(std::string_view s) {
    auto bad = [&] { throw input_error("not an exact rational: '" + std::string(s) + "'"); };
    if (s.empty()) bad();
    std::size_t slash = s.find('/');
    auto parse_int = [&](std::string_view t) -> Int {
        if (t.empty()) bad();
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) bad();
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') bad();
        return Int(std::string(t));
    };
    if (slash == std::string_view::npos) return Rat(parse_int(s));
    Int num = parse_int(s.substr(0, slash));
    Int den = parse_int(s.substr(slash + 1));
    if (den == 0) throw input_error("zero denominator: '" + std::string(s) + "'");
    return Rat(num, den);
}

// Canonical form: "p" for integers, "p/q" with q > 1 otherwise.
inline std::string rat_str(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Int rat_floor(const Rat& r) {
    Int q = numerator(r) / denominator(r);
    if (numerator(r) < 0 && q * denominator(r) != numerator(r)) --q;
    return q;
}

inline Int rat_ceil(const Rat& r) { return -rat_floor(-r); }

inline bool is_integer(const Rat& r) { return denominator(r) == 1; }

} // namespace qwall
