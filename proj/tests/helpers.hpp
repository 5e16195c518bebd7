#pragma once

#include <random>

#include "qwall/cohring.hpp"

namespace qwall::testing {

inline std::mt19937_64 rng(unsigned seed = 20240915u) { return std::mt19937_64(seed); }

inline Int rand_int(std::mt19937_64& g, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return Int(d(g));
}

inline Rat rand_rat(std::mt19937_64& g, int lo = -9, int hi = 9, int max_den = 6) {
    std::uniform_int_distribution<int> num(lo, hi), den(1, max_den);
    return Rat(num(g), den(g));
}

inline ChernVector rand_chern_int(std::mt19937_64& g, const SurfaceModel& s, int lo = -9, int hi = 9) {
    RatVec c1 = s.zero_class();
    for (auto& x : c1) x = Rat(rand_int(g, lo, hi));
    return ChernVector(Rat(rand_int(g, lo, hi)), std::move(c1), Rat(rand_int(g, lo, hi)));
}

inline ChernVector rand_chern_rat(std::mt19937_64& g, const SurfaceModel& s) {
    RatVec c1 = s.zero_class();
    for (auto& x : c1) x = rand_rat(g);
    return ChernVector(rand_rat(g), std::move(c1), rand_rat(g));
}

} // namespace qwall::testing
