#pragma once

// Equivariant residues of the distinguished fixed loci for punctual
// Hilbert schemes of a del Pezzo surface in classes beta = (0, m): the
// torus weights of the deformation/obstruction spaces, their Euler-class
// ratio over Q[c1]/(c1^3), and the assembled I-function.

#include <array>
#include <map>
#include <vector>

#include "qwall/errors.hpp"
#include "qwall/rational.hpp"
#include "qwall/series.hpp"
#include "qwall/surface.hpp"

namespace qwall {

// Q[c1]/(c1^3): coefficients of 1, c1, c1^2.
using CPoly = std::array<Rat, 3>;

inline CPoly cpoly_mul(const CPoly& a, const CPoly& b) {
    CPoly out{Rat(0), Rat(0), Rat(0)};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j + i < 3; ++j) out[i + j] += a[i] * b[j];
    return out;
}

// Pushforward to a point of the c1^2 part: coefficient times c1(S)^2.
inline Rat integrate_c1sq(const CPoly& p, const SurfaceModel& s) {
    return p[2] * s.pair(s.c1S, s.c1S);
}

// Laurent polynomial in z with CPoly coefficients.
using ZPoly = std::map<long, CPoly>;

inline ZPoly zpoly_mul(const ZPoly& a, const ZPoly& b) {
    ZPoly out;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            CPoly prod = cpoly_mul(ca, cb);
            auto [it, fresh] = out.emplace(ka + kb, prod);
            if (!fresh)
                for (int i = 0; i < 3; ++i) it->second[i] += prod[i];
        }
    return out;
}

struct Weight {
    long z_multiple;
    CPoly shift; // element of Q[c1]/(c1^3)
};

using WeightList = std::vector<Weight>;

// Deformation weights of the length-m punctual tail: z, 2z, ..., mz.
inline WeightList def_weights(long m) {
    if (m <= 0) throw input_error("def_weights: m must be positive");
    WeightList w;
    for (long j = 1; j <= m; ++j) w.push_back({j, {Rat(0), Rat(0), Rat(0)}});
    return w;
}

// Obstruction weights: (-m+1)z, ..., -z, 0, each twisted by +c1.
inline WeightList obs_weights(long m) {
    if (m <= 0) throw input_error("obs_weights: m must be positive");
    WeightList w;
    for (long j = m - 1; j >= 0; --j) w.push_back({-j, {Rat(0), Rat(1), Rat(0)}});
    return w;
}

// Euler-class ratio of the obstruction and deformation weights,
// prod_{j=0}^{m-1} (-jz + c1) / prod_{j=1}^{m} (jz), expanded over
// Q[c1]/(c1^3). Supported in z-powers -m..-1.
inline ZPoly euler_ratio(long m, const SurfaceModel&) {
    ZPoly num{{0, CPoly{Rat(1), Rat(0), Rat(0)}}};
    for (const auto& w : obs_weights(m)) {
        ZPoly factor;
        if (w.z_multiple != 0) factor[1] = CPoly{Rat(w.z_multiple), Rat(0), Rat(0)};
        factor[0] = w.shift;
        num = zpoly_mul(num, factor);
    }
    Rat denom = 1;
    long denom_z = 0;
    for (const auto& w : def_weights(m)) {
        denom *= w.z_multiple;
        ++denom_z;
    }
    ZPoly out;
    for (const auto& [k, c] : num) {
        CPoly scaled;
        bool nonzero = false;
        for (int i = 0; i < 3; ++i) {
            scaled[i] = c[i] / denom;
            nonzero |= scaled[i] != 0;
        }
        if (nonzero) out.emplace(k - denom_z, scaled);
    }
    return out;
}

namespace detail {

// q^0-only I-series over the labels {1, <divisor>, c1sq}; the q^gamma
// classes with gamma != 0 never contribute for del Pezzo targets (no
// effective gamma has gamma . c1(S) = 1, and dimensions rule the rest
// out), so the series is purely a y-series.
//
// Normalization: I = 1 + sum_m y^m * euler_ratio(m), with no extra -z
// prefactor on the residue classes. This is the single place the sign
// convention is fixed; it is the one under which I_0 = 1 and
// I_1 = log(1+y) . c1 hold exactly, with the z^(<= -2) tail carrying
// only c1^2 coefficients.
inline NovikovSeries assemble_sharp(const std::string& divisor_label, long y_order,
                                    const SurfaceModel& s) {
    if (!s.del_pezzo)
        throw input_error("perverse I-function computed only for del Pezzo presets");
    NovikovSeries I = NovikovSeries::scalar_in_y(y_order);
    I.add(I.zero_key(), ZLaurent::unit());
    for (long m = 1; m <= y_order; ++m) {
        ZLaurent term;
        for (const auto& [zpow, c] : euler_ratio(m, s)) {
            LinComb lin;
            lin.add("1", c[0]);
            lin.add(divisor_label, c[1]);
            lin.add("c1sq", c[2]);
            term.add(zpow, lin);
        }
        I.add(NovKey{{}, m}, term);
    }
    return I;
}

} // namespace detail

// I^sharp for n = 1; the divisor class is c1(S) itself.
inline NovikovSeries I_sharp_n1(const SurfaceModel& s, long y_order) {
    return detail::assemble_sharp("c1", y_order, s);
}

// I^sharp for S^[n]: the n-1 extra fixed points each contribute 1, so the
// series lifts verbatim with the divisor label c1(S)_n.
inline NovikovSeries I_sharp_hilbn(long n, const SurfaceModel& s, long y_order) {
    if (n < 1) throw input_error("I_sharp_hilbn: n must be positive");
    if (n == 1) return I_sharp_n1(s, y_order);
    return detail::assemble_sharp("c1Sn", y_order, s);
}

// Basis the assembled series live in.
inline CohBasis hilb_basis() {
    CohBasis b;
    b.add_label("c1", 2);
    b.add_label("c1Sn", 2);
    b.add_label("c1sq", 4);
    return b;
}

} // namespace qwall
