#pragma once

// Chern-character arithmetic on a surface: the truncated product on
// (rk, NS, point) triples, Riemann-Roch pairings, and the determinant
// line bundle degree formulas for the classes u_0, u_1.

#include <vector>

#include "qwall/errors.hpp"
#include "qwall/rational.hpp"
#include "qwall/surface.hpp"

namespace qwall {

struct ChernVector {
    Rat rk;
    RatVec c1;
    Rat ch2;

    ChernVector(Rat rk_, RatVec c1_, Rat ch2_)
        : rk(std::move(rk_)), c1(std::move(c1_)), ch2(std::move(ch2_)) {}

    static ChernVector zero(const SurfaceModel& s) { return {Rat(0), s.zero_class(), Rat(0)}; }

    ChernVector operator+(const ChernVector& o) const {
        check_same_rho(o);
        RatVec c = c1;
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c1[i];
        return {rk + o.rk, std::move(c), ch2 + o.ch2};
    }

    ChernVector operator-(const ChernVector& o) const {
        check_same_rho(o);
        RatVec c = c1;
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.c1[i];
        return {rk - o.rk, std::move(c), ch2 - o.ch2};
    }

    ChernVector scaled(const Rat& a) const {
        RatVec c = c1;
        for (auto& x : c) x *= a;
        return {rk * a, std::move(c), ch2 * a};
    }

    bool operator==(const ChernVector& o) const { return rk == o.rk && c1 == o.c1 && ch2 == o.ch2; }

private:
    void check_same_rho(const ChernVector& o) const {
        if (c1.size() != o.c1.size()) throw input_error("chern vectors live on different surfaces");
    }
};

// A K_0(S)_Q element recorded through its Chern character.
using KClassRep = ChernVector;

// Degree part of ch of a family on S x C: beta-check = (rk_d, c1_d, pt_d).
// Subscheme-side curve data is (gamma, m) = (-c1_d, -pt_d).
struct DegreeClass {
    Rat rk_d;
    RatVec c1_d;
    Rat pt_d;

    ChernVector as_chern() const { return {rk_d, c1_d, pt_d}; }
};

// ch of [O_H] for a hyperplane section H: (0, H, -d/2).
inline ChernVector hyperplane_class(const SurfaceModel& s) {
    return {Rat(0), s.hyperplane, -s.d / 2};
}

// ch of [O_x] for a point x.
inline ChernVector point_class(const SurfaceModel& s) {
    return {Rat(0), s.zero_class(), Rat(1)};
}

inline ChernVector structure_sheaf_class(const SurfaceModel& s) {
    return {Rat(1), s.zero_class(), Rat(0)};
}

// chi(v) = int_S ch(v).td_S = ch2 + c1(v).c1S/2 + rk.chi(O_S).
inline Rat chi_surface(const ChernVector& v, const SurfaceModel& s) {
    return v.ch2 + s.pair(v.c1, s.c1S) / 2 + v.rk * s.chiO;
}

// Truncated ch-ring product, exact in degrees <= 2.
inline ChernVector mult_k(const ChernVector& u, const ChernVector& v, const SurfaceModel& s) {
    RatVec c1 = s.zero_class();
    for (int i = 0; i < s.rho; ++i) c1[i] = u.rk * v.c1[i] + v.rk * u.c1[i];
    return {u.rk * v.rk, std::move(c1), u.rk * v.ch2 + v.rk * u.ch2 + s.pair(u.c1, v.c1)};
}

inline Rat chi_pair(const KClassRep& u, const ChernVector& v, const SurfaceModel& s) {
    return chi_surface(mult_k(u, v, s), s);
}

inline Rat deg(const ChernVector& v, const SurfaceModel& s) { return s.deg(v.c1); }

// u_i = -rk(v).h^i + chi(v.h^i).[O_x], with h^0 = [O_S], h^1 = [O_H].
// By construction chi(u_i . v) = 0, so lambda(u_i) descends to the
// rigidified stack.
inline KClassRep u_class(const ChernVector& v, int i, const SurfaceModel& s) {
    if (i != 0 && i != 1) throw input_error("u_class: i must be 0 or 1");
    ChernVector hi = (i == 0) ? structure_sheaf_class(s) : hyperplane_class(s);
    Rat w = chi_surface(mult_k(v, hi, s), s);
    return hi.scaled(Rat(-1) * v.rk) + point_class(s).scaled(w);
}

// Degree of lambda(u) against beta-check: int_S ch(u).beta_check.td_S.
inline Rat det_degree(const KClassRep& u, const DegreeClass& beta, const SurfaceModel& s) {
    return chi_surface(mult_k(u, beta.as_chern(), s), s);
}

// chi(u_1(v) . B) in closed form: the degree pairing of slopes.
inline Rat chi_u1(const ChernVector& v, const ChernVector& B, const SurfaceModel& s) {
    return B.rk * deg(v, s) - v.rk * deg(B, s);
}

// chi(u_0(v) . B) in closed form.
inline Rat chi_u0(const ChernVector& v, const ChernVector& B, const SurfaceModel& s) {
    return chi_surface(v, s) * B.rk - v.rk * chi_surface(B, s);
}

} // namespace qwall
