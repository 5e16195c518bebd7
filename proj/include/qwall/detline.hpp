#pragma once

// Langton-ledger calculus: per-step degree drops of L_1 and L_0 (x) L_1^m,
// base-point lengths, the Bogomolov ch_2 bound for sheaves with bounded
// maximal slope, and the resulting positivity threshold m_0.

#include <optional>
#include <string>
#include <vector>

#include "qwall/cohring.hpp"
#include "qwall/errors.hpp"
#include "qwall/rational.hpp"
#include "qwall/surface.hpp"

namespace qwall {

// Numerics of one destabilising quotient in a semistable-reduction step.
struct QuotientData {
    Rat rk;  // nonnegative, <= rk(v) for quotients of fibers
    Rat deg; // degree w.r.t. O_S(1)
    Rat chi;
};

// Per-step decrease of L_1 . C under one reduction step.
inline Rat step_drop_L1(const QuotientData& q, const ChernVector& v, const SurfaceModel& s) {
    return deg(v, s) * q.rk - v.rk * q.deg;
}

// Per-step decrease of (L_0 (x) L_1^m) . C.
inline Rat step_drop_Lbeta(const QuotientData& q, const ChernVector& v, const Int& m,
                           const SurfaceModel& s) {
    return Rat(m) * step_drop_L1(q, v, s) + (chi_surface(v, s) * q.rk - v.rk * q.chi);
}

struct LangtonLedger {
    std::vector<QuotientData> steps;
    ChernVector v;
    Int m; // exponent in L_0 (x) L_1^m
};

// Every step must drop L_1 . C, or keep it and strictly drop the chi term.
inline void validate_ledger(const LangtonLedger& led, const SurfaceModel& s) {
    for (std::size_t i = 0; i < led.steps.size(); ++i) {
        const auto& q = led.steps[i];
        if (q.rk < 0)
            throw input_error("ledger step " + std::to_string(i) + ": negative quotient rank");
        if (q.rk > led.v.rk)
            throw input_error("ledger step " + std::to_string(i) +
                              ": quotient rank exceeds rk(v)");
        Rat d1 = step_drop_L1(q, led.v, s);
        if (d1 < 0)
            throw input_error("ledger step " + std::to_string(i) +
                              ": L1-drop is negative (" + rat_str(d1) + ")");
        if (d1 == 0) {
            Rat c = chi_surface(led.v, s) * q.rk - led.v.rk * q.chi;
            if (c <= 0)
                throw input_error("ledger step " + std::to_string(i) +
                                  ": zero L1-drop requires a positive chi-drop, got " +
                                  rat_str(c));
        }
    }
}

// ell(p) = sum of the L_beta drops over the reduction at p.
inline Rat length_of_point(const LangtonLedger& led, const SurfaceModel& s) {
    validate_ledger(led, s);
    Rat total = 0;
    for (const auto& q : led.steps) total += step_drop_Lbeta(q, led.v, led.m, s);
    return total;
}

struct Interval {
    Rat lo, hi;
    bool lo_closed = false, hi_closed = false;

    bool contains(const Rat& x) const {
        if (x < lo || (x == lo && !lo_closed)) return false;
        if (x > hi || (x == hi && !hi_closed)) return false;
        return true;
    }
    bool empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
};

// Degree window for destabilising quotients with positive L1-drop, given
// the total budget L1 . C.
inline Interval deg_bounds_Q(const ChernVector& v, const Rat& l1c, const SurfaceModel& s) {
    if (v.rk <= 0) throw input_error("deg_bounds_Q: rk(v) must be positive");
    Rat dv = deg(v, s);
    if (dv >= 0) return {-l1c / v.rk, dv, true, false};
    return {dv - l1c / v.rk, dv / v.rk, false, false};
}

namespace detail {

// rho = 1 bookkeeping: degree of k times the NS generator, k integral.
struct Rho1 {
    Rat gen_deg;   // L . O_S(1), positive
    Rat gen_sq;    // L^2
    Rat gen_c1s;   // L . c1(S)

    explicit Rho1(const SurfaceModel& s) {
        if (s.rho != 1)
            throw input_error("this computation needs rho = 1; the ample-cone-neighbourhood "
                              "variant for rho > 1 is not implemented");
        gen_sq = Rat(s.form[0][0]);
        gen_deg = gen_sq * s.hyperplane[0];
        gen_c1s = Rat(s.form[0][0]) * s.c1S[0];
        if (gen_deg <= 0) throw input_error("rho = 1 model must have an ample generator");
    }

    // integral k with k * gen_deg inside the open interval (lo, hi)
    std::optional<std::pair<Int, Int>> k_range_open(const Rat& lo, const Rat& hi) const {
        Rat a = lo / gen_deg, b = hi / gen_deg;
        Int kmin = is_integer(a) ? numerator(a) + 1 : rat_ceil(a);
        Int kmax = is_integer(b) ? numerator(b) - 1 : rat_floor(b);
        if (kmin > kmax) return std::nullopt;
        return std::make_pair(kmin, kmax);
    }
};

} // namespace detail

// Upper bound A with ch2(F) <= r * A for every torsion-free F of rank r,
// c1(F) = c1F * generator and mu_max(F) < B. Enumerates the per-piece
// degree window of the Harder-Narasimhan pieces; nullopt means the window
// admits no piece at all (no such sheaf).
inline std::optional<Rat> bogomolov_bound(const Int& r, const Int& c1F, const Rat& B,
                                          const SurfaceModel& s) {
    if (r <= 0) throw input_error("bogomolov_bound: rank must be positive");
    detail::Rho1 ns(s);
    Rat degF = Rat(c1F) * ns.gen_deg;
    if (r == 1) {
        // single HN piece: F itself, so Bogomolov directly
        if (degF >= B) return std::nullopt;
        return Rat(c1F) * Rat(c1F) * ns.gen_sq / 2;
    }
    Rat lo = (B >= 0) ? degF - B * Rat(r) : degF;
    Rat hi = (B >= 0) ? B * Rat(r) : Rat(0);
    auto kr = ns.k_range_open(lo, hi);
    if (!kr) return std::nullopt;
    auto [kmin, kmax] = *kr;
    Rat ap = std::max(Rat(kmin) * Rat(kmin), Rat(kmax) * Rat(kmax)) * ns.gen_sq;
    return (ap >= 0) ? ap : ap / (2 * Rat(r));
}

// Least m >= m_ample such that every integral quotient datum inside the
// deg_bounds_Q window with ch2 below the Bogomolov bound has a positive
// L_beta drop. Conservative: may exceed the true minimal threshold.
inline Int m0_threshold(const ChernVector& v, const Rat& l1c, const Int& m_ample,
                        const SurfaceModel& s) {
    if (v.rk <= 0 || !is_integer(v.rk)) throw input_error("m0_threshold: rk(v) must be a positive integer");
    if (m_ample <= 0) throw input_error("m0_threshold: m_ample must be positive");
    if (l1c < 0) throw input_error("m0_threshold: L1 . C must be nonnegative");
    if (l1c == 0) return m_ample; // no base points possible
    detail::Rho1 ns(s);
    Int rv = numerator(v.rk);
    Rat B = deg(v, s) / v.rk; // mu(v) bounds mu_max of the quotients
    Interval window = deg_bounds_Q(v, l1c, s);

    std::optional<Rat> chi_max;
    for (Int r = 1; r <= rv; ++r) {
        // integral degrees in the window whose L1-drop is positive and
        // within the total budget (one step cannot drop more than L1 . C)
        Int k = rat_ceil(window.lo / ns.gen_deg) - 1;
        for (;; ++k) {
            Rat dq = Rat(k) * ns.gen_deg;
            if (dq > window.hi) break;
            if (!window.contains(dq)) continue;
            Rat drop = deg(v, s) * Rat(r) - v.rk * dq;
            if (drop <= 0 || drop > l1c) continue;
            auto a = bogomolov_bound(r, k, B, s);
            if (!a) continue;
            Rat cb = Rat(r) * *a + Rat(k) * ns.gen_c1s / 2 + Rat(r) * s.chiO;
            if (!chi_max || cb > *chi_max) chi_max = cb;
        }
    }
    if (!chi_max) return m_ample; // window admits no quotient at all
    Rat chiv = chi_surface(v, s);
    Rat t = *chi_max * v.rk - ((chiv >= 0) ? chiv : chiv * v.rk);
    Int m0 = rat_floor(t) + 1;
    return (m0 > m_ample) ? m0 : m_ample;
}

} // namespace qwall
