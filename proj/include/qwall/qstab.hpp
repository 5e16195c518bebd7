#pragma once

// Epsilon-stability on combinatorial quasimap data: prestability, the
// per-component positivity condition, base-point length bounds, the wall
// and chamber structure in epsilon, the virtual dimension formula, and
// the subscheme-side stability bullets for Hilbert-scheme quasimaps.

#include <functional>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "qwall/cohring.hpp"
#include "qwall/errors.hpp"
#include "qwall/rational.hpp"
#include "qwall/surface.hpp"

namespace qwall {

struct Epsilon {
    struct ZeroPlus {};
    struct Infinity {};
    std::variant<ZeroPlus, Rat, Infinity> value;

    static Epsilon zero_plus() { return {ZeroPlus{}}; }
    static Epsilon infinity() { return {Infinity{}}; }
    static Epsilon finite(Rat e) {
        if (e <= 0) throw input_error("epsilon must be positive");
        return {std::move(e)};
    }

    bool is_zero_plus() const { return std::holds_alternative<ZeroPlus>(value); }
    bool is_infinity() const { return std::holds_alternative<Infinity>(value); }
    bool is_finite() const { return std::holds_alternative<Rat>(value); }
    const Rat& finite_value() const { return std::get<Rat>(value); }

    static Epsilon parse(const std::string& s) {
        if (s == "0+") return zero_plus();
        if (s == "inf" || s == "infinity") return infinity();
        return finite(parse_rat(s));
    }

    std::string str() const {
        if (is_zero_plus()) return "0+";
        if (is_infinity()) return "inf";
        return rat_str(finite_value());
    }
};

struct BasePoint {
    Rat length;           // ell(p) > 0
    bool on_special = false; // sits on a node or marking
};

struct GraphVertex {
    long genus = 0;
    long lbeta_deg = 0; // d_v, degree under L_beta
    long markings = 0;
    std::vector<BasePoint> base_points;
};

// Dual graph of the domain curve; edges are nodes, loops allowed.
struct QuasimapGraph {
    std::vector<GraphVertex> vertices;
    std::vector<std::pair<int, int>> edges;

    void validate() const {
        int n = static_cast<int>(vertices.size());
        if (n == 0) throw input_error("graph: needs at least one vertex");
        for (auto [a, b] : edges)
            if (a < 0 || b < 0 || a >= n || b >= n) throw input_error("graph: edge endpoint out of range");
        for (const auto& v : vertices) {
            if (v.genus < 0 || v.lbeta_deg < 0 || v.markings < 0)
                throw input_error("graph: negative vertex datum");
            for (const auto& b : v.base_points)
                if (b.length <= 0) throw input_error("graph: base point length must be positive");
        }
        // connectivity
        std::vector<int> comp(n);
        std::iota(comp.begin(), comp.end(), 0);
        std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
        for (auto [a, b] : edges) comp[find(a)] = find(b);
        for (int i = 0; i < n; ++i)
            if (find(i) != find(0)) throw input_error("graph: not connected");
    }

    long special_points(int vi) const {
        long s = vertices[vi].markings;
        for (auto [a, b] : edges) {
            if (a == vi) ++s;
            if (b == vi) ++s; // a loop contributes two branches
        }
        return s;
    }

    long total_degree() const {
        long d = 0;
        for (const auto& v : vertices) d += v.lbeta_deg;
        return d;
    }

    long total_genus() const {
        long g = 0;
        for (const auto& v : vertices) g += v.genus;
        long b1 = static_cast<long>(edges.size()) - static_cast<long>(vertices.size()) + 1;
        return g + b1;
    }
};

inline bool is_prestable(const QuasimapGraph& g) {
    g.validate();
    for (const auto& v : g.vertices)
        for (const auto& b : v.base_points)
            if (b.on_special) return false;
    return true;
}

struct StabilityVerdict {
    bool stable = true;
    std::vector<std::string> diagnostics;

    void fail(std::string why) {
        stable = false;
        diagnostics.push_back(std::move(why));
    }
};

// Wall values for total degree d: {1/d0 : 1 <= d0 <= d}.
inline std::vector<Rat> walls(long total_degree) {
    std::vector<Rat> w;
    for (long d0 = 1; d0 <= total_degree; ++d0) w.emplace_back(1, d0);
    return w;
}

inline bool is_wall(const Rat& e, long total_degree) {
    if (e <= 0) return false;
    Rat inv = 1 / e;
    return is_integer(inv) && numerator(inv) >= 1 && numerator(inv) <= total_degree;
}

// Chamber index of a non-wall finite epsilon: the number of walls
// strictly below it, so (0, 1/d) is chamber 0 and (1, infinity) is
// chamber d.
inline long chamber_of(const Rat& e, long total_degree) {
    if (e <= 0) throw input_error("chamber_of: epsilon must be positive");
    if (is_wall(e, total_degree))
        throw input_error("chamber_of: " + rat_str(e) + " is a wall");
    long below = 0;
    for (const auto& w : walls(total_degree))
        if (w < e) ++below;
    return below;
}

// Condition (i) of epsilon-stability per irreducible component:
// 2g_v - 2 + #special_v + eps d_v > 0, with the 0+ / infinity readings.
inline bool vertex_positive(long two_g_minus_2_plus_special, long dv, const Epsilon& e) {
    if (e.is_zero_plus())
        return two_g_minus_2_plus_special > 0 || (two_g_minus_2_plus_special == 0 && dv > 0);
    if (e.is_infinity()) return two_g_minus_2_plus_special > 0 || dv > 0;
    return Rat(two_g_minus_2_plus_special) + e.finite_value() * dv > 0;
}

inline StabilityVerdict is_epsilon_stable(const QuasimapGraph& g, const Epsilon& e) {
    if (!is_prestable(g))
        throw input_error("is_epsilon_stable: graph is not prestable (base point on a node or marking)");
    if (e.is_finite() && is_wall(e.finite_value(), g.total_degree()))
        throw input_error("epsilon = " + e.str() + " is a wall for total degree " +
                          std::to_string(g.total_degree()) + "; stability is ill-defined on walls");
    StabilityVerdict v;
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        const auto& vert = g.vertices[i];
        long t = 2 * vert.genus - 2 + g.special_points(static_cast<int>(i));
        if (!vertex_positive(t, vert.lbeta_deg, e))
            v.fail("(i) fails at vertex " + std::to_string(i) + ": 2g-2+#special = " +
                   std::to_string(t) + ", d = " + std::to_string(vert.lbeta_deg));
        for (const auto& b : vert.base_points) {
            if (e.is_infinity()) {
                v.fail("(ii) fails at vertex " + std::to_string(i) +
                       ": base points are forbidden at epsilon = infinity");
            } else if (e.is_finite() && e.finite_value() * b.length > 1) {
                v.fail("(ii) fails at vertex " + std::to_string(i) + ": eps * " +
                       rat_str(b.length) + " > 1");
            }
            // 0+: eps ell <= 1 holds for every length
        }
    }
    return v;
}

// vdim of the moduli of epsilon-stable quasimaps, evaluated on
// subscheme-side curve data (gamma, m) = -(c1_d, pt_d) of beta-check.
inline Int vdim(const ChernVector& v, const DegreeClass& beta, const SurfaceModel& s, long g,
                long N, long dimM) {
    RatVec gamma = beta.c1_d;
    for (auto& x : gamma) x = -x;
    Rat r_sub = -beta.rk_d;
    Rat val = v.rk * s.pair(gamma, s.c1S) - r_sub * s.pair(v.c1, s.c1S) +
              Rat(dimM - 3) * Rat(1 - g) + Rat(N);
    if (!is_integer(val)) throw internal_error("vdim: non-integral value " + rat_str(val));
    return numerator(val);
}

// Subscheme-side data of one epsilon-stability check (Hilbert-scheme
// case): the non-dominant pieces over base points and the restrictions
// to rational tails, plus the flatness flag over nodes and markings.
struct VerticalPiece {
    Rat deg;
    Rat chi;
    Rat chi_intersection; // chi of the structure sheaf of Gamma^s cap Gamma^v
};

struct TailRestriction {
    Rat deg;
    Rat chi;
};

struct SubschemeDatum {
    QuasimapGraph graph; // combinatorics of the domain, for the automorphism proxy
    bool flat_over_special = true;
    std::vector<VerticalPiece> vertical;
    std::vector<TailRestriction> tails;
};

// The four bullets of the subscheme-side stability characterisation.
inline StabilityVerdict hilb_conditions(const SubschemeDatum& d, const Epsilon& e, const Int& m) {
    if (m <= 0) throw input_error("hilb_conditions: m must be positive");
    // lengths of the unstable pieces are what the epsilon walls probe
    if (e.is_finite()) {
        Rat len_total = 0;
        for (const auto& p : d.vertical) {
            Rat ell = Rat(m) * p.deg + p.chi - p.chi_intersection;
            if (ell > 0) len_total += ell;
        }
        Rat inv = 1 / e.finite_value();
        if (is_integer(inv) && numerator(inv) >= 1 && Rat(numerator(inv)) <= len_total)
            throw input_error("epsilon = " + e.str() + " is a wall for this datum");
    }
    StabilityVerdict v;
    // finite automorphisms: a genus-0 vertex with <= 2 special points must
    // carry positive degree
    d.graph.validate();
    for (std::size_t i = 0; i < d.graph.vertices.size(); ++i) {
        const auto& vert = d.graph.vertices[i];
        if (vert.genus == 0 && d.graph.special_points(static_cast<int>(i)) <= 2 &&
            vert.lbeta_deg == 0)
            v.fail("automorphisms: genus-0 vertex " + std::to_string(i) +
                   " with <= 2 special points and zero degree");
    }
    if (!d.flat_over_special) v.fail("flatness: subscheme not flat over nodes and markings");
    for (std::size_t i = 0; i < d.vertical.size(); ++i) {
        const auto& p = d.vertical[i];
        Rat lhs = Rat(m) * p.deg + p.chi - p.chi_intersection;
        bool ok = e.is_zero_plus() ? true
                  : e.is_infinity() ? (lhs <= 0)
                                    : (lhs <= 1 / e.finite_value());
        if (!ok)
            v.fail("vertical piece " + std::to_string(i) + ": m deg + chi - chi_int = " +
                   rat_str(lhs) + " exceeds 1/eps");
    }
    for (std::size_t i = 0; i < d.tails.size(); ++i) {
        const auto& t = d.tails[i];
        Rat lhs = Rat(m) * t.deg + t.chi;
        bool ok = e.is_zero_plus() ? false
                  : e.is_infinity() ? (lhs > 0)
                                    : (lhs > 1 / e.finite_value());
        if (!ok)
            v.fail("rational tail " + std::to_string(i) + ": m deg + chi = " + rat_str(lhs) +
                   " must exceed 1/eps");
    }
    return v;
}

} // namespace qwall
