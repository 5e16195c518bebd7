#pragma once

// Suitable-polarization slope calculus on S x C for a nodal curve C:
// intersection numbers with the mixed polarizations L_n, dual-mode
// Hilbert coefficients (a reduced normalization and the exact
// Riemann-Roch leading coefficients), the destabilizer bound, and the
// separating / non-separating node inequalities with the threshold
// search.

#include <optional>
#include <string>
#include <vector>

#include "qwall/errors.hpp"
#include "qwall/rational.hpp"
#include "qwall/surface.hpp"

namespace qwall {

enum class NodeStructure { smooth, nonseparating, separating };

enum class CoeffMode { reduced, exact };

struct ProductComponent {
    long genus = 0;
    long k = 1; // polarization degree on this component, positive
};

// S x C with a polarization O_S(1) (x) O_C(k_1, ..., k_m).
struct PolarizedProduct {
    SurfaceModel S;
    std::vector<ProductComponent> components;
    NodeStructure node = NodeStructure::smooth;
    Rat d; // O_S(1)^2
    Rat e; // c1(O_S(1)) . c1(S)

    PolarizedProduct(SurfaceModel s, std::vector<ProductComponent> comps, NodeStructure n)
        : S(std::move(s)), components(std::move(comps)), node(n) {
        d = S.d;
        e = S.pair(S.hyperplane, S.c1S);
        std::size_t need = (node == NodeStructure::separating) ? 2 : 1;
        if (components.size() != need)
            throw input_error("polarized product: component count does not match the node structure");
        for (const auto& c : components) {
            if (c.k <= 0) throw input_error("polarized product: polarization degrees must be positive");
            if (c.genus < 0) throw input_error("polarized product: negative genus");
        }
    }
};

// Numerical data of a sheaf on S x C, per component of C.
struct SheafNumerics {
    Rat rk;
    Rat deg_f;           // degree of a general fiber w.r.t. O_S(1)
    std::vector<Rat> kF; // Kunneth C-component of c1, one per component

    void check(std::size_t ncomp) const {
        if (kF.size() != ncomp) throw input_error("sheaf numerics: wrong number of components");
    }
};

// c1(F) . L_n . L_m = d k(F) + (n+m) deg_f: depends on (n, m) only
// through n + m.
inline Rat int1(const Rat& kF, const Rat& deg_f, long n, long m, const Rat& d) {
    return d * kF + Rat(n + m) * deg_f;
}

// degree with respect to L_k on one component
inline Rat deg_k(const SheafNumerics& F, long k, std::size_t comp, const Rat& d) {
    return int1(F.kF.at(comp), F.deg_f, k, k, d);
}

// Hilbert coefficients (a2, a3) of F on component i. Reduced mode uses
// the normalization a3(O_X) = d k, a2(O_X) = d g + k e / 2; exact mode
// carries the Riemann-Roch leading coefficients a3(O_X) = 3 d k,
// a2(O_X) = k e + (1 - g) d. Every sign conclusion downstream is a
// statement about slope differences, on which the two modes agree up to
// a positive factor.
inline std::pair<Rat, Rat> hilb_coeffs(const SheafNumerics& F, const PolarizedProduct& X,
                                       std::size_t comp, CoeffMode mode) {
    F.check(X.components.size());
    const auto& c = X.components.at(comp);
    Rat a3_O = (mode == CoeffMode::reduced) ? Rat(X.d * c.k) : Rat(3 * X.d * c.k);
    Rat a2_O = (mode == CoeffMode::reduced) ? Rat(X.d * c.genus + Rat(c.k) * X.e / 2)
                                          : Rat(Rat(c.k) * X.e + Rat(1 - c.genus) * X.d);
    Rat a2 = deg_k(F, c.k, comp, X.d) + F.rk * a2_O;
    Rat a3 = F.rk * a3_O;
    return {a2, a3};
}

inline std::pair<Rat, Rat> hilb_coeffs_reduced(const SheafNumerics& F, const PolarizedProduct& X,
                                             std::size_t comp) {
    return hilb_coeffs(F, X, comp, CoeffMode::reduced);
}

inline Rat slope(const SheafNumerics& F, const PolarizedProduct& X, std::size_t comp,
                 CoeffMode mode = CoeffMode::reduced) {
    auto [a2, a3] = hilb_coeffs(F, X, comp, mode);
    if (a3 == 0) throw input_error("slope: a3 vanishes");
    return a2 / a3;
}

// Destabilizer bound: a relative destabilizer G certified at n0 drives
// rk(G) deg_n(F) - rk(F) deg_n(G) below 2 (n0 - n) for all n >= n0.
inline bool bounds_check(const SheafNumerics& G, const SheafNumerics& F, long n, long n0,
                         const PolarizedProduct& X) {
    Rat lhs = G.rk * int1(F.kF.at(0), F.deg_f, n, n, X.d) -
              F.rk * int1(G.kF.at(0), G.deg_f, n, n, X.d);
    return lhs < 2 * Rat(n0 - n);
}

// Non-separating node: the antisymmetrized slope-difference numerator
// a3(O_X) (rk(G) deg_k(pi*F) - rk(F) deg_k(G) - d rk(F) rk(G)).
inline Rat nonsep_term(const SheafNumerics& G, const SheafNumerics& F, const PolarizedProduct& X,
                       long n, CoeffMode mode = CoeffMode::reduced) {
    if (X.node != NodeStructure::nonseparating && X.node != NodeStructure::smooth)
        throw input_error("nonsep_term: needs a one-component product");
    Rat a3_O = (mode == CoeffMode::reduced) ? Rat(X.d * n) : Rat(3 * X.d * n);
    Rat inner = G.rk * int1(F.kF.at(0), F.deg_f, n, n, X.d) -
                F.rk * int1(G.kF.at(0), G.deg_f, n, n, X.d) - X.d * F.rk * G.rk;
    return a3_O * inner;
}

struct SepTerms {
    Rat a;
    Rat b1;
    Rat b2;

    Rat total() const { return a + b1 + b2; }
};

// Separating node: the three grouped expressions of the proof, evaluated
// at polarization degrees (k1, k2).
inline SepTerms sep_terms(const SheafNumerics& G1, const SheafNumerics& G2,
                          const SheafNumerics& F1, const SheafNumerics& F2,
                          const PolarizedProduct& X, long k1, long k2,
                          CoeffMode mode = CoeffMode::reduced) {
    if (X.node != NodeStructure::separating)
        throw input_error("sep_terms: needs a separating-node product");
    if (F1.rk != F2.rk)
        throw input_error("sep_terms: flatness across the node forces equal ranks");
    Rat rkF = F1.rk;
    Rat scale = (mode == CoeffMode::reduced) ? Rat(1) : Rat(3);
    auto a3_O = [&](long k) { return scale * X.d * k; };
    auto a2_O = [&](std::size_t i, long k) {
        return (mode == CoeffMode::reduced)
                   ? Rat(X.d * X.components.at(i).genus + Rat(k) * X.e / 2)
                   : Rat(Rat(k) * X.e + Rat(1 - X.components.at(i).genus) * X.d);
    };

    SepTerms t{Rat(0), Rat(0), Rat(0)};
    // (a): per-component destabilizing parts
    t.a = a3_O(k1) * (G1.rk * deg_k(F1, k1, 0, X.d) - rkF * deg_k(G1, k1, 0, X.d) - rkF * G1.rk) +
          a3_O(k2) * (G2.rk * deg_k(F2, k2, 1, X.d) - rkF * deg_k(G2, k2, 1, X.d) - rkF * G2.rk);
    // (b.1): the cross degree terms
    t.b1 = a3_O(k2) * (G2.rk * deg_k(F1, k1, 0, X.d) - rkF * deg_k(G1, k1, 0, X.d)) +
           a3_O(k1) * (G1.rk * deg_k(F2, k2, 1, X.d) - rkF * deg_k(G2, k2, 1, X.d));
    // (b.2): the td-weighted rank asymmetry
    t.b2 = rkF * (G2.rk - G1.rk) * (a2_O(0, k1) * a3_O(k2) - a2_O(1, k2) * a3_O(k1));
    return t;
}

// An instance of the destabilizing data entering the threshold search.
struct DestabInstance {
    SheafNumerics F;
    SheafNumerics G;              // one destabilizer per component for separating nodes
    std::optional<SheafNumerics> G2; // second-component destabilizer
};

struct ThresholdCertificate {
    std::vector<long> k;           // per-component polarization degrees
    bool reduced_negative = false; // all instances negative in reduced mode
    bool exact_negative = false;
    std::vector<std::string> sufficient_inequality; // the (b.1)+(b.2) certificate, per instance
};

namespace detail {

inline Rat sep_total_both(const DestabInstance& inst, const PolarizedProduct& X, long k1, long k2,
                          CoeffMode mode) {
    if (!inst.G2) throw input_error("n0_search: separating instance needs two destabilizers");
    return sep_terms(inst.G, *inst.G2, inst.F, inst.F, X, k1, k2, mode).total();
}

inline bool all_negative(const std::vector<DestabInstance>& instances, const PolarizedProduct& X,
                         const std::vector<long>& k) {
    for (const auto& inst : instances) {
        switch (X.node) {
        case NodeStructure::smooth: {
            Rat lhs = inst.G.rk * int1(inst.F.kF.at(0), inst.F.deg_f, k[0], k[0], X.d) -
                      inst.F.rk * int1(inst.G.kF.at(0), inst.G.deg_f, k[0], k[0], X.d);
            if (!(lhs < 0)) return false;
            break;
        }
        case NodeStructure::nonseparating:
            if (!(nonsep_term(inst.G, inst.F, X, k[0], CoeffMode::reduced) < 0)) return false;
            if (!(nonsep_term(inst.G, inst.F, X, k[0], CoeffMode::exact) < 0)) return false;
            break;
        case NodeStructure::separating:
            if (!(sep_total_both(inst, X, k[0], k[1], CoeffMode::reduced) < 0)) return false;
            if (!(sep_total_both(inst, X, k[0], k[1], CoeffMode::exact) < 0)) return false;
            break;
        }
    }
    return true;
}

} // namespace detail

// Minimal polarization degrees making the relevant slope expression
// negative on every instance, certified in both coefficient modes. The
// search ascends the diagonal from the supplied K thresholds and then
// decrements each coordinate while negativity survives; the result is
// minimal in the sense that any single decrement breaks at least one
// instance (or leaves the valid range).
inline ThresholdCertificate n0_search(const std::vector<DestabInstance>& instances,
                                      const PolarizedProduct& X, const std::vector<long>& K_bounds,
                                      long search_limit = 100000) {
    if (instances.empty()) throw input_error("n0_search: no instances");
    std::size_t ncomp = X.components.size();
    if (K_bounds.size() != ncomp) throw input_error("n0_search: K bound per component required");

    long k_lo = 1;
    for (long K : K_bounds) k_lo = std::max(k_lo, K);
    std::vector<long> k(ncomp, k_lo);
    while (!detail::all_negative(instances, X, k)) {
        for (auto& x : k) ++x;
        if (k[0] > search_limit)
            throw input_error("n0_search: no threshold below the search limit; instance set infeasible");
    }
    // greedy decrements toward a minimal point
    for (bool moved = true; moved;) {
        moved = false;
        for (std::size_t i = 0; i < ncomp; ++i) {
            if (k[i] <= 1) continue;
            --k[i];
            if (detail::all_negative(instances, X, k))
                moved = true;
            else
                ++k[i];
        }
    }

    ThresholdCertificate cert;
    cert.k = k;
    cert.reduced_negative = cert.exact_negative = true;
    if (X.node == NodeStructure::separating) {
        for (const auto& inst : instances) {
            // the sufficient inequality certifying (b.1)+(b.2) < 0
            std::string lines;
            for (int i = 0; i < 2; ++i) {
                const auto& Gi = (i == 0) ? inst.G : *inst.G2;
                const auto& Gj = (i == 0) ? *inst.G2 : inst.G;
                long ki = k[i], Kj = K_bounds[i];
                long gj = X.components[1 - i].genus;
                Rat lhs = Rat(ki - Kj) * (Gi.rk * inst.F.deg_f - inst.F.rk * Gi.deg_f);
                Rat rhs = X.d * (Gi.rk - Gj.rk) * (Rat(gj) * inst.F.rk - inst.F.kF.at(i));
                lines += "(k" + std::to_string(i + 1) + " - K)(rk(G) deg_f(F) - rk(F) deg_f(G)) = " +
                         rat_str(lhs) + (lhs < rhs ? " < " : " !< ") + rat_str(rhs) + "; ";
            }
            cert.sufficient_inequality.push_back(lines);
        }
    }
    return cert;
}

} // namespace qwall
