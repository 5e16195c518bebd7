#pragma once

// Abstract correlator algebra. Brackets are opaque symbols indexed by
// genus, a curve class (gamma, m) and a multiset of insertions (either
// the formal slot t(psi) or a class label with a psi-power). The module
// implements the wall-crossing substitution t(z) -> t(z) + mu(-z), the
// per-wall correction, the string/divisor/dilaton rules, the del Pezzo
// specialization and the DT/PT composite change of variables, all as
// exact operations on formal linear combinations of bracket symbols.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "qwall/errors.hpp"
#include "qwall/rational.hpp"
#include "qwall/series.hpp"
#include "qwall/surface.hpp"

namespace qwall {

struct Insertion {
    bool is_t = true;
    std::string label; // class label when !is_t
    long psi = 0;      // psi-power when !is_t

    static Insertion t_slot() { return {}; }
    static Insertion cls(std::string l, long k) { return {false, std::move(l), k}; }

    auto operator<=>(const Insertion&) const = default;
};

struct Bracket {
    long g = 0;
    NovKey beta; // the class the correlator is evaluated at
    std::vector<Insertion> ins;

    Bracket() = default;
    Bracket(long g_, NovKey beta_, std::vector<Insertion> ins_)
        : g(g_), beta(std::move(beta_)), ins(std::move(ins_)) {
        canonicalize();
    }

    void canonicalize() { std::sort(ins.begin(), ins.end()); }

    long n() const { return static_cast<long>(ins.size()); }

    long t_degree() const {
        long k = 0;
        for (const auto& i : ins) k += i.is_t ? 1 : 0;
        return k;
    }

    bool beta_zero() const {
        if (beta.m != 0) return false;
        for (long x : beta.gamma)
            if (x != 0) return false;
        return true;
    }

    // the convention: brackets with 2g - 2 + N <= 0 at beta = 0 vanish
    bool unstable() const { return beta_zero() && 2 * g - 2 + n() <= 0; }

    auto operator<=>(const Bracket&) const = default;

    std::string str() const {
        std::ostringstream os;
        os << "<";
        for (std::size_t i = 0; i < ins.size(); ++i) {
            if (i) os << ", ";
            if (ins[i].is_t)
                os << "t";
            else
                os << ins[i].label << "(psi^" << ins[i].psi << ")";
        }
        os << ">_{g=" << g << ", gamma=(";
        for (std::size_t i = 0; i < beta.gamma.size(); ++i)
            os << (i ? "," : "") << beta.gamma[i];
        os << "), m=" << beta.m << "}";
        return os.str();
    }
};

struct TermKey {
    Bracket bracket;
    NovKey offset; // Novikov weight carried on top of the bracket's class

    auto operator<=>(const TermKey&) const = default;
};

enum class SeriesMode { standard, perverse };

// Formal linear combination of brackets with Novikov offsets. A term
// (b, delta) -> c stands for c q^{beta(b) + delta} <b>; truncation is by
// the total class.
struct BracketSeries {
    int gamma_dim = 0;
    std::vector<long> ample;
    TruncOrder order;
    SeriesMode mode = SeriesMode::standard;
    std::map<TermKey, Rat> terms;

    BracketSeries() = default;
    BracketSeries(int gdim, std::vector<long> ample_, TruncOrder ord,
                  SeriesMode mode_ = SeriesMode::standard)
        : gamma_dim(gdim), ample(std::move(ample_)), order(ord), mode(mode_) {}

    NovKey total(const TermKey& k) const {
        NovKey t = k.bracket.beta;
        for (int i = 0; i < gamma_dim; ++i) t.gamma[i] += k.offset.gamma[i];
        t.m += k.offset.m;
        return t;
    }

    long gamma_order(const NovKey& k) const {
        long s = 0;
        for (int i = 0; i < gamma_dim; ++i) s += ample[i] * k.gamma[i];
        return s;
    }

    bool in_order(const NovKey& k) const {
        long g = gamma_order(k);
        return k.m >= 0 && g >= 0 && g <= order.gamma_max && k.m <= order.y_max;
    }

    void add(const Bracket& b, const NovKey& offset, const Rat& c) {
        if (c == 0 || b.unstable()) return;
        TermKey key{b, offset};
        if (!in_order(total(key))) return;
        auto [it, fresh] = terms.emplace(std::move(key), c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }

    NovKey zero_key() const { return NovKey{std::vector<long>(gamma_dim, 0), 0}; }

    bool compatible(const BracketSeries& o) const {
        return gamma_dim == o.gamma_dim && ample == o.ample &&
               order.gamma_max == o.order.gamma_max && order.y_max == o.order.y_max;
    }

    BracketSeries& operator+=(const BracketSeries& o) {
        if (!compatible(o)) throw input_error("bracket series: incompatible contexts");
        for (const auto& [k, c] : o.terms) add(k.bracket, k.offset, c);
        return *this;
    }

    bool operator==(const BracketSeries& o) const { return compatible(o) && terms == o.terms; }
};

// Terms with at most the given number of t-slots. A functional identity
// checked over a finite box of <t^N> sources is complete exactly on this
// region: contributions to higher t-degrees would need sources outside
// the box.
inline BracketSeries restrict_t_degree(const BracketSeries& F, long max_t) {
    BracketSeries out(F.gamma_dim, F.ample, F.order, F.mode);
    for (const auto& [key, c] : F.terms)
        if (key.bracket.t_degree() <= max_t) out.add(key.bracket, key.offset, c);
    return out;
}

// First differing term, honouring the genus-0 caveat: coefficients that
// are constant or linear in t are compared only for g >= 1.
inline std::optional<std::string> first_mismatch(const BracketSeries& a, const BracketSeries& b) {
    if (!a.compatible(b)) return "incompatible series contexts";
    auto masked = [](const TermKey& k) {
        return k.bracket.g == 0 && k.bracket.t_degree() <= 1;
    };
    auto describe = [](const TermKey& k, const Rat& ca, const Rat& cb) {
        std::ostringstream os;
        os << k.bracket.str() << " offset m=" << k.offset.m << ": " << rat_str(ca)
           << " != " << rat_str(cb);
        return os.str();
    };
    for (const auto& [k, c] : a.terms) {
        if (masked(k)) continue;
        auto it = b.terms.find(k);
        Rat cb = (it == b.terms.end()) ? Rat(0) : it->second;
        if (cb != c) return describe(k, c, cb);
    }
    for (const auto& [k, c] : b.terms) {
        if (masked(k)) continue;
        if (!a.terms.count(k)) return describe(k, Rat(0), c);
    }
    return std::nullopt;
}

// mu as a Novikov series with polynomial (z >= 0) coefficients and no
// constant term; its per-class slices are the wall-crossing insertions.
struct MuDatum {
    NovikovSeries mu;

    explicit MuDatum(NovikovSeries m) : mu(std::move(m)) {
        if (!mu.term(mu.zero_key()).is_zero())
            throw input_error("mu: the (0,0) term must vanish");
        for (const auto& [k, z] : mu.terms)
            for (const auto& [zpow, lin] : z.coeff)
                if (zpow < 0)
                    throw input_error("mu: negative z-support at a slice; apply [.]_+ first");
    }
};

namespace detail {

// One insertable entry of mu(-psi): class, label, psi-power, coefficient
// (the (-1)^k from z -> -psi is folded in).
struct MuEntry {
    NovKey cls;
    std::string label;
    long psi;
    Rat coeff;

    // entries are unique per (class, label, psi); coeff does not order
    bool operator<(const MuEntry& o) const {
        return std::tie(cls, label, psi) < std::tie(o.cls, o.label, o.psi);
    }
};

inline std::vector<MuEntry> mu_entries(const MuDatum& mu) {
    std::vector<MuEntry> out;
    for (const auto& [k, z] : mu.mu.terms)
        for (const auto& [zpow, lin] : z.coeff)
            for (const auto& [label, c] : lin.parts)
                out.push_back({k, label, zpow, (zpow % 2 == 0) ? c : -c});
    std::sort(out.begin(), out.end());
    return out;
}

inline NovKey key_add(const NovKey& a, const NovKey& b) {
    NovKey out = a;
    for (std::size_t i = 0; i < out.gamma.size(); ++i) out.gamma[i] += b.gamma[i];
    out.m += b.m;
    return out;
}

inline NovKey key_sub(const NovKey& a, const NovKey& b) {
    NovKey out = a;
    for (std::size_t i = 0; i < out.gamma.size(); ++i) out.gamma[i] -= b.gamma[i];
    out.m -= b.m;
    return out;
}

} // namespace detail

// t(z) -> t(z) + mu(-z): multilinear expansion over the t-slots. Brackets
// keep their class; the inserted classes accumulate in the Novikov
// offset. Concrete insertions pass through untouched.
inline BracketSeries expand_substitution(const BracketSeries& F, const MuDatum& mu) {
    auto entries = detail::mu_entries(mu);
    BracketSeries out(F.gamma_dim, F.ample, F.order, F.mode);
    // multisets of entries with multiplicities, pruned by the truncation
    for (const auto& [key, coeff] : F.terms) {
        long nt = key.bracket.t_degree();
        std::vector<Insertion> fixed;
        for (const auto& i : key.bracket.ins)
            if (!i.is_t) fixed.push_back(i);

        NovKey base_total = out.total(key);
        std::vector<std::pair<std::size_t, long>> chosen; // (entry index, multiplicity)
        std::function<void(std::size_t, long, NovKey)> choose = [&](std::size_t idx, long used,
                                                                    NovKey total) {
            // emit the current multiset
            {
                Rat c = coeff;
                NovKey off = key.offset;
                std::vector<Insertion> ins = fixed;
                for (long j = 0; j < nt - used; ++j) ins.push_back(Insertion::t_slot());
                // n! / ((n-k)! prod m_e!) with the entry coefficients
                Rat comb = 1;
                for (long j = 0; j < used; ++j) comb *= nt - j;
                for (const auto& [ei, mult] : chosen) {
                    const auto& e = entries[ei];
                    for (long j = 1; j <= mult; ++j) {
                        comb /= j;
                        c *= e.coeff;
                        ins.push_back(Insertion::cls(e.label, e.psi));
                        off = detail::key_add(off, e.cls);
                    }
                }
                out.add(Bracket(key.bracket.g, key.bracket.beta, std::move(ins)), off, c * comb);
            }
            if (used >= nt) return;
            for (std::size_t ei = idx; ei < entries.size(); ++ei)
                for (long mult = 1; mult <= nt - used; ++mult) {
                    NovKey t2 = total;
                    for (long j = 0; j < mult; ++j) t2 = detail::key_add(t2, entries[ei].cls);
                    if (!out.in_order(t2)) break; // entries only grow the total
                    chosen.emplace_back(ei, mult);
                    choose(ei + 1, used + mult, t2);
                    chosen.pop_back();
                }
        };
        choose(0, 0, base_total);
    }
    return out;
}

// Effectivity and L_beta-degree of curve classes, supplied by the caller.
struct ClassGeometry {
    std::function<bool(const NovKey&)> effective;
    std::function<long(const NovKey&)> degree;
};

// One wall crossing at epsilon_0 = 1/d0: adds the corrections
// sum_{k>=1} (1/k!) <..., mu_{beta_a}(-psi)...> over tuples of classes of
// degree d0, rewriting each bracket at class beta into brackets at
// beta' = beta - sum beta_a.
inline BracketSeries single_wall(const BracketSeries& F, long d0, const MuDatum& mu,
                                 const ClassGeometry& geom) {
    if (d0 <= 0) throw input_error("single_wall: d0 must be positive");
    std::vector<detail::MuEntry> entries;
    for (const auto& e : detail::mu_entries(mu))
        if (geom.degree(e.cls) == d0) entries.push_back(e);

    BracketSeries out = F;
    std::vector<std::string> violations;
    for (const auto& [key, coeff] : F.terms) {
        const Bracket& b = key.bracket;
        // hypothesis of the wall-crossing formula at this wall
        long degb = geom.degree(b.beta);
        if (!(Rat(2 * b.g - 2 + b.n()) + Rat(degb, d0) > 0)) {
            violations.push_back(b.str());
            continue;
        }
        std::vector<std::pair<std::size_t, long>> chosen;
        std::function<void(std::size_t, long)> choose = [&](std::size_t idx, long k) {
            if (k > 0) {
                NovKey removed{std::vector<long>(F.gamma_dim, 0), 0};
                Rat c = coeff;
                std::vector<Insertion> ins = b.ins;
                for (const auto& [ei, mult] : chosen) {
                    const auto& e = entries[ei];
                    for (long j = 1; j <= mult; ++j) {
                        c *= e.coeff / j;
                        ins.push_back(Insertion::cls(e.label, e.psi));
                        removed = detail::key_add(removed, e.cls);
                    }
                }
                NovKey beta_prime = detail::key_sub(b.beta, removed);
                if (geom.effective(beta_prime))
                    out.add(Bracket(b.g, beta_prime, std::move(ins)),
                            detail::key_add(key.offset, removed), c);
            }
            for (std::size_t ei = idx; ei < entries.size(); ++ei)
                for (long mult = 1; mult * d0 + k * d0 <= degb; ++mult) {
                    chosen.emplace_back(ei, mult);
                    choose(ei + 1, k + mult);
                    chosen.pop_back();
                }
        };
        choose(0, 0);
    }
    if (!violations.empty()) {
        std::string msg = "single_wall: hypothesis 2g-2+N+eps0 deg(beta) > 0 violated for:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw input_error(msg);
    }
    return out;
}

// Divisor pairing rows: D . (gamma, m A) = w . gamma + a m.
struct DivisorPairing {
    std::map<std::string, std::pair<std::vector<long>, Rat>> rows;

    bool knows(const std::string& label) const { return rows.count(label) != 0; }

    Rat pair(const std::string& label, const NovKey& beta) const {
        auto it = rows.find(label);
        if (it == rows.end()) throw input_error("divisor pairing unknown for label " + label);
        Rat s = it->second.second * beta.m;
        for (std::size_t i = 0; i < beta.gamma.size(); ++i)
            s += Rat(it->second.first[i]) * beta.gamma[i];
        return s;
    }
};

// c1(S)_n pairs with (gamma, m A) through c1(S) . gamma only.
inline DivisorPairing c1sn_pairing(const SurfaceModel& s) {
    DivisorPairing p;
    std::vector<long> w(s.rho);
    for (int i = 0; i < s.rho; ++i) {
        Rat x = 0;
        for (int j = 0; j < s.rho; ++j) x += Rat(s.form[i][j]) * s.c1S[j];
        if (!is_integer(x)) throw input_error("c1sn pairing: non-integral intersection data");
        w[i] = numerator(x).convert_to<long>();
    }
    p.rows["c1Sn"] = {w, Rat(0)};
    p.rows["c1"] = {std::move(w), Rat(0)};
    return p;
}

// Divisor equation on the first psi-free insertion with a known pairing
// row: <D, rest> = (D . beta) <rest> + psi-corrections. t-slots take no
// correction (they are primary insertions). cup products for the
// corrections come from the basis; the del Pezzo pipeline never needs
// them, tests exercise them with explicit tables.
inline BracketSeries divisor_on_bracket(const Bracket& b, const NovKey& offset, const Rat& coeff,
                                        const DivisorPairing& pairing, const CohBasis& basis,
                                        const BracketSeries& context) {
    BracketSeries out(context.gamma_dim, context.ample, context.order, context.mode);
    std::size_t di = b.ins.size();
    for (std::size_t i = 0; i < b.ins.size(); ++i)
        if (!b.ins[i].is_t && b.ins[i].psi == 0 && pairing.knows(b.ins[i].label)) {
            di = i;
            break;
        }
    if (di == b.ins.size())
        throw input_error("apply_divisor: no psi-free divisor insertion in " + b.str());
    std::string dlabel = b.ins[di].label;
    std::vector<Insertion> rest;
    for (std::size_t i = 0; i < b.ins.size(); ++i)
        if (i != di) rest.push_back(b.ins[i]);

    out.add(Bracket(b.g, b.beta, rest), offset, coeff * pairing.pair(dlabel, b.beta));
    for (std::size_t i = 0; i < rest.size(); ++i) {
        if (rest[i].is_t || rest[i].psi == 0) continue;
        for (const auto& [label, c] : basis.cup_product(dlabel, rest[i].label)) {
            auto ins = rest;
            ins[i] = Insertion::cls(label, rest[i].psi - 1);
            out.add(Bracket(b.g, b.beta, std::move(ins)), offset, coeff * c);
        }
    }
    return out;
}

inline BracketSeries apply_divisor(const Bracket& b, const DivisorPairing& pairing,
                                   const CohBasis& basis, const BracketSeries& context) {
    return divisor_on_bracket(b, context.zero_key(), Rat(1), pairing, basis, context);
}

// String equation: removes a tau_0(1) insertion and lowers one psi-power
// of each remaining insertion in turn.
inline BracketSeries apply_string(const Bracket& b, const BracketSeries& context) {
    BracketSeries out(context.gamma_dim, context.ample, context.order, context.mode);
    std::size_t si = b.ins.size();
    for (std::size_t i = 0; i < b.ins.size(); ++i)
        if (!b.ins[i].is_t && b.ins[i].label == "1" && b.ins[i].psi == 0) {
            si = i;
            break;
        }
    if (si == b.ins.size())
        throw input_error("apply_string: no tau_0(1) insertion in " + b.str());
    std::vector<Insertion> rest;
    for (std::size_t i = 0; i < b.ins.size(); ++i)
        if (i != si) rest.push_back(b.ins[i]);
    for (std::size_t i = 0; i < rest.size(); ++i) {
        if (rest[i].is_t)
            throw input_error("apply_string: t-slots are not reducible; expand them first");
        if (rest[i].psi == 0) continue; // no tau_{-1}
        auto ins = rest;
        --ins[i].psi;
        out.add(Bracket(b.g, b.beta, std::move(ins)), context.zero_key(), Rat(1));
    }
    return out;
}

// Dilaton equation: <tau_1(1), rest> = (2g - 2 + #rest) <rest>.
inline BracketSeries apply_dilaton(const Bracket& b, const BracketSeries& context) {
    BracketSeries out(context.gamma_dim, context.ample, context.order, context.mode);
    std::size_t si = b.ins.size();
    for (std::size_t i = 0; i < b.ins.size(); ++i)
        if (!b.ins[i].is_t && b.ins[i].label == "1" && b.ins[i].psi == 1) {
            si = i;
            break;
        }
    if (si == b.ins.size())
        throw input_error("apply_dilaton: no tau_1(1) insertion in " + b.str());
    std::vector<Insertion> rest;
    for (std::size_t i = 0; i < b.ins.size(); ++i)
        if (i != si) rest.push_back(b.ins[i]);
    out.add(Bracket(b.g, b.beta, rest), context.zero_key(),
            Rat(2 * b.g - 2 + static_cast<long>(rest.size())));
    return out;
}

namespace detail {

// Rewrites every tau_1(1) insertion, repeatedly, by the dilaton equation.
inline BracketSeries dilaton_reduce(const BracketSeries& F) {
    BracketSeries cur = F;
    for (;;) {
        bool any = false;
        BracketSeries next(cur.gamma_dim, cur.ample, cur.order, cur.mode);
        for (const auto& [key, c] : cur.terms) {
            auto has_dilaton = [&] {
                for (const auto& i : key.bracket.ins)
                    if (!i.is_t && i.label == "1" && i.psi == 1) return true;
                return false;
            }();
            if (!has_dilaton) {
                next.add(key.bracket, key.offset, c);
                continue;
            }
            any = true;
            auto red = apply_dilaton(key.bracket, cur);
            for (const auto& [k2, c2] : red.terms)
                next.add(k2.bracket, detail::key_add(key.offset, k2.offset), c * c2);
        }
        cur = std::move(next);
        if (!any) return cur;
    }
}

} // namespace detail

namespace detail {

// Rewrites every psi-free insertion with a known pairing row through the
// divisor equation until none is left.
inline BracketSeries divisor_reduce(const BracketSeries& F, const DivisorPairing& pairing,
                                    const CohBasis& basis) {
    BracketSeries cur = F;
    for (;;) {
        bool any = false;
        BracketSeries next(cur.gamma_dim, cur.ample, cur.order, cur.mode);
        for (const auto& [key, c] : cur.terms) {
            bool has = false;
            for (const auto& i : key.bracket.ins)
                if (!i.is_t && i.psi == 0 && pairing.knows(i.label)) has = true;
            if (!has) {
                next.add(key.bracket, key.offset, c);
                continue;
            }
            any = true;
            next += divisor_on_bracket(key.bracket, key.offset, c, pairing, basis, cur);
        }
        cur = std::move(next);
        if (!any) return cur;
    }
}

} // namespace detail

// Full del Pezzo specialization: expand the substitution with
// mu(-z) = log(1+y) c1Sn, reduce the inserted divisors through the
// divisor equation, and return the factor relating the 0+ and infinity
// N-point series in class gamma.
inline NovikovSeries delpezzo_specialize(long g, long N, const std::vector<long>& gamma,
                                         long y_order, const SurfaceModel& s) {
    if (2 * g - 2 + N < 0) throw input_error("delpezzo_specialize: need 2g - 2 + N >= 0");
    if (!s.del_pezzo) throw input_error("delpezzo_specialize: needs a del Pezzo preset");
    if (static_cast<int>(gamma.size()) != s.rho)
        throw input_error("delpezzo_specialize: gamma has wrong length");

    // track gamma in the bracket class so the divisor pairing sees it;
    // the ample filtration is c1(S) itself (del Pezzo)
    auto pairing = c1sn_pairing(s);
    std::vector<long> ample = pairing.rows.at("c1Sn").first;
    long c1_gamma = 0;
    for (int i = 0; i < s.rho; ++i) c1_gamma += ample[i] * gamma[i];
    if (c1_gamma < 0) throw input_error("delpezzo_specialize: gamma is not effective");

    // mu(-z) = log(1+y) c1Sn, purely z-free, classes (0, m)
    NovikovSeries mu_series(s.rho, ample, {c1_gamma, y_order});
    for (long m = 1; m <= y_order; ++m)
        mu_series.add(NovKey{std::vector<long>(s.rho, 0), m},
                      ZLaurent::single(0, LinComb::single("c1Sn", Rat(m % 2 ? 1 : -1, m))));
    MuDatum mu(mu_series);

    BracketSeries F(s.rho, ample, {c1_gamma, y_order});
    NovKey base{gamma, 0};
    // the N-point relation needs the (N+k)-point sources, with the
    // functional normalization 1/(N+k)!
    Rat fact = 1;
    for (long j = 2; j <= N; ++j) fact *= j;
    for (long k = 0; k <= y_order; ++k) {
        Bracket b(g, base, std::vector<Insertion>(N + k, Insertion::t_slot()));
        F.add(b, F.zero_key(), Rat(1) / fact);
        fact *= N + k + 1;
    }

    CohBasis basis; // no cup products needed: everything is psi-free
    auto reduced = detail::divisor_reduce(expand_substitution(F, mu), pairing, basis);

    // after reduction the surviving terms are multiples of <t^N> at
    // (gamma, 0) with pure y-offsets
    NovikovSeries factor(0, {}, {0, y_order});
    Rat nfact = 1;
    for (long j = 2; j <= N; ++j) nfact *= j;
    Bracket want(g, base, std::vector<Insertion>(N, Insertion::t_slot()));
    for (const auto& [key, c] : reduced.terms) {
        if (!(key.bracket == want)) continue;
        factor.add(NovKey{{}, key.offset.m}, ZLaurent::single(0, LinComb::single("1", c * nfact)));
    }
    return factor;
}

struct IdentityReport {
    bool ok = true;
    bool incomplete = false;
    std::string detail;
};

// The z^(<= -2) truncation of I, recast as the values of the unstable
// one-pointed brackets: a coefficient of L z^(-k-2) at q^beta is the
// value of <L psi^k / normalization>_{0,1,beta}.
inline BracketSeries unstable_terms_from_I(const NovikovSeries& I, const BracketSeries& context) {
    BracketSeries out(context.gamma_dim, context.ample, context.order, context.mode);
    for (const auto& [k, z] : I.terms)
        for (const auto& [zpow, lin] : z.coeff) {
            if (zpow > -2) continue;
            for (const auto& [label, c] : lin.parts)
                out.add(Bracket(0, k, {Insertion::cls(label, -zpow - 2)}), out.zero_key(), c);
        }
    return out;
}

// Verifies J^infinity(t + mu(-z)) = J^0+(t) on supplied bracket values:
// the substitution expansion of the infinity-side values must reproduce
// the 0+-side values plus the unstable terms carried by [I]_{z <= -2}.
inline IdentityReport j_relation_check(const NovikovSeries& I, const BracketSeries& V0,
                                       const BracketSeries& Vinf) {
    MuDatum mu(mu_from_I(I));
    BracketSeries expanded = expand_substitution(Vinf, mu);
    BracketSeries target = V0;
    target += unstable_terms_from_I(I, V0);

    IdentityReport rep;
    for (const auto& [key, c] : expanded.terms) {
        auto it = target.terms.find(key);
        if (it == target.terms.end()) {
            rep.ok = false;
            rep.incomplete = true;
            rep.detail = "no supplied value for " + key.bracket.str() + " at offset m=" +
                         std::to_string(key.offset.m);
            return rep;
        }
        if (it->second != c) {
            rep.ok = false;
            rep.detail = "first discrepancy at " + key.bracket.str() + " (gamma,m,z) weight: got " +
                         rat_str(it->second) + ", expansion gives " + rat_str(c);
            return rep;
        }
    }
    for (const auto& [key, c] : target.terms) {
        if (!expanded.terms.count(key)) {
            rep.ok = false;
            rep.detail = "supplied value at " + key.bracket.str() +
                         " does not appear in the expansion (got " + rat_str(c) + ", expected 0)";
            return rep;
        }
    }
    return rep;
}

// Checks supplied pushforward values at q^beta against [I]_{z <= -2}.
inline IdentityReport unstable_wall_check(const NovikovSeries& I, const ZLaurent& claimed,
                                          const NovKey& beta) {
    IdentityReport rep;
    ZLaurent expect = truncate_z_le(I.term(beta), -2);
    if (expect == claimed) return rep;
    rep.ok = false;
    for (const auto& [zpow, lin] : expect.coeff) {
        auto it = claimed.coeff.find(zpow);
        if (it == claimed.coeff.end() || !(it->second == lin)) {
            rep.detail = "mismatch at z^" + std::to_string(zpow);
            return rep;
        }
    }
    rep.detail = "claimed values carry extra z-powers";
    return rep;
}

// Supplied correlator values for the semi-positive identities.
struct SemiPositiveData {
    NovikovSeries three_point;                        // sum_i <gamma_i, 1, gamma^i>_{0,3,beta}
    NovikovSeries two_point_pt;                       // <[pt], 1>_{0,2,beta}
    std::map<std::string, NovikovSeries> two_point_div; // <D^j, 1>_{0,2,beta} per label
};

inline IdentityReport semipositive_identities(const NovikovSeries& I0, const NovikovSeries& I1,
                                              const SemiPositiveData& data, const CohBasis& basis) {
    IdentityReport rep;
    // (i) I0^{-1} = 1 + sum q^beta <gamma_i, 1, gamma^i>, checked as
    // I0 (1 + V3) = 1 to avoid a division
    auto rhs = nov_add(nov_one(I0.gamma_dim, I0.ample, I0.order), data.three_point);
    if (!(nov_mul(I0, rhs, basis) == nov_one(I0.gamma_dim, I0.ample, I0.order))) {
        rep.ok = false;
        rep.detail = "identity (i) fails: I0 (1 + three-point series) != 1";
        return rep;
    }
    // (ii) I1 = f0 1 + sum f_j D_j with f0 = I0 <pt,1>, f_j = I0 <D^j,1>
    std::map<std::string, NovikovSeries> f;
    for (const auto& [k, z] : I1.terms)
        for (const auto& [zpow, lin] : z.coeff) {
            if (zpow != 0) {
                rep.ok = false;
                rep.detail = "I1 has z-power " + std::to_string(zpow) + "; semi-positive shape requires z^0";
                return rep;
            }
            for (const auto& [label, c] : lin.parts) {
                auto [it, fresh] = f.emplace(label, NovikovSeries(I1.gamma_dim, I1.ample, I1.order));
                it->second.add(k, ZLaurent::single(0, LinComb::single("1", c)));
            }
        }
    auto check_component = [&](const std::string& label, const NovikovSeries& two_point) {
        NovikovSeries expect = nov_mul(I0, two_point, basis);
        NovikovSeries got = f.count(label) ? f.at(label) : NovikovSeries(I1.gamma_dim, I1.ample, I1.order);
        return got == expect;
    };
    if (!check_component("1", data.two_point_pt)) {
        rep.ok = false;
        rep.detail = "identity (ii) fails on the f0 component";
        return rep;
    }
    for (const auto& [label, series] : data.two_point_div)
        if (!check_component(label, series)) {
            rep.ok = false;
            rep.detail = "identity (ii) fails on the f_" + label + " component";
            return rep;
        }
    for (const auto& [label, series] : f)
        if (label != "1" && !data.two_point_div.count(label)) {
            rep.ok = false;
            rep.incomplete = true;
            rep.detail = "no two-point values supplied for divisor label " + label;
            return rep;
        }
    return rep;
}

namespace detail {

// mu(z) = I1 + (I0 - 1) z from semi-positive components.
inline MuDatum mu_from_components(const NovikovSeries& I0, const NovikovSeries& I1) {
    NovikovSeries mu(I0.gamma_dim, I0.ample, I0.order);
    for (const auto& [k, z] : I1.terms) mu.add(k, z);
    for (const auto& [k, z] : I0.terms) {
        if (k == I0.zero_key()) continue;
        mu.add(k, z.shifted(1));
    }
    return MuDatum(mu);
}

// entries of a z-free class-valued series, inserted at psi^0 (no sign)
inline std::vector<MuEntry> entries_of_classes(const NovikovSeries& b) {
    std::vector<MuEntry> out;
    for (const auto& [k, z] : b.terms)
        for (const auto& [zpow, lin] : z.coeff) {
            if (zpow != 0) throw input_error("class series must be z-free");
            for (const auto& [label, c] : lin.parts) out.push_back({k, label, 0, c});
        }
    std::sort(out.begin(), out.end());
    return out;
}

// t -> a t + b on the t-slots: a a scalar series with unit constant
// term, b a list of class entries.
inline BracketSeries substitute_t_affine(const BracketSeries& F, const NovikovSeries& a,
                                         const std::vector<MuEntry>& b_entries,
                                         const CohBasis& basis) {
    long max_t = 0;
    for (const auto& [key, c] : F.terms) max_t = std::max(max_t, key.bracket.t_degree());
    // powers of a as (offset, coefficient) lists
    std::vector<std::vector<std::pair<NovKey, Rat>>> apow(max_t + 1);
    NovikovSeries acc = nov_one(a.gamma_dim, a.ample, a.order);
    for (long j = 0; j <= max_t; ++j) {
        for (const auto& [k, z] : acc.terms) {
            if (!z.coeff.count(0) || !z.coeff.at(0).parts.count("1"))
                throw input_error("substitute_t_affine: a must be a z-free scalar series");
            apow[j].push_back({k, z.coeff.at(0).parts.at("1")});
        }
        if (j < max_t) acc = nov_mul(acc, a, basis);
    }

    BracketSeries out(F.gamma_dim, F.ample, F.order, F.mode);
    for (const auto& [key, coeff] : F.terms) {
        long nt = key.bracket.t_degree();
        std::vector<Insertion> fixed;
        for (const auto& i : key.bracket.ins)
            if (!i.is_t) fixed.push_back(i);
        std::vector<std::pair<std::size_t, long>> chosen;
        std::function<void(std::size_t, long)> choose = [&](std::size_t idx, long used) {
            {
                long kept = nt - used;
                Rat comb = 1;
                for (long j = 0; j < used; ++j) comb *= nt - j;
                Rat centries = 1;
                NovKey off = key.offset;
                std::vector<Insertion> ins = fixed;
                for (long j = 0; j < kept; ++j) ins.push_back(Insertion::t_slot());
                for (const auto& [ei, mult] : chosen) {
                    const auto& e = b_entries[ei];
                    for (long j = 1; j <= mult; ++j) {
                        comb /= j;
                        centries *= e.coeff;
                        ins.push_back(Insertion::cls(e.label, e.psi));
                        off = key_add(off, e.cls);
                    }
                }
                Bracket b(key.bracket.g, key.bracket.beta, std::move(ins));
                for (const auto& [adelta, acoeff] : apow[kept])
                    out.add(b, key_add(off, adelta), coeff * comb * centries * acoeff);
            }
            if (used >= nt) return;
            for (std::size_t ei = idx; ei < b_entries.size(); ++ei)
                for (long mult = 1; mult <= nt - used; ++mult) {
                    chosen.emplace_back(ei, mult);
                    choose(ei + 1, used + mult);
                    chosen.pop_back();
                }
        };
        choose(0, 0);
    }
    return out;
}

// multiply a bracket series by a z-free scalar Novikov series
inline BracketSeries scale_by_series(const BracketSeries& F, const NovikovSeries& s) {
    BracketSeries out(F.gamma_dim, F.ample, F.order, F.mode);
    for (const auto& [k, z] : s.terms) {
        if (!z.coeff.count(0) || z.coeff.size() != 1 || z.coeff.at(0).parts.size() != 1 ||
            !z.coeff.at(0).parts.count("1"))
            throw input_error("scale_by_series: scalar z-free series required");
        Rat c = z.coeff.at(0).parts.at("1");
        for (const auto& [key, coeff] : F.terms)
            out.add(key.bracket, key_add(key.offset, k), coeff * c);
    }
    return out;
}

} // namespace detail

struct DtPtReport {
    bool ok = true;
    std::string detail;
    long compared_t_max = 0;
};

// (I0/I0#)^{2g-2} F^{0+}((I0/I0#)(t + I1#) - I1) = F^{#,0+}(t), verified
// as a formal identity built from two substitution passes and the
// dilaton reduction of the z-linear insertions. F_inf supplies the
// symbolic infinity-side functional (brackets <t^N> with the 1/N!
// normalization over a box of classes); both sides are expanded over it.
// Comparison is restricted to t-degrees all of whose contributions fit
// inside the supplied box.
inline DtPtReport dtpt_composite(const BracketSeries& F_inf, long g, const NovikovSeries& I0,
                                 const NovikovSeries& I1, const NovikovSeries& I0s,
                                 const NovikovSeries& I1s, const CohBasis& basis) {
    if (g == 1)
        throw input_error("dtpt_composite: g = 1 carries an extra constant term and is excluded");
    for (const auto& [key, c] : F_inf.terms)
        if (key.bracket.g != g)
            throw input_error("dtpt_composite: F carries a bracket of the wrong genus");

    // route A: F^{0+} = F^inf(t + mu(-z)), then the affine argument
    auto F0p = expand_substitution(F_inf, detail::mu_from_components(I0, I1));
    auto a = nov_mul(I0, nov_inverse(I0s, basis), basis);
    auto b = nov_add(nov_mul(a, I1s, basis), nov_scale(I1, Rat(-1)));
    auto lhs = detail::substitute_t_affine(F0p, a, detail::entries_of_classes(b), basis);
    lhs = detail::scale_by_series(lhs, nov_pow(a, 2 * g - 2, basis));
    lhs = detail::dilaton_reduce(lhs);

    // route B: F^{#,0+} = F^inf(t + mu#(-z))
    auto rhs = detail::dilaton_reduce(expand_substitution(F_inf, detail::mu_from_components(I0s, I1s)));

    DtPtReport rep;
    long max_source = 0;
    for (const auto& [key, c] : F_inf.terms) max_source = std::max(max_source, key.bracket.t_degree());
    rep.compared_t_max = max_source - 2 * (F_inf.order.gamma_max + F_inf.order.y_max);
    auto restrict = [&](const BracketSeries& s) {
        BracketSeries out(s.gamma_dim, s.ample, s.order, s.mode);
        for (const auto& [key, c] : s.terms)
            if (key.bracket.t_degree() <= rep.compared_t_max) out.add(key.bracket, key.offset, c);
        return out;
    };
    auto mism = first_mismatch(restrict(lhs), restrict(rhs));
    if (mism) {
        rep.ok = false;
        rep.detail = *mism;
    }
    return rep;
}

} // namespace qwall
