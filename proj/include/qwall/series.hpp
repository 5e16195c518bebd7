#pragma once

// Exact truncated formal-series kernel: finite Laurent polynomials in z
// over an abstract cohomology basis, and Novikov series indexed by
// (gamma, m) with q^beta = q^gamma y^m. All coefficients are exact
// rationals; truncation is part of the value.

#include <algorithm>
#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qwall/errors.hpp"
#include "qwall/rational.hpp"

namespace qwall {

// Carrier of A*(M) coefficients: named basis classes with a grading and a
// deliberately partial cup-product table. Products the computation never
// needs are errors, not guesses.
struct CohBasis {
    std::map<std::string, int> degree;                                  // label -> coh degree
    std::map<std::pair<std::string, std::string>, std::map<std::string, Rat>> cup;

    CohBasis() { degree["1"] = 0; }

    void add_label(const std::string& label, int deg) { degree[label] = deg; }

    void set_cup(const std::string& a, const std::string& b, std::map<std::string, Rat> product) {
        cup[ordered(a, b)] = std::move(product);
    }

    bool has_label(const std::string& label) const { return degree.count(label) != 0; }

    std::map<std::string, Rat> cup_product(const std::string& a, const std::string& b) const {
        if (a == "1") return {{b, Rat(1)}};
        if (b == "1") return {{a, Rat(1)}};
        auto it = cup.find(ordered(a, b));
        if (it == cup.end())
            throw input_error("cup product not tabulated: " + a + " . " + b);
        return it->second;
    }

private:
    static std::pair<std::string, std::string> ordered(const std::string& a, const std::string& b) {
        return (a <= b) ? std::make_pair(a, b) : std::make_pair(b, a);
    }
};

struct LinComb {
    std::map<std::string, Rat> parts;

    static LinComb unit() { return LinComb{{{"1", Rat(1)}}}; }
    static LinComb single(const std::string& label, Rat c) {
        LinComb l;
        if (c != 0) l.parts[label] = std::move(c);
        return l;
    }

    bool is_zero() const { return parts.empty(); }

    void add(const std::string& label, const Rat& c) {
        if (c == 0) return;
        auto [it, fresh] = parts.emplace(label, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) parts.erase(it);
        }
    }

    LinComb& operator+=(const LinComb& o) {
        for (const auto& [l, c] : o.parts) add(l, c);
        return *this;
    }

    LinComb scaled(const Rat& a) const {
        LinComb out;
        if (a == 0) return out;
        for (const auto& [l, c] : parts) out.parts[l] = c * a;
        return out;
    }

    LinComb cup(const LinComb& o, const CohBasis& basis) const {
        LinComb out;
        for (const auto& [la, ca] : parts)
            for (const auto& [lb, cb] : o.parts)
                for (const auto& [lc, cc] : basis.cup_product(la, lb)) out.add(lc, ca * cb * cc);
        return out;
    }

    bool operator==(const LinComb& o) const { return parts == o.parts; }
};

// Finitely supported map z-power -> class.
struct ZLaurent {
    std::map<long, LinComb> coeff;

    static ZLaurent unit() { return ZLaurent{{{0, LinComb::unit()}}}; }
    static ZLaurent single(long zpow, LinComb c) {
        ZLaurent f;
        if (!c.is_zero()) f.coeff[zpow] = std::move(c);
        return f;
    }

    bool is_zero() const { return coeff.empty(); }

    void add(long zpow, const LinComb& c) {
        if (c.is_zero()) return;
        auto [it, fresh] = coeff.emplace(zpow, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) coeff.erase(it);
        }
    }

    ZLaurent& operator+=(const ZLaurent& o) {
        for (const auto& [k, c] : o.coeff) add(k, c);
        return *this;
    }

    ZLaurent scaled(const Rat& a) const {
        ZLaurent out;
        if (a == 0) return out;
        for (const auto& [k, c] : coeff) out.coeff[k] = c.scaled(a);
        return out;
    }

    ZLaurent shifted(long dz) const {
        ZLaurent out;
        for (const auto& [k, c] : coeff) out.coeff[k + dz] = c;
        return out;
    }

    ZLaurent mul(const ZLaurent& o, const CohBasis& basis) const {
        ZLaurent out;
        for (const auto& [ka, ca] : coeff)
            for (const auto& [kb, cb] : o.coeff) out.add(ka + kb, ca.cup(cb, basis));
        return out;
    }

    bool operator==(const ZLaurent& o) const { return coeff == o.coeff; }
};

// Keeps z^k with k >= 0. Idempotent.
inline ZLaurent truncate_plus(const ZLaurent& f) {
    ZLaurent out;
    for (const auto& [k, c] : f.coeff)
        if (k >= 0) out.coeff.emplace(k, c);
    return out;
}

// Keeps z^j with j <= k.
inline ZLaurent truncate_z_le(const ZLaurent& f, long k) {
    ZLaurent out;
    for (const auto& [j, c] : f.coeff)
        if (j <= k) out.coeff.emplace(j, c);
    return out;
}

struct NovKey {
    std::vector<long> gamma;
    long m = 0;

    auto operator<=>(const NovKey&) const = default;
};

struct TruncOrder {
    long gamma_max = 0;
    long y_max = 0;
};

// Truncated series in q^gamma y^m with ZLaurent coefficients. The gamma
// filtration is by pairing with a fixed ample vector; terms outside the
// truncation order are never stored.
struct NovikovSeries {
    int gamma_dim = 0;
    std::vector<long> ample; // size gamma_dim
    TruncOrder order;
    std::map<NovKey, ZLaurent> terms;

    NovikovSeries() = default;
    NovikovSeries(int gdim, std::vector<long> ample_, TruncOrder ord)
        : gamma_dim(gdim), ample(std::move(ample_)), order(ord) {
        if (static_cast<int>(ample.size()) != gamma_dim)
            throw input_error("novikov series: ample vector has wrong dimension");
    }

    static NovikovSeries scalar_in_y(long y_max) { return NovikovSeries(0, {}, {0, y_max}); }

    NovKey zero_key() const { return NovKey{std::vector<long>(gamma_dim, 0), 0}; }

    long gamma_order(const NovKey& k) const {
        long s = 0;
        for (int i = 0; i < gamma_dim; ++i) s += ample[i] * k.gamma[i];
        return s;
    }

    bool in_order(const NovKey& k) const {
        if (static_cast<int>(k.gamma.size()) != gamma_dim || k.m < 0) return false;
        long g = gamma_order(k);
        return g >= 0 && g <= order.gamma_max && k.m <= order.y_max;
    }

    void add(const NovKey& k, const ZLaurent& c) {
        if (static_cast<int>(k.gamma.size()) != gamma_dim)
            throw input_error("novikov series: gamma has wrong dimension");
        if (!in_order(k) || c.is_zero()) return;
        auto [it, fresh] = terms.emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    ZLaurent term(const NovKey& k) const {
        auto it = terms.find(k);
        return it == terms.end() ? ZLaurent{} : it->second;
    }

    bool is_zero() const { return terms.empty(); }

    bool compatible(const NovikovSeries& o) const {
        return gamma_dim == o.gamma_dim && ample == o.ample &&
               order.gamma_max == o.order.gamma_max && order.y_max == o.order.y_max;
    }

    bool operator==(const NovikovSeries& o) const {
        return compatible(o) && terms == o.terms;
    }

    // keys sorted by the ample filtration, ties by (gamma lex, m)
    std::vector<NovKey> filtration_keys() const {
        std::vector<NovKey> ks;
        ks.reserve(terms.size());
        for (const auto& [k, c] : terms) ks.push_back(k);
        std::sort(ks.begin(), ks.end(), [&](const NovKey& a, const NovKey& b) {
            long ga = gamma_order(a), gb = gamma_order(b);
            if (ga != gb) return ga < gb;
            if (a.gamma != b.gamma) return a.gamma < b.gamma;
            return a.m < b.m;
        });
        return ks;
    }
};

inline NovikovSeries nov_one(int gdim, std::vector<long> ample, TruncOrder ord) {
    NovikovSeries s(gdim, std::move(ample), ord);
    s.add(s.zero_key(), ZLaurent::unit());
    return s;
}

inline NovikovSeries nov_add(const NovikovSeries& a, const NovikovSeries& b) {
    if (!a.compatible(b)) throw input_error("nov_add: incompatible truncation contexts");
    NovikovSeries out = a;
    for (const auto& [k, c] : b.terms) out.add(k, c);
    return out;
}

inline NovikovSeries nov_scale(const NovikovSeries& a, const Rat& c) {
    NovikovSeries out(a.gamma_dim, a.ample, a.order);
    for (const auto& [k, z] : a.terms) out.add(k, z.scaled(c));
    return out;
}

inline NovikovSeries nov_mul(const NovikovSeries& a, const NovikovSeries& b,
                             const CohBasis& basis) {
    if (!a.compatible(b)) throw input_error("nov_mul: incompatible truncation contexts");
    NovikovSeries out(a.gamma_dim, a.ample, a.order);
    for (const auto& [ka, za] : a.terms)
        for (const auto& [kb, zb] : b.terms) {
            NovKey k{std::vector<long>(a.gamma_dim), ka.m + kb.m};
            for (int i = 0; i < a.gamma_dim; ++i) k.gamma[i] = ka.gamma[i] + kb.gamma[i];
            if (!out.in_order(k)) continue;
            out.add(k, za.mul(zb, basis));
        }
    return out;
}

inline NovikovSeries truncate_plus(const NovikovSeries& f) {
    NovikovSeries out(f.gamma_dim, f.ample, f.order);
    for (const auto& [k, z] : f.terms) out.add(k, truncate_plus(z));
    return out;
}

inline NovikovSeries truncate_z_le(const NovikovSeries& f, long zmax) {
    NovikovSeries out(f.gamma_dim, f.ample, f.order);
    for (const auto& [k, z] : f.terms) out.add(k, truncate_z_le(z, zmax));
    return out;
}

// mu(z) = [z I(q,z) - z]_+ termwise; the q^0 term of an I-type series is
// the identity class, so mu has no q^0 part.
inline NovikovSeries mu_from_I(const NovikovSeries& I) {
    if (!(I.term(I.zero_key()) == ZLaurent::unit()))
        throw input_error("mu_from_I: I must have identity constant term");
    NovikovSeries out(I.gamma_dim, I.ample, I.order);
    for (const auto& [k, z] : I.terms) {
        if (k == I.zero_key()) continue; // z.1 - z = 0
        out.add(k, truncate_plus(z.shifted(1)));
    }
    return out;
}

// log(1+y) to the given y-order, as a scalar series.
inline NovikovSeries log1p_series(long y_order, int gdim = 0, std::vector<long> ample = {}) {
    NovikovSeries s(gdim, std::move(ample), {0, y_order});
    for (long m = 1; m <= y_order; ++m) {
        Rat c = Rat((m % 2 == 1) ? 1 : -1, m);
        NovKey k{std::vector<long>(gdim, 0), m};
        s.add(k, ZLaurent::single(0, LinComb::single("1", c)));
    }
    return s;
}

// Multiplicative inverse of a series whose constant term is a nonzero
// scalar multiple of the identity class.
inline NovikovSeries nov_inverse(const NovikovSeries& a, const CohBasis& basis) {
    ZLaurent c0 = a.term(a.zero_key());
    if (c0.coeff.size() != 1 || !c0.coeff.count(0) || c0.coeff.at(0).parts.size() != 1 ||
        !c0.coeff.at(0).parts.count("1") || c0.coeff.at(0).parts.at("1") == 0)
        throw input_error("nov_inverse: constant term must be a nonzero scalar");
    Rat c = c0.coeff.at(0).parts.at("1");
    // a = c (1 - x) with x of positive order; 1/a = (1/c) sum x^k
    NovikovSeries x(a.gamma_dim, a.ample, a.order);
    for (const auto& [k, z] : a.terms) {
        if (k == a.zero_key()) continue;
        x.add(k, z.scaled(Rat(-1) / c));
    }
    for (const auto& [k, z] : x.terms)
        if (x.gamma_order(k) + k.m == 0)
            throw input_error("nov_inverse: non-constant term of Novikov order zero");
    NovikovSeries out = nov_one(a.gamma_dim, a.ample, a.order);
    NovikovSeries power = out;
    long kmax = a.order.gamma_max + a.order.y_max;
    for (long k = 1; k <= kmax; ++k) {
        power = nov_mul(power, x, basis);
        if (power.is_zero()) break;
        out = nov_add(out, power);
    }
    return nov_scale(out, Rat(1) / c);
}

// Integer powers, negative exponents through nov_inverse.
inline NovikovSeries nov_pow(const NovikovSeries& a, long e, const CohBasis& basis) {
    NovikovSeries base = (e < 0) ? nov_inverse(a, basis) : a;
    long n = (e < 0) ? -e : e;
    NovikovSeries out = nov_one(a.gamma_dim, a.ample, a.order);
    for (long i = 0; i < n; ++i) out = nov_mul(out, base, basis);
    return out;
}

// exp(f) = sum f^k / k! for f with zero constant term and strictly
// positive Novikov order in every term.
inline NovikovSeries exp_series(const NovikovSeries& f, const CohBasis& basis) {
    if (!f.term(f.zero_key()).is_zero())
        throw input_error("exp_series: argument must have no constant term");
    for (const auto& [k, z] : f.terms)
        if (f.gamma_order(k) + k.m == 0)
            throw input_error("exp_series: term of Novikov order zero would not terminate");
    NovikovSeries out = nov_one(f.gamma_dim, f.ample, f.order);
    NovikovSeries power = out;
    Rat fact = 1;
    long kmax = f.order.gamma_max + f.order.y_max;
    for (long k = 1; k <= kmax; ++k) {
        power = nov_mul(power, f, basis);
        if (power.is_zero()) break;
        fact *= k;
        out = nov_add(out, nov_scale(power, Rat(1) / fact));
    }
    return out;
}

} // namespace qwall
