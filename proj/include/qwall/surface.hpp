#pragma once

// Exact model of the (p,p)-cohomology lattice of a smooth projective
// surface with q(S) = 0: Neron-Severi intersection form, c1(S), chi(O_S)
// and the polarization class. Everything downstream pairs through this.

#include <string>
#include <vector>

#include "qwall/errors.hpp"
#include "qwall/rational.hpp"
#include "qwall/toml_lite.hpp"

namespace qwall {

using RatVec = std::vector<Rat>;

struct SurfaceModel {
    int rho = 1;
    std::vector<std::vector<Int>> form; // symmetric rho x rho on NS(S)
    RatVec c1S;
    Rat chiO;
    RatVec hyperplane; // class of O_S(1)
    Rat d;             // O_S(1)^2, derived
    bool del_pezzo = false;
    std::string name = "custom";

    SurfaceModel(int rho_, std::vector<std::vector<Int>> form_, RatVec c1S_, Rat chiO_,
                 RatVec hyperplane_, bool del_pezzo_ = false, std::string name_ = "custom")
        : rho(rho_), form(std::move(form_)), c1S(std::move(c1S_)), chiO(std::move(chiO_)),
          hyperplane(std::move(hyperplane_)), del_pezzo(del_pezzo_), name(std::move(name_)) {
        validate();
        d = pair(hyperplane, hyperplane);
        if (d <= 0) throw input_error("surface: O_S(1)^2 must be positive, got " + rat_str(d));
    }

    // intersection pairing on NS(S)_Q
    Rat pair(const RatVec& a, const RatVec& b) const {
        if (static_cast<int>(a.size()) != rho || static_cast<int>(b.size()) != rho)
            throw input_error("surface: class has wrong length for rho=" + std::to_string(rho));
        Rat s = 0;
        for (int i = 0; i < rho; ++i)
            for (int j = 0; j < rho; ++j)
                s += a[i] * Rat(form[i][j]) * b[j];
        return s;
    }

    // degree of an NS class with respect to O_S(1)
    Rat deg(const RatVec& a) const { return pair(a, hyperplane); }

    RatVec zero_class() const { return RatVec(rho, Rat(0)); }

    static SurfaceModel p2() {
        return SurfaceModel(1, {{1}}, {Rat(3)}, Rat(1), {Rat(1)}, true, "P2");
    }

    static SurfaceModel p1xp1() {
        return SurfaceModel(2, {{Int(0), Int(1)}, {Int(1), Int(0)}}, {Rat(2), Rat(2)}, Rat(1),
                            {Rat(1), Rat(1)}, true, "P1xP1");
    }

    // Blow-up of P^2 in k points, polarized by the anticanonical class.
    static SurfaceModel dp(int k) {
        if (k < 1 || k > 8) throw input_error("dP preset: k must be in 1..8");
        int rho = k + 1;
        std::vector<std::vector<Int>> q(rho, std::vector<Int>(rho, Int(0)));
        q[0][0] = 1;
        for (int i = 1; i < rho; ++i) q[i][i] = -1;
        RatVec c1(rho, Rat(-1));
        c1[0] = 3;
        return SurfaceModel(rho, std::move(q), c1, Rat(1), c1, true, "dP" + std::to_string(k));
    }

    static SurfaceModel abstract_rho1(Int degree, Rat c1_coeff, Rat chiO_) {
        return SurfaceModel(1, {{degree}}, {std::move(c1_coeff)}, std::move(chiO_), {Rat(1)},
                            false, "abstract");
    }

    static SurfaceModel preset(const std::string& name) {
        if (name == "P2") return p2();
        if (name == "P1xP1") return p1xp1();
        if (name.size() == 3 && name.substr(0, 2) == "dP" && name[2] >= '1' && name[2] <= '8')
            return dp(name[2] - '0');
        throw input_error("unknown surface preset: '" + name + "'");
    }

    static SurfaceModel from_toml(const std::string& text) {
        auto tab = toml::parse(text);
        auto need = [&](const char* key) -> const toml::Value& {
            auto it = tab.find(key);
            if (it == tab.end()) throw input_error(std::string("surface toml: missing key ") + key);
            return it->second;
        };
        int rho = static_cast<int>(parse_rat(need("picard_rank").scalar()).convert_to<long>());
        if (rho < 1) throw input_error("surface toml: picard_rank must be positive");
        const auto& fv = need("intersection_form");
        if (static_cast<int>(fv.items.size()) != rho * rho)
            throw input_error("surface toml: intersection_form needs rho^2 entries");
        std::vector<std::vector<Int>> form(rho, std::vector<Int>(rho));
        for (int i = 0; i < rho; ++i)
            for (int j = 0; j < rho; ++j) {
                Rat e = parse_rat(fv.items[i * rho + j]);
                if (!is_integer(e)) throw input_error("surface toml: intersection_form must be integral");
                form[i][j] = numerator(e);
            }
        auto vec = [&](const char* key) {
            const auto& v = need(key);
            if (static_cast<int>(v.items.size()) != rho)
                throw input_error(std::string("surface toml: ") + key + " needs rho entries");
            RatVec out;
            for (const auto& s : v.items) out.push_back(parse_rat(s));
            return out;
        };
        bool dp = false;
        if (auto it = tab.find("del_pezzo"); it != tab.end()) dp = it->second.scalar() == "true";
        return SurfaceModel(rho, std::move(form), vec("c1S"), parse_rat(need("chiO").scalar()),
                            vec("hyperplane"), dp);
    }

private:
    void validate() const {
        if (rho < 1) throw input_error("surface: picard rank must be positive");
        if (static_cast<int>(form.size()) != rho) throw input_error("surface: form has wrong size");
        for (const auto& row : form)
            if (static_cast<int>(row.size()) != rho) throw input_error("surface: form has wrong size");
        for (int i = 0; i < rho; ++i)
            for (int j = 0; j < i; ++j)
                if (form[i][j] != form[j][i]) throw input_error("surface: intersection form not symmetric");
        if (static_cast<int>(c1S.size()) != rho || static_cast<int>(hyperplane.size()) != rho)
            throw input_error("surface: c1S/hyperplane have wrong length");
    }
};

} // namespace qwall
