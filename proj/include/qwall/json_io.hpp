#pragma once

// JSON schemas for the machine-readable surfaces of the library. Writers
// emit canonical form: sorted keys, terms in filtration order, rationals
// as num/den strings with den > 0 and gcd(num, den) = 1.

#include <json.hpp>

#include <string>
#include <vector>

#include "qwall/errors.hpp"
#include "qwall/rational.hpp"
#include "qwall/series.hpp"

namespace qwall {

using json = nlohmann::json;

inline json rat_to_json_pair(const Rat& r, json& obj) {
    obj["num"] = numerator(r).str();
    obj["den"] = denominator(r).str();
    return obj;
}

inline Rat rat_from_json(const json& obj) {
    if (!obj.contains("num") || !obj.contains("den"))
        throw input_error("json: expected num/den rational");
    Rat num = parse_rat(obj["num"].get<std::string>());
    Rat den = parse_rat(obj["den"].get<std::string>());
    if (!is_integer(num) || !is_integer(den) || den == 0)
        throw input_error("json: num/den must be integers, den nonzero");
    return num / den;
}

// {order: {gamma_max, y_max}, ample: [...], terms: [{gamma, m, z, basis, num, den}]}
inline json series_to_json(const NovikovSeries& s) {
    json out;
    out["order"] = {{"gamma_max", s.order.gamma_max}, {"y_max", s.order.y_max}};
    out["ample"] = s.ample;
    json terms = json::array();
    for (const auto& key : s.filtration_keys()) {
        const ZLaurent& z = s.terms.at(key);
        for (const auto& [zpow, lin] : z.coeff)
            for (const auto& [label, c] : lin.parts) {
                json t;
                t["gamma"] = key.gamma;
                t["m"] = key.m;
                t["z"] = zpow;
                t["basis"] = label;
                rat_to_json_pair(c, t);
                terms.push_back(t);
            }
    }
    out["terms"] = std::move(terms);
    return out;
}

inline NovikovSeries series_from_json(const json& in) {
    if (!in.contains("order") || !in.contains("terms"))
        throw input_error("series json: missing order/terms");
    TruncOrder ord{in["order"].at("gamma_max").get<long>(), in["order"].at("y_max").get<long>()};
    std::vector<long> ample;
    if (in.contains("ample")) ample = in["ample"].get<std::vector<long>>();
    NovikovSeries s(static_cast<int>(ample.size()), ample, ord);
    for (const auto& t : in["terms"]) {
        NovKey k{t.at("gamma").get<std::vector<long>>(), t.at("m").get<long>()};
        long zpow = t.at("z").get<long>();
        std::string label = t.at("basis").get<std::string>();
        Rat c = rat_from_json(t);
        s.add(k, ZLaurent::single(zpow, LinComb::single(label, c)));
    }
    return s;
}

// nlohmann::json with the default std::map keeps object keys sorted, so
// dump() of the structures above is canonical byte-for-byte.
inline std::string canonical_dump(const json& j) { return j.dump(); }

} // namespace qwall

#include "qwall/detline.hpp"
#include "qwall/polappx.hpp"
#include "qwall/qstab.hpp"
#include "qwall/wallcross.hpp"

namespace qwall {

inline json graph_to_json(const QuasimapGraph& g) {
    json out;
    json verts = json::array();
    for (const auto& v : g.vertices) {
        json jv;
        jv["genus"] = v.genus;
        jv["d"] = v.lbeta_deg;
        jv["markings"] = v.markings;
        json bps = json::array();
        for (const auto& b : v.base_points) {
            json jb;
            jb["length"] = rat_str(b.length);
            jb["on_special"] = b.on_special;
            bps.push_back(jb);
        }
        jv["base_points"] = std::move(bps);
        verts.push_back(jv);
    }
    out["vertices"] = std::move(verts);
    json edges = json::array();
    for (auto [a, b] : g.edges) edges.push_back(json::array({a, b}));
    out["edges"] = std::move(edges);
    return out;
}

inline QuasimapGraph graph_from_json(const json& in) {
    QuasimapGraph g;
    if (!in.contains("vertices")) throw input_error("graph json: missing vertices");
    for (const auto& jv : in["vertices"]) {
        GraphVertex v;
        v.genus = jv.value("genus", 0L);
        v.lbeta_deg = jv.value("d", 0L);
        v.markings = jv.value("markings", 0L);
        if (jv.contains("base_points"))
            for (const auto& jb : jv["base_points"])
                v.base_points.push_back(
                    {parse_rat(jb.at("length").get<std::string>()), jb.value("on_special", false)});
        g.vertices.push_back(std::move(v));
    }
    if (in.contains("edges"))
        for (const auto& je : in["edges"])
            g.edges.emplace_back(je.at(0).get<int>(), je.at(1).get<int>());
    g.validate();
    return g;
}

// Ledgers are arrays of {rk, deg, chi} quotient data.
inline std::vector<QuotientData> ledger_steps_from_json(const json& in) {
    if (!in.is_array()) throw input_error("ledger json: expected an array of {rk, deg, chi}");
    std::vector<QuotientData> steps;
    for (const auto& js : in)
        steps.push_back({parse_rat(js.at("rk").get<std::string>()),
                         parse_rat(js.at("deg").get<std::string>()),
                         parse_rat(js.at("chi").get<std::string>())});
    return steps;
}

inline json bracket_series_to_json(const BracketSeries& s) {
    json out;
    out["order"] = {{"gamma_max", s.order.gamma_max}, {"y_max", s.order.y_max}};
    out["ample"] = s.ample;
    out["mode"] = s.mode == SeriesMode::standard ? "standard" : "perverse";
    json terms = json::array();
    for (const auto& [key, c] : s.terms) {
        json t;
        t["g"] = key.bracket.g;
        t["gamma"] = key.bracket.beta.gamma;
        t["m"] = key.bracket.beta.m;
        json ins = json::array();
        for (const auto& i : key.bracket.ins) {
            if (i.is_t)
                ins.push_back("t");
            else
                ins.push_back(json{{"label", i.label}, {"psi", i.psi}});
        }
        t["insertions"] = std::move(ins);
        t["offset_gamma"] = key.offset.gamma;
        t["offset_m"] = key.offset.m;
        rat_to_json_pair(c, t);
        terms.push_back(t);
    }
    out["terms"] = std::move(terms);
    return out;
}

inline BracketSeries bracket_series_from_json(const json& in) {
    TruncOrder ord{in.at("order").at("gamma_max").get<long>(),
                   in.at("order").at("y_max").get<long>()};
    std::vector<long> ample;
    if (in.contains("ample")) ample = in["ample"].get<std::vector<long>>();
    SeriesMode mode = (in.value("mode", "standard") == std::string("perverse"))
                          ? SeriesMode::perverse
                          : SeriesMode::standard;
    BracketSeries s(static_cast<int>(ample.size()), ample, ord, mode);
    for (const auto& t : in.at("terms")) {
        NovKey beta{t.at("gamma").get<std::vector<long>>(), t.at("m").get<long>()};
        std::vector<Insertion> ins;
        for (const auto& ji : t.at("insertions")) {
            if (ji.is_string() && ji.get<std::string>() == "t")
                ins.push_back(Insertion::t_slot());
            else
                ins.push_back(Insertion::cls(ji.at("label").get<std::string>(),
                                             ji.at("psi").get<long>()));
        }
        NovKey offset{t.value("offset_gamma", std::vector<long>(ample.size(), 0)),
                      t.value("offset_m", 0L)};
        s.add(Bracket(t.at("g").get<long>(), beta, std::move(ins)), offset, rat_from_json(t));
    }
    return s;
}

inline SheafNumerics sheaf_numerics_from_json(const json& in) {
    SheafNumerics s;
    s.rk = parse_rat(in.at("rk").get<std::string>());
    s.deg_f = parse_rat(in.at("deg_f").get<std::string>());
    for (const auto& k : in.at("kF")) s.kF.push_back(parse_rat(k.get<std::string>()));
    return s;
}

} // namespace qwall
