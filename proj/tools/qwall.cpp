// Command-line front end: every computation of the library behind one
// binary with deterministic, canonical JSON output. Numeric input is
// exact ("p/q" or integers); exit code 1 flags invalid input, 2 an
// internal invariant violation.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "qwall/cohring.hpp"
#include "qwall/detline.hpp"
#include "qwall/ifunc.hpp"
#include "qwall/json_io.hpp"
#include "qwall/polappx.hpp"
#include "qwall/qstab.hpp"
#include "qwall/series.hpp"
#include "qwall/surface.hpp"
#include "qwall/toml_lite.hpp"
#include "qwall/wallcross.hpp"

namespace {

using namespace qwall;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SurfaceModel load_surface(const std::string& spec) {
    if (spec.find('.') != std::string::npos || spec.find('/') != std::string::npos)
        return SurfaceModel::from_toml(read_file(spec));
    return SurfaceModel::preset(spec);
}

json read_json_file(const std::string& path) {
    auto text = read_file(path);
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw input_error("malformed json in " + path);
    return j;
}

std::vector<Rat> parse_csv_rat(const std::string& csv) {
    std::vector<Rat> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_rat(tok));
    return out;
}

std::vector<long> parse_csv_long(const std::string& csv) {
    std::vector<long> out;
    for (const auto& r : parse_csv_rat(csv)) {
        if (!is_integer(r)) throw input_error("expected integers in '" + csv + "'");
        out.push_back(numerator(r).convert_to<long>());
    }
    return out;
}

ChernVector chern_from_csv(const std::string& csv, const SurfaceModel& s) {
    auto v = parse_csv_rat(csv);
    if (static_cast<int>(v.size()) != s.rho + 2)
        throw input_error("chern vector needs rk, " + std::to_string(s.rho) + " c1 entries, ch2");
    RatVec c1(v.begin() + 1, v.end() - 1);
    return ChernVector(v.front(), std::move(c1), v.back());
}

enum class OutputFormat { json_out, table_out };
OutputFormat out_format = OutputFormat::json_out;

void emit_table(const json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            emit_table(v, prefix.empty() ? k : prefix + "." + k);
    } else if (j.is_array()) {
        std::size_t i = 0;
        for (const auto& v : j) emit_table(v, prefix + "[" + std::to_string(i++) + "]");
    } else if (j.is_string()) {
        std::cout << prefix << " = " << j.get<std::string>() << "\n";
    } else {
        std::cout << prefix << " = " << j.dump() << "\n";
    }
}

void emit(const json& j) {
    if (out_format == OutputFormat::table_out)
        emit_table(j, "");
    else
        std::cout << canonical_dump(j) << "\n";
}

json walls_json(long degree) {
    json out;
    json w = json::array();
    for (const auto& x : walls(degree)) w.push_back(rat_str(x));
    out["walls"] = std::move(w);
    return out;
}

struct AppendixARun {
    PolarizedProduct X;
    std::vector<DestabInstance> instances;
    std::vector<long> K;
};

AppendixARun load_appendixa(const json& in) {
    SurfaceModel s = load_surface(in.value("surface", std::string("P2")));
    std::vector<ProductComponent> comps;
    for (const auto& jc : in.at("components"))
        comps.push_back({jc.at("genus").get<long>(), jc.at("k").get<long>()});
    std::string nodeword = in.value("node", std::string("smooth"));
    NodeStructure node = nodeword == "separating"      ? NodeStructure::separating
                         : nodeword == "nonseparating" ? NodeStructure::nonseparating
                                                       : NodeStructure::smooth;
    if (nodeword != "smooth" && nodeword != "separating" && nodeword != "nonseparating")
        throw input_error("appendixa: node must be smooth|nonseparating|separating");
    PolarizedProduct X(std::move(s), std::move(comps), node);
    std::vector<DestabInstance> instances;
    for (const auto& ji : in.at("instances")) {
        DestabInstance inst{sheaf_numerics_from_json(ji.at("F")),
                            sheaf_numerics_from_json(ji.at("G")), std::nullopt};
        if (ji.contains("G2")) inst.G2 = sheaf_numerics_from_json(ji.at("G2"));
        instances.push_back(std::move(inst));
    }
    std::vector<long> K = in.at("K").get<std::vector<long>>();
    return {std::move(X), std::move(instances), std::move(K)};
}

json appendixa_report(const AppendixARun& run, int jobs) {
    auto cert = n0_search(run.instances, run.X, run.K);
    std::vector<json> rows(run.instances.size());
    auto eval = [&](std::size_t i) {
        const auto& inst = run.instances[i];
        json row;
        switch (run.X.node) {
        case NodeStructure::smooth: {
            Rat lhs = inst.G.rk * int1(inst.F.kF.at(0), inst.F.deg_f, cert.k[0], cert.k[0], run.X.d) -
                      inst.F.rk * int1(inst.G.kF.at(0), inst.G.deg_f, cert.k[0], cert.k[0], run.X.d);
            row["slope_term"] = rat_str(lhs);
            row["bounds_at_K"] = bounds_check(inst.G, inst.F, run.K[0], run.K[0], run.X);
            break;
        }
        case NodeStructure::nonseparating:
            row["term_reduced"] = rat_str(nonsep_term(inst.G, inst.F, run.X, cert.k[0]));
            row["term_exact"] =
                rat_str(nonsep_term(inst.G, inst.F, run.X, cert.k[0], CoeffMode::exact));
            break;
        case NodeStructure::separating: {
            auto t = sep_terms(inst.G, *inst.G2, inst.F, inst.F, run.X, cert.k[0], cert.k[1]);
            auto to = sep_terms(inst.G, *inst.G2, inst.F, inst.F, run.X, cert.k[0], cert.k[1],
                                CoeffMode::exact);
            row["a"] = rat_str(t.a);
            row["b1"] = rat_str(t.b1);
            row["b2"] = rat_str(t.b2);
            row["total_reduced"] = rat_str(t.total());
            row["total_exact"] = rat_str(to.total());
            row["certificate"] = cert.sufficient_inequality[i];
            break;
        }
        }
        rows[i] = std::move(row);
    };
    if (jobs <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) eval(i);
    } else {
        std::vector<std::thread> pool;
        std::size_t n = rows.size();
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n; i += jobs) eval(i);
            });
        for (auto& th : pool) th.join();
    }
    json out;
    out["threshold"] = cert.k;
    out["instances"] = rows;
    return out;
}

json dtpt_from_config(const json& cfg) {
    long g = cfg.at("g").get<long>();
    long n_compare = cfg.value("n_compare", 1L);
    long y_max = cfg.at("y_max").get<long>();
    TruncOrder ord{0, y_max};
    CohBasis basis;
    if (cfg.contains("labels"))
        for (const auto& jl : cfg["labels"]) basis.add_label(jl.at(0).get<std::string>(), jl.at(1).get<int>());
    auto series = [&](const char* key) {
        auto s = series_from_json(cfg.at(key));
        if (s.order.y_max != y_max || s.gamma_dim != 0)
            throw input_error("dtpt: component series must be scalar in y at the stated order");
        return s;
    };
    auto I0 = series("I0"), I1 = series("I1"), I0s = series("I0s"), I1s = series("I1s");
    std::vector<NovKey> betas;
    for (long m : cfg.value("betas_m", std::vector<long>{0, 1, 2})) betas.push_back(NovKey{{}, m});
    BracketSeries F(0, {}, ord);
    long n_max = n_compare + 2 * y_max;
    for (const auto& beta : betas) {
        Rat fact = 1;
        for (long n = 0; n <= n_max; ++n) {
            if (n > 1) fact *= n;
            F.add(Bracket(g, beta, std::vector<Insertion>(n, Insertion::t_slot())), F.zero_key(),
                  Rat(1) / fact);
        }
    }
    auto rep = dtpt_composite(F, g, I0, I1, I0s, I1s, basis);
    json out;
    out["ok"] = rep.ok;
    out["compared_t_max"] = rep.compared_t_max;
    if (!rep.ok) out["detail"] = rep.detail;
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"exact quasimap wall-crossing calculus for moduli of sheaves on surfaces"};
    app.require_subcommand(1);
    std::string format = "json";
    app.add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));

    std::string surface = "P2", epsilon = "0+";
    std::string graph_file, subscheme_file, ledger_file, series_file, mu_file, config_file;
    std::string gamma_csv = "0", u_csv, v_csv, beta_csv;
    long degree = 0, n = 1, order = 6, g = 0, N = 0, m = 0, dimM = -1, m_flag = 0, m_ample = 1;
    int ui = -1, jobs = 1;

    auto* c_walls = app.add_subcommand("walls", "wall values 1/d0 for a total degree");
    c_walls->add_option("--degree", degree)->required();

    auto* c_vdim = app.add_subcommand("vdim", "virtual dimension of the quasimap moduli");
    c_vdim->add_option("--surface", surface);
    c_vdim->add_option("--n", n);
    c_vdim->add_option("--gamma", gamma_csv);
    c_vdim->add_option("--m", m);
    c_vdim->add_option("--g", g);
    c_vdim->add_option("--N", N);
    c_vdim->add_option("--v", v_csv);
    c_vdim->add_option("--dimM", dimM);

    auto* c_stab = app.add_subcommand("stability", "epsilon-stability of quasimap data");
    c_stab->add_option("--graph", graph_file);
    c_stab->add_option("--subscheme", subscheme_file);
    c_stab->add_option("--epsilon", epsilon);
    c_stab->add_option("--m", m_flag);

    auto* c_det = app.add_subcommand("detdeg", "determinant-line-bundle degree");
    c_det->add_option("--surface", surface);
    c_det->add_option("--u", u_csv);
    c_det->add_option("--v", v_csv);
    c_det->add_option("--ui", ui);
    c_det->add_option("--beta", beta_csv)->required();

    auto* c_len = app.add_subcommand("length", "base-point length and certified m0");
    c_len->add_option("--surface", surface);
    c_len->add_option("--v", v_csv)->required();
    c_len->add_option("--ledger", ledger_file)->required();
    c_len->add_option("--m", m_flag);
    c_len->add_option("--m-ample", m_ample);

    auto* c_if = app.add_subcommand("ifunc", "perverse I-function of Hilb^n");
    c_if->add_option("--surface", surface);
    c_if->add_option("--n", n);
    c_if->add_option("--order", order);

    auto* c_wc = app.add_subcommand("wallcross", "wall-crossing operations");
    c_wc->require_subcommand(1);
    auto* c_wc_walls = c_wc->add_subcommand("walls", "wall values for a total degree");
    c_wc_walls->add_option("--degree", degree)->required();
    auto* c_wc_sub = c_wc->add_subcommand("substitute", "expand t -> t + mu(-z)");
    c_wc_sub->add_option("--series", series_file)->required();
    c_wc_sub->add_option("--mu", mu_file)->required();
    auto* c_wc_dp = c_wc->add_subcommand("delpezzo", "del Pezzo wall-crossing factor");
    c_wc_dp->add_option("--surface", surface);
    c_wc_dp->add_option("--g", g);
    c_wc_dp->add_option("--N", N);
    c_wc_dp->add_option("--gamma", gamma_csv);
    c_wc_dp->add_option("--order", order);
    auto* c_wc_dtpt = c_wc->add_subcommand("dtpt", "DT/PT composite identity check");
    c_wc_dtpt->add_option("--file", config_file)->required();

    auto* c_appa = app.add_subcommand("appendixa", "suitable-polarization slope report");
    c_appa->add_option("--file", config_file)->required();
    c_appa->add_option("--jobs", jobs)->check(CLI::Range(1, 64));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    out_format = (format == "table") ? OutputFormat::table_out : OutputFormat::json_out;

    if (c_walls->parsed() || c_wc_walls->parsed()) {
        emit(walls_json(degree));
        return 0;
    }
    if (c_vdim->parsed()) {
        auto s = load_surface(surface);
        ChernVector v = v_csv.empty() ? ChernVector(Rat(1), s.zero_class(), Rat(-n))
                                      : chern_from_csv(v_csv, s);
        auto gam = parse_csv_rat(gamma_csv);
        if (static_cast<int>(gam.size()) != s.rho) throw input_error("gamma needs rho entries");
        RatVec c1d(s.rho);
        for (int i = 0; i < s.rho; ++i) c1d[i] = -gam[i];
        DegreeClass beta{Rat(0), std::move(c1d), Rat(-m)};
        long dim = dimM >= 0 ? dimM : 2 * n;
        json out;
        out["vdim"] = vdim(v, beta, s, g, N, dim).str();
        emit(out);
        return 0;
    }
    if (c_stab->parsed()) {
        Epsilon e = Epsilon::parse(epsilon);
        json out;
        if (!graph_file.empty()) {
            auto graph = graph_from_json(read_json_file(graph_file));
            out["prestable"] = is_prestable(graph);
            auto verdict = is_epsilon_stable(graph, e);
            out["stable"] = verdict.stable;
            out["diagnostics"] = verdict.diagnostics;
        } else if (!subscheme_file.empty()) {
            auto jd = read_json_file(subscheme_file);
            SubschemeDatum d;
            d.graph = graph_from_json(jd.at("graph"));
            d.flat_over_special = jd.value("flat", true);
            if (jd.contains("vertical"))
                for (const auto& jp : jd["vertical"])
                    d.vertical.push_back({parse_rat(jp.at("deg").get<std::string>()),
                                          parse_rat(jp.at("chi").get<std::string>()),
                                          parse_rat(jp.at("chi_int").get<std::string>())});
            if (jd.contains("tails"))
                for (const auto& jp : jd["tails"])
                    d.tails.push_back({parse_rat(jp.at("deg").get<std::string>()),
                                       parse_rat(jp.at("chi").get<std::string>())});
            if (m_flag <= 0) throw input_error("stability --subscheme needs --m > 0");
            auto verdict = hilb_conditions(d, e, Int(m_flag));
            out["stable"] = verdict.stable;
            out["diagnostics"] = verdict.diagnostics;
        } else {
            throw input_error("stability needs --graph or --subscheme");
        }
        emit(out);
        return 0;
    }
    if (c_det->parsed()) {
        auto s = load_surface(surface);
        KClassRep u = [&] {
            if (!u_csv.empty()) return chern_from_csv(u_csv, s);
            if (v_csv.empty() || (ui != 0 && ui != 1))
                throw input_error("detdeg needs --u, or --v with --ui {0,1}");
            return u_class(chern_from_csv(v_csv, s), ui, s);
        }();
        auto b = parse_csv_rat(beta_csv);
        if (static_cast<int>(b.size()) != s.rho + 2)
            throw input_error("beta needs rk_d, c1_d entries, pt_d");
        DegreeClass beta{b.front(), RatVec(b.begin() + 1, b.end() - 1), b.back()};
        json out;
        out["degree"] = rat_str(det_degree(u, beta, s));
        emit(out);
        return 0;
    }
    if (c_len->parsed()) {
        auto s = load_surface(surface);
        auto v = chern_from_csv(v_csv, s);
        auto steps = ledger_steps_from_json(read_json_file(ledger_file));
        Rat l1c = 0;
        for (const auto& q : steps) l1c += step_drop_L1(q, v, s);
        Int m0 = m0_threshold(v, l1c, Int(m_ample), s);
        Int use_m = (m_flag > 0) ? Int(m_flag) : m0;
        LangtonLedger led{steps, v, use_m};
        json out;
        out["L1C"] = rat_str(l1c);
        out["m0"] = m0.str();
        out["m"] = use_m.str();
        out["length"] = rat_str(length_of_point(led, s));
        emit(out);
        return 0;
    }
    if (c_if->parsed()) {
        auto s = load_surface(surface);
        emit(series_to_json(I_sharp_hilbn(n, s, order)));
        return 0;
    }
    if (c_wc_sub->parsed()) {
        auto F = bracket_series_from_json(read_json_file(series_file));
        MuDatum mu(series_from_json(read_json_file(mu_file)));
        emit(bracket_series_to_json(expand_substitution(F, mu)));
        return 0;
    }
    if (c_wc_dp->parsed()) {
        auto s = load_surface(surface);
        emit(series_to_json(delpezzo_specialize(g, N, parse_csv_long(gamma_csv), order, s)));
        return 0;
    }
    if (c_wc_dtpt->parsed()) {
        emit(dtpt_from_config(read_json_file(config_file)));
        return 0;
    }
    if (c_appa->parsed()) {
        auto run = load_appendixa(read_json_file(config_file));
        emit(appendixa_report(run, jobs));
        return 0;
    }
    throw input_error("no subcommand");
}

std::string one_line(std::string s) {
    for (auto& c : s)
        if (c == '\n') c = ';';
    return s;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const qwall::input_error& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << one_line(e.what()) << "\n";
        return 2;
    }
}
