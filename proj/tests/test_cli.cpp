#include <catch2/catch_amalgamated.hpp>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qwall/json_io.hpp"

using namespace qwall;

namespace {

struct RunResult {
    int code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(QWALL_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
    int rc = pclose(p);
    return {WEXITSTATUS(rc), std::move(out)};
}

std::filesystem::path fixture_dir() {
    auto dir = std::filesystem::temp_directory_path() / "qwall_cli_fixtures";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_fixture(const std::string& name, const std::string& text) {
    auto path = fixture_dir() / name;
    std::ofstream(path) << text;
    return path.string();
}

} // namespace

TEST_CASE("worked examples through the CLI") {
    {
        auto r = run_cli("walls --degree 3");
        CHECK(r.code == 0);
        CHECK(r.out == "{\"walls\":[\"1\",\"1/2\",\"1/3\"]}\n");
    }
    {
        auto r = run_cli("vdim --surface P2 --n 2 --gamma 1 --m 0 --g 0 --N 3");
        CHECK(r.code == 0);
        CHECK(r.out == "{\"vdim\":\"7\"}\n");
    }
    {
        auto r = run_cli("ifunc --surface P2 --n 1 --order 4");
        CHECK(r.code == 0);
        auto series = series_from_json(json::parse(r.out));
        std::vector<Rat> expect{Rat(1), Rat(-1, 2), Rat(1, 3), Rat(-1, 4)};
        for (long m = 1; m <= 4; ++m)
            CHECK(series.term(NovKey{{}, m}).coeff.at(-1).parts.at("c1") == expect[m - 1]);
    }
    {
        auto r = run_cli("detdeg --surface P2 --u 0,0,1 --beta 0,1,2");
        CHECK(r.code == 0);
        CHECK(r.out == "{\"degree\":\"0\"}\n");
    }
    {
        auto r = run_cli("--format table walls --degree 2");
        CHECK(r.code == 0);
        CHECK(r.out == "walls[0] = 1\nwalls[1] = 1/2\n");
    }
}

TEST_CASE("stability and length subcommands") {
    std::string graph = write_fixture("graph.json", R"({
        "vertices": [{"genus": 2, "d": 3, "markings": 0,
                      "base_points": [{"length": "2", "on_special": false}]}],
        "edges": []
    })");
    {
        auto r = run_cli("stability --graph " + graph + " --epsilon 2/5");
        CHECK(r.code == 0);
        CHECK(json::parse(r.out)["stable"] == true);
    }
    {
        auto r = run_cli("stability --graph " + graph + " --epsilon inf");
        CHECK(json::parse(r.out)["stable"] == false);
    }
    {
        // wall value rejected with exit code 1
        auto r = run_cli("stability --graph " + graph + " --epsilon 1/2");
        CHECK(r.code == 1);
    }

    std::string sub = write_fixture("subscheme.json", R"({
        "graph": {"vertices": [{"genus": 2, "d": 1, "markings": 0, "base_points": []}], "edges": []},
        "flat": true,
        "vertical": [{"deg": "1", "chi": "0", "chi_int": "-1"}],
        "tails": []
    })");
    {
        auto r = run_cli("stability --subscheme " + sub + " --m 1 --epsilon 2/5");
        CHECK(r.code == 0);
        CHECK(json::parse(r.out)["stable"] == true);
    }
    {
        auto r = run_cli("stability --subscheme " + sub + " --m 1 --epsilon 2/3");
        CHECK(json::parse(r.out)["stable"] == false);
    }

    std::string ledger = write_fixture("ledger.json", R"([
        {"rk": "0", "deg": "0", "chi": "-1"},
        {"rk": "0", "deg": "0", "chi": "-1"}
    ])");
    {
        auto r = run_cli("length --surface P2 --v 1,0,-2 --ledger " + ledger);
        CHECK(r.code == 0);
        auto j = json::parse(r.out);
        CHECK(j["length"] == "2");
        CHECK(j["L1C"] == "0");
        CHECK(j["m0"] == "1");
    }
}

TEST_CASE("round trips") {
    // bracket series: emitted json is accepted back and re-emits identically
    BracketSeries F(1, {2}, {4, 3});
    F.add(Bracket(1, NovKey{{1}, 1},
                  {Insertion::t_slot(), Insertion::cls("D", 2), Insertion::cls("E", 0)}),
          NovKey{{0}, 1}, Rat(7, 3));
    F.add(Bracket(0, NovKey{{0}, 2}, std::vector<Insertion>(3, Insertion::t_slot())), F.zero_key(),
          Rat(-1, 2));
    auto j = bracket_series_to_json(F);
    CHECK(bracket_series_from_json(j) == F);
    CHECK(canonical_dump(bracket_series_to_json(bracket_series_from_json(j))) == canonical_dump(j));

    // through the CLI: substituting mu = 0 returns the input verbatim
    std::string series = write_fixture("series.json", canonical_dump(j));
    std::string mu = write_fixture("mu.json",
                                   R"({"order": {"gamma_max": 4, "y_max": 3}, "ample": [2], "terms": []})");
    auto r = run_cli("wallcross substitute --series " + series + " --mu " + mu);
    CHECK(r.code == 0);
    CHECK(r.out == canonical_dump(j) + "\n");

    // graph round trip
    QuasimapGraph g;
    g.vertices.push_back({1, 2, 1, {{Rat(3, 2), false}}});
    g.vertices.push_back({0, 1, 0, {}});
    g.edges.push_back({0, 1});
    CHECK(canonical_dump(graph_to_json(graph_from_json(graph_to_json(g)))) ==
          canonical_dump(graph_to_json(g)));
}

TEST_CASE("error codes") {
    CHECK(run_cli("walls").code == 1);                                           // missing option
    CHECK(run_cli("vdim --surface NoSuch --gamma 1").code == 1);                 // bad preset
    CHECK(run_cli("vdim --surface P2 --gamma 1.5").code == 1);                   // float token
    CHECK(run_cli("vdim --surface P2 --gamma 1 --v 1/2,0,0").code == 2);         // internal: fractional vdim
    CHECK(run_cli("ifunc --surface P2 --n 0 --order 3").code == 1);
}

TEST_CASE("determinism: byte-identical output across runs and job counts") {
    std::string inst = write_fixture("instances.json", R"({
        "surface": "P2",
        "components": [{"genus": 1, "k": 1}, {"genus": 2, "k": 1}],
        "node": "separating",
        "K": [1, 1],
        "instances": [
            {"F": {"rk": "2", "deg_f": "1", "kF": ["3", "-2"]},
             "G": {"rk": "1", "deg_f": "1", "kF": ["0", "5"]},
             "G2": {"rk": "2", "deg_f": "2", "kF": ["-4", "1"]}},
            {"F": {"rk": "2", "deg_f": "0", "kF": ["1", "1"]},
             "G": {"rk": "1", "deg_f": "1", "kF": ["2", "0"]},
             "G2": {"rk": "1", "deg_f": "2", "kF": ["0", "-3"]}}
        ]
    })");
    std::vector<std::string> cmds{
        "walls --degree 5",
        "ifunc --surface dP3 --n 2 --order 6",
        "wallcross delpezzo --surface P2 --g 0 --N 3 --gamma 2 --order 5",
        "appendixa --file " + inst + " --jobs 1",
    };
    for (const auto& cmd : cmds) {
        auto first = run_cli(cmd);
        CHECK(first.code == 0);
        for (int rep = 0; rep < 2; ++rep) {
            auto again = run_cli(cmd);
            CHECK(again.code == 0);
            CHECK(again.out == first.out);
        }
    }
    auto j1 = run_cli("appendixa --file " + inst + " --jobs 1");
    auto j4 = run_cli("appendixa --file " + inst + " --jobs 4");
    CHECK(j1.code == 0);
    CHECK(j4.code == 0);
    CHECK(j1.out == j4.out);

    // no floating-point token in any emitted output: no digit is
    // followed by '.' or by an exponent marker
    for (const auto& cmd : cmds) {
        auto out = run_cli(cmd).out;
        bool has_float = false;
        for (std::size_t i = 0; i + 1 < out.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(out[i]))) continue;
            char c = out[i + 1];
            if (c == '.') has_float = true;
            if ((c == 'e' || c == 'E') && i + 2 < out.size() &&
                (std::isdigit(static_cast<unsigned char>(out[i + 2])) || out[i + 2] == '+' ||
                 out[i + 2] == '-'))
                has_float = true;
        }
        CHECK_FALSE(has_float);
    }
}

TEST_CASE("dtpt through the CLI") {
    json cfg;
    cfg["g"] = 2;
    cfg["n_compare"] = 1;
    cfg["y_max"] = 1;
    cfg["betas_m"] = {0, 1};
    cfg["labels"] = json::array({json::array({"D", 2}), json::array({"E", 2})});
    auto scalar = [&](std::map<long, std::pair<std::string, Rat>> terms) {
        NovikovSeries s(0, {}, {0, 1});
        for (auto& [m, lc] : terms)
            s.add(NovKey{{}, m}, ZLaurent::single(0, LinComb::single(lc.first, lc.second)));
        return series_to_json(s);
    };
    cfg["I0"] = scalar({{0, {"1", Rat(1)}}, {1, {"1", Rat(2)}}});
    cfg["I1"] = scalar({{1, {"D", Rat(1)}}});
    cfg["I0s"] = scalar({{0, {"1", Rat(1)}}});
    cfg["I1s"] = scalar({{1, {"E", Rat(3)}}});
    std::string file = write_fixture("dtpt.json", canonical_dump(cfg));
    auto r = run_cli("wallcross dtpt --file " + file);
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["ok"] == true);

    cfg["g"] = 1;
    std::string bad = write_fixture("dtpt_bad.json", canonical_dump(cfg));
    CHECK(run_cli("wallcross dtpt --file " + bad).code == 1);
}
