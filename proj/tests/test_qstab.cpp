#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "helpers.hpp"
#include "qwall/qstab.hpp"

using namespace qwall;

namespace {

QuasimapGraph one_vertex(long genus, long d, long markings = 0,
                         std::vector<BasePoint> bps = {}) {
    QuasimapGraph g;
    g.vertices.push_back({genus, d, markings, std::move(bps)});
    return g;
}

// main vertex of genus 2 with a rational tail of degree d attached
QuasimapGraph with_tail(long d) {
    QuasimapGraph g;
    g.vertices.push_back({2, 0, 0, {}});
    g.vertices.push_back({0, d, 0, {}});
    g.edges.push_back({0, 1});
    return g;
}

// The enumerated family used by the chamber-constancy checks: genuine
// quasimap combinatorics only, i.e. base-point lengths integral and at
// most the component degree (lengths are L_beta-degree drops, part of
// d_v), and no (g, N) = (0, 0) domains.
std::vector<QuasimapGraph> graph_family() {
    std::vector<QuasimapGraph> out;
    for (long genus = 0; genus <= 2; ++genus)
        for (long d = 0; d <= 4; ++d)
            for (long marks = 0; marks <= 2; ++marks) {
                if (genus == 0 && marks == 0) continue; // unstable (0,0) domain
                out.push_back(one_vertex(genus, d, marks));
                for (long ell = 1; ell <= std::min(3L, d); ++ell)
                    out.push_back(one_vertex(genus, d, marks, {{Rat(ell), false}}));
            }
    for (long g1 = 0; g1 <= 1; ++g1)
        for (long d1 = 0; d1 <= 3; ++d1)
            for (long d2 = 0; d2 <= 3; ++d2)
                for (long marks = 0; marks <= 1; ++marks) {
                    QuasimapGraph g;
                    g.vertices.push_back({g1, d1, marks, {}});
                    g.vertices.push_back({0, d2, 0, {}});
                    g.edges.push_back({0, 1});
                    out.push_back(g);
                    if (d1 >= 2) {
                        QuasimapGraph h = g;
                        h.vertices[0].base_points.push_back({Rat(2), false});
                        out.push_back(h);
                    }
                    if (d1 >= 1 && d2 >= 1) {
                        QuasimapGraph h = g;
                        h.vertices[1].base_points.push_back({Rat(1), false});
                        out.push_back(h);
                    }
                }
    for (long genus = 0; genus <= 1; ++genus)
        for (long d = 0; d <= 3; ++d) {
            QuasimapGraph g = one_vertex(genus, d);
            g.edges.push_back({0, 0}); // non-separating node
            out.push_back(g);
        }
    return out;
}

std::vector<Rat> chamber_samples(long chamber, long total_degree, int count = 10) {
    // chamber c lies between walls 1/(d-c+1) and 1/(d-c), with the open
    // ends (0, 1/d) and (1, infinity)
    Rat lo = (chamber == 0) ? Rat(1, 100 * (total_degree + 1)) : Rat(1, total_degree - chamber + 1);
    bool unbounded = chamber == total_degree;
    std::vector<Rat> s;
    for (int i = 1; i <= count; ++i) {
        if (unbounded)
            s.push_back(Rat(1) + Rat(i, 7));
        else
            s.push_back(lo + (Rat(1, total_degree - chamber) - lo) * Rat(i, count + 1));
    }
    return s;
}

} // namespace

TEST_CASE("prestability") {
    CHECK(is_prestable(one_vertex(1, 2)));
    CHECK(is_prestable(one_vertex(0, 2, 1, {{Rat(1), false}})));
    CHECK_FALSE(is_prestable(one_vertex(0, 2, 1, {{Rat(1), true}})));
    QuasimapGraph disconnected;
    disconnected.vertices.push_back({0, 0, 3, {}});
    disconnected.vertices.push_back({0, 0, 3, {}});
    CHECK_THROWS_AS(is_prestable(disconnected), input_error);
}

TEST_CASE("epsilon stability on frozen examples") {
    // smooth genus-2 curve, nothing else: stable for every epsilon
    auto g2 = one_vertex(2, 0);
    CHECK(is_epsilon_stable(g2, Epsilon::zero_plus()).stable);
    CHECK(is_epsilon_stable(g2, Epsilon::infinity()).stable);
    CHECK(is_epsilon_stable(g2, Epsilon::finite(Rat(7, 2))).stable);

    // rational tail of degree d: stable iff eps d > 1
    for (long d = 1; d <= 4; ++d) {
        auto g = with_tail(d);
        CHECK_FALSE(is_epsilon_stable(g, Epsilon::zero_plus()).stable);
        CHECK(is_epsilon_stable(g, Epsilon::infinity()).stable);
        CHECK(is_epsilon_stable(g, Epsilon::finite(Rat(3, 2))).stable); // eps d >= 3/2 > 1
        if (d >= 2) CHECK_FALSE(is_epsilon_stable(g, Epsilon::finite(Rat(1, 2 * d))).stable);
    }

    // base point of length ell = d on an otherwise stable curve
    for (long d = 2; d <= 4; ++d) {
        auto g = one_vertex(2, d, 0, {{Rat(d), false}});
        CHECK(is_epsilon_stable(g, Epsilon::zero_plus()).stable);
        CHECK_FALSE(is_epsilon_stable(g, Epsilon::infinity()).stable);
        Rat below = Rat(1, d) - Rat(1, 100 * d); // eps <= 1/d side, off the wall
        CHECK(is_epsilon_stable(g, Epsilon::finite(below)).stable);
        Rat above = Rat(1, d) + Rat(1, 100 * d);
        CHECK_FALSE(is_epsilon_stable(g, Epsilon::finite(above)).stable);
    }

    // walls rejected
    auto g = one_vertex(2, 3);
    CHECK_THROWS_AS(is_epsilon_stable(g, Epsilon::finite(Rat(1, 2))), input_error);
    CHECK_THROWS_AS(is_epsilon_stable(g, Epsilon::finite(Rat(1))), input_error);
    CHECK(is_epsilon_stable(g, Epsilon::finite(Rat(1, 4))).stable);

    // prestability is a precondition
    CHECK_THROWS_AS(is_epsilon_stable(one_vertex(2, 1, 0, {{Rat(1), true}}), Epsilon::zero_plus()),
                    input_error);
}

TEST_CASE("walls and chambers") {
    CHECK(walls(1) == std::vector<Rat>{Rat(1)});
    CHECK(walls(3) == std::vector<Rat>{Rat(1), Rat(1, 2), Rat(1, 3)});
    CHECK(walls(0).empty());

    CHECK(chamber_of(Rat(2), 3) == 3);       // adjacent to infinity
    CHECK(chamber_of(Rat(2, 5), 3) == 1);    // (1/3, 1/2), bisect oracle
    CHECK(chamber_of(Rat(1, 10), 3) == 0);   // adjacent to 0+
    CHECK_THROWS_AS(chamber_of(Rat(1, 2), 3), input_error);

    // oracle: sort walls and bisect
    for (long d = 1; d <= 6; ++d) {
        auto w = walls(d);
        for (int num = 1; num <= 20; ++num)
            for (int den = 1; den <= 7; ++den) {
                Rat e(num, den);
                if (is_wall(e, d)) continue;
                long below = 0;
                for (const auto& x : w)
                    if (x < e) ++below;
                CHECK(chamber_of(e, d) == below);
            }
    }
}

TEST_CASE("chamber constancy over the enumerated family") {
    auto family = graph_family();
    REQUIRE(family.size() >= 200);
    for (const auto& g : family) {
        if (!is_prestable(g)) continue;
        long d = g.total_degree();
        if (d > 6) continue;
        for (long chamber = 0; chamber <= d; ++chamber) {
            auto samples = chamber_samples(chamber, d);
            bool first = is_epsilon_stable(g, Epsilon::finite(samples[0])).stable;
            for (const auto& e : samples) {
                REQUIRE(chamber_of(e, d) == chamber);
                CHECK(is_epsilon_stable(g, Epsilon::finite(e)).stable == first);
            }
        }
    }
}

TEST_CASE("extremal chambers: 0+ forbids tails, infinity forbids base points") {
    auto family = graph_family();
    for (const auto& g : family) {
        if (!is_prestable(g)) continue;
        bool has_tail = false;
        for (std::size_t i = 0; i < g.vertices.size(); ++i)
            if (g.vertices[i].genus == 0 &&
                2 * g.vertices[i].genus - 2 + g.special_points(static_cast<int>(i)) < 0)
                has_tail = true;
        bool has_bp = false;
        for (const auto& v : g.vertices) has_bp |= !v.base_points.empty();

        if (has_tail) CHECK_FALSE(is_epsilon_stable(g, Epsilon::zero_plus()).stable);
        if (has_bp) CHECK_FALSE(is_epsilon_stable(g, Epsilon::infinity()).stable);

        // monotone trade-off across the whole epsilon line
        auto all_eps = [&] {
            std::vector<Epsilon> es{Epsilon::zero_plus(), Epsilon::infinity()};
            for (long c = 0; c <= g.total_degree(); ++c)
                for (const auto& e : chamber_samples(c, g.total_degree(), 3))
                    es.push_back(Epsilon::finite(e));
            return es;
        }();
        if (is_epsilon_stable(g, Epsilon::zero_plus()).stable && !has_bp)
            for (const auto& e : all_eps) CHECK(is_epsilon_stable(g, e).stable);
        if (is_epsilon_stable(g, Epsilon::infinity()).stable && !has_tail)
            for (const auto& e : all_eps) CHECK(is_epsilon_stable(g, e).stable);
    }
}

TEST_CASE("virtual dimension") {
    auto p2 = SurfaceModel::p2();
    auto q = SurfaceModel::p1xp1();
    auto dp3 = SurfaceModel::dp(3);

    auto mk_beta = [](Rat rk_d, RatVec c1_d, Rat pt_d) { return DegreeClass{rk_d, c1_d, pt_d}; };

    // hand-derived fixture table
    struct Row {
        const SurfaceModel& s;
        ChernVector v;
        DegreeClass beta;
        long g, N, dimM;
        long expect;
    };
    std::vector<Row> table{
        {p2, {Rat(1), {Rat(0)}, Rat(-2)}, mk_beta(Rat(0), {Rat(-1)}, Rat(-1)), 0, 3, 4, 7},
        {p2, {Rat(1), {Rat(0)}, Rat(-2)}, mk_beta(Rat(0), {Rat(0)}, Rat(0)), 1, 0, 4, 0},
        {p2, {Rat(1), {Rat(0)}, Rat(-3)}, mk_beta(Rat(0), {Rat(-2)}, Rat(0)), 0, 0, 6, 9},
        {p2, {Rat(1), {Rat(0)}, Rat(-3)}, mk_beta(Rat(0), {Rat(-2)}, Rat(0)), 2, 0, 6, 3},
        {p2, {Rat(1), {Rat(0)}, Rat(-1)}, mk_beta(Rat(0), {Rat(0)}, Rat(-5)), 0, 2, 2, 1},
        {p2, {Rat(2), {Rat(1)}, Rat(0)}, mk_beta(Rat(-1), {Rat(-1)}, Rat(0)), 0, 0, 5, 5},
        {q, {Rat(1), {Rat(0), Rat(0)}, Rat(-2)}, mk_beta(Rat(0), {Rat(-1), Rat(0)}, Rat(-1)), 0, 1, 4, 4},
        {q, {Rat(1), {Rat(0), Rat(0)}, Rat(-2)}, mk_beta(Rat(0), {Rat(-1), Rat(-1)}, Rat(0)), 1, 2, 4, 6},
        {p2, {Rat(3), {Rat(0)}, Rat(0)}, mk_beta(Rat(0), {Rat(-1)}, Rat(0)), 0, 0, 7, 13},
        {p2, {Rat(1), {Rat(0)}, Rat(-2)}, mk_beta(Rat(0), {Rat(-1)}, Rat(0)), 3, 0, 4, 1},
        {p2, {Rat(2), {Rat(0)}, Rat(0)}, mk_beta(Rat(-2), {Rat(0)}, Rat(0)), 0, 5, 3, 5},
        {dp3, {Rat(1), {Rat(0), Rat(0), Rat(0), Rat(0)}, Rat(-2)},
         mk_beta(Rat(0), {Rat(0), Rat(-1), Rat(0), Rat(0)}, Rat(0)), 0, 0, 4, 2},
    };
    for (const auto& row : table)
        CHECK(vdim(row.v, row.beta, row.s, row.g, row.N, row.dimM) == row.expect);

    // vdim is independent of the point part (rk_d = 0 kills the second term)
    for (int m = 0; m <= 4; ++m) {
        auto b = mk_beta(Rat(0), {Rat(-1)}, Rat(-m));
        CHECK(vdim({Rat(1), {Rat(0)}, Rat(-2)}, b, p2, 0, 3, 4) == 7);
    }

    // linear in N, affine in g
    auto g = qwall::testing::rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        auto v = qwall::testing::rand_chern_int(g, p2, -3, 3);
        auto b = mk_beta(Rat(qwall::testing::rand_int(g, -2, 2)),
                         {Rat(qwall::testing::rand_int(g, -3, 3))},
                         Rat(qwall::testing::rand_int(g, -3, 3)));
        long dimM = 4;
        auto f = [&](long gg, long N) { return vdim(v, b, p2, gg, N, dimM); };
        CHECK(f(0, 3) - f(0, 2) == f(0, 8) - f(0, 7));
        CHECK(f(1, 0) - f(0, 0) == f(2, 0) - f(1, 0));
    }
}

TEST_CASE("subscheme-side stability bullets") {
    auto stable_graph = one_vertex(2, 1);

    // flat subscheme, no tails: stable at 0+
    SubschemeDatum flat{stable_graph, true, {}, {}};
    CHECK(hilb_conditions(flat, Epsilon::zero_plus(), Int(3)).stable);

    // vertical piece with m deg + chi - chi_int = 2: stable iff eps <= 1/2
    SubschemeDatum vert{stable_graph, true, {{Rat(1), Rat(0), Rat(-1)}}, {}};
    // with m = 1: 1*1 + 0 - (-1) = 2
    CHECK(hilb_conditions(vert, Epsilon::zero_plus(), Int(1)).stable);
    CHECK(hilb_conditions(vert, Epsilon::finite(Rat(2, 5)), Int(1)).stable);
    CHECK_FALSE(hilb_conditions(vert, Epsilon::finite(Rat(2, 3)), Int(1)).stable);
    CHECK_FALSE(hilb_conditions(vert, Epsilon::infinity(), Int(1)).stable);
    // the induced walls 1/1, 1/2 are rejected
    CHECK_THROWS_AS(hilb_conditions(vert, Epsilon::finite(Rat(1, 2)), Int(1)), input_error);

    // rational tail with m deg + chi = 1 at 1/eps = 1: strict inequality fails
    SubschemeDatum tail{stable_graph, true, {}, {{Rat(0), Rat(1)}}};
    CHECK_FALSE(hilb_conditions(tail, Epsilon::finite(Rat(1)), Int(2)).stable);
    CHECK(hilb_conditions(tail, Epsilon::finite(Rat(3, 2)), Int(2)).stable);
    CHECK_FALSE(hilb_conditions(tail, Epsilon::zero_plus(), Int(2)).stable);
    CHECK(hilb_conditions(tail, Epsilon::infinity(), Int(2)).stable);

    // flatness flag and the automorphism proxy
    SubschemeDatum nonflat{stable_graph, false, {}, {}};
    CHECK_FALSE(hilb_conditions(nonflat, Epsilon::zero_plus(), Int(1)).stable);
    SubschemeDatum autos{one_vertex(0, 0, 2), true, {}, {}};
    auto verdict = hilb_conditions(autos, Epsilon::zero_plus(), Int(1));
    CHECK_FALSE(verdict.stable);
    CHECK(verdict.diagnostics.size() == 1);

    // randomized sweep: at 0+ any flat datum with finite automorphisms
    // passes regardless of its vertical pieces, and any tail sinks it
    auto g = qwall::testing::rng(97);
    for (int trial = 0; trial < 100; ++trial) {
        SubschemeDatum d{one_vertex(qwall::testing::rand_int(g, 1, 2).convert_to<long>(),
                                    qwall::testing::rand_int(g, 0, 3).convert_to<long>()),
                         true,
                         {},
                         {}};
        long nvert = qwall::testing::rand_int(g, 0, 3).convert_to<long>();
        for (long i = 0; i < nvert; ++i)
            d.vertical.push_back({Rat(qwall::testing::rand_int(g, 0, 4)),
                                  Rat(qwall::testing::rand_int(g, -4, 4)),
                                  Rat(qwall::testing::rand_int(g, -4, 4))});
        CHECK(hilb_conditions(d, Epsilon::zero_plus(), Int(2)).stable);
        auto with_tail = d;
        with_tail.tails.push_back({Rat(qwall::testing::rand_int(g, 0, 4)),
                                   Rat(qwall::testing::rand_int(g, -4, 4))});
        CHECK_FALSE(hilb_conditions(with_tail, Epsilon::zero_plus(), Int(2)).stable);
    }
}
