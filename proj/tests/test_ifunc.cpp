#include <catch2/catch_amalgamated.hpp>

#include "qwall/ifunc.hpp"

using namespace qwall;

namespace {

// independent polynomial route: multiply out prod_{j=0}^{m-1} (-jz + c1)
// with plain coefficient loops, coefficients of z^a c1^b in a table
std::map<std::pair<long, int>, Rat> numerator_table(long m) {
    std::map<std::pair<long, int>, Rat> cur{{{0, 0}, Rat(1)}};
    for (long j = 0; j < m; ++j) {
        std::map<std::pair<long, int>, Rat> next;
        for (const auto& [key, c] : cur) {
            auto [za, cb] = key;
            next[{za + 1, cb}] += c * Rat(-j);
            if (cb + 1 < 3) next[{za, cb + 1}] += c;
        }
        cur.clear();
        for (const auto& [k, c] : next)
            if (c != 0) cur[k] = c;
    }
    return cur;
}

} // namespace

TEST_CASE("torus weights") {
    auto d1 = def_weights(1);
    REQUIRE(d1.size() == 1);
    CHECK(d1[0].z_multiple == 1);
    CHECK(d1[0].shift == CPoly{Rat(0), Rat(0), Rat(0)});
    auto d3 = def_weights(3);
    REQUIRE(d3.size() == 3);
    CHECK(d3[2].z_multiple == 3);

    auto o1 = obs_weights(1);
    REQUIRE(o1.size() == 1);
    CHECK(o1[0].z_multiple == 0);
    CHECK(o1[0].shift == CPoly{Rat(0), Rat(1), Rat(0)});
    auto o2 = obs_weights(2);
    REQUIRE(o2.size() == 2);
    CHECK(o2[0].z_multiple == -1);
    CHECK(o2[1].z_multiple == 0);
    for (long m = 1; m <= 9; ++m) CHECK(obs_weights(m).size() == static_cast<std::size_t>(m));

    CHECK_THROWS_AS(def_weights(0), input_error);
    CHECK_THROWS_AS(obs_weights(0), input_error);
}

TEST_CASE("euler_ratio closed form") {
    auto p2 = SurfaceModel::p2();
    {
        auto e1 = euler_ratio(1, p2); // c1 / z
        REQUIRE(e1.size() == 1);
        CHECK(e1.at(-1) == CPoly{Rat(0), Rat(1), Rat(0)});
    }
    {
        auto e2 = euler_ratio(2, p2); // -c1/(2z) + c1^2/(2z^2)
        REQUIRE(e2.size() == 2);
        CHECK(e2.at(-1) == CPoly{Rat(0), Rat(-1, 2), Rat(0)});
        CHECK(e2.at(-2) == CPoly{Rat(0), Rat(0), Rat(1, 2)});
    }
    // residue law: c1-linear z^-1 coefficient is (-1)^(m-1)/m
    for (long m = 1; m <= 12; ++m) {
        auto e = euler_ratio(m, p2);
        CHECK(e.at(-1)[1] == Rat((m % 2 == 1) ? 1 : -1, m));
        CHECK(e.at(-1)[0] == 0); // no scalar part anywhere
        for (const auto& [z, c] : e) CHECK(c[0] == 0);
    }
    CHECK(euler_ratio(5, p2).at(-1)[1] == Rat(1, 5));

    // multiply-back: euler_ratio(m) * m! z^m == prod (-jz + c1), via the
    // independent table route
    for (long m = 1; m <= 12; ++m) {
        auto e = euler_ratio(m, p2);
        Rat mfact = 1;
        for (long j = 2; j <= m; ++j) mfact *= j;
        auto expect = numerator_table(m);
        std::map<std::pair<long, int>, Rat> got;
        for (const auto& [z, c] : e)
            for (int b = 0; b < 3; ++b)
                if (c[b] != 0) got[{z + m, b}] = c[b] * mfact;
        CHECK(got == expect);
    }
}

TEST_CASE("assembled perverse I-function") {
    auto p2 = SurfaceModel::p2();
    auto basis = hilb_basis();

    for (long order : {1L, 4L, 12L}) {
        auto I = I_sharp_n1(p2, order);
        // I_0 = 1: the only z^0 content is the identity at q^0
        CHECK(I.term(I.zero_key()) == ZLaurent::unit());
        for (const auto& [k, z] : I.terms) {
            if (k == I.zero_key()) continue;
            for (const auto& [zpow, lin] : z.coeff) CHECK(zpow <= -1);
        }
        // I_1 = log(1+y) c1 exactly
        auto expected = nov_scale(log1p_series(order), Rat(1));
        for (long m = 1; m <= order; ++m) {
            auto lin = I.term(NovKey{{}, m}).coeff.count(-1)
                           ? I.term(NovKey{{}, m}).coeff.at(-1)
                           : LinComb{};
            LinComb want;
            want.add("c1", expected.term(NovKey{{}, m}).coeff.at(0).parts.at("1"));
            CHECK(lin == want);
        }
    }

    // I_1 coefficient of y^2 is -1/2 . c1
    auto I = I_sharp_n1(p2, 4);
    CHECK(I.term(NovKey{{}, 2}).coeff.at(-1) == LinComb::single("c1", Rat(-1, 2)));

    // mu = [zI - z]_+ has only z^0 content (semi-positive shape)
    auto mu = mu_from_I(I);
    for (const auto& [k, z] : mu.terms)
        for (const auto& [zpow, lin] : z.coeff) CHECK(zpow == 0);
    CHECK(mu.term(NovKey{{}, 3}).coeff.at(0) == LinComb::single("c1", Rat(1, 3)));

    // z^(<= -2) truncation carries exactly the c1^2 residues
    auto tail = truncate_z_le(I, -2);
    for (const auto& [k, z] : tail.terms)
        for (const auto& [zpow, lin] : z.coeff)
            for (const auto& [label, c] : lin.parts) CHECK(label == "c1sq");

    // every del Pezzo preset works; a non-del-Pezzo model is rejected
    for (int k = 1; k <= 8; ++k) CHECK_NOTHROW(I_sharp_n1(SurfaceModel::dp(k), 3));
    CHECK_NOTHROW(I_sharp_n1(SurfaceModel::p1xp1(), 3));
    CHECK_THROWS_AS(I_sharp_n1(SurfaceModel::abstract_rho1(Int(1), Rat(3), Rat(1)), 3),
                    input_error);

    (void)basis;
}

TEST_CASE("I_sharp for S^[n]") {
    auto p2 = SurfaceModel::p2();
    // n = 2, order 4: I_1 = (y - y^2/2 + y^3/3 - y^4/4) c1Sn
    auto I2 = I_sharp_hilbn(2, p2, 4);
    std::vector<Rat> coeffs{Rat(1), Rat(-1, 2), Rat(1, 3), Rat(-1, 4)};
    for (long m = 1; m <= 4; ++m)
        CHECK(I2.term(NovKey{{}, m}).coeff.at(-1) == LinComb::single("c1Sn", coeffs[m - 1]));

    // n = 1 reduces to the surface-level series
    auto I1 = I_sharp_hilbn(1, p2, 4);
    CHECK(I1 == I_sharp_n1(p2, 4));

    // no component on any label dual to the exceptional class: the z^-1
    // part is purely c1Sn
    for (long n = 2; n <= 4; ++n) {
        auto I = I_sharp_hilbn(n, p2, 6);
        for (const auto& [k, z] : I.terms) {
            if (k == I.zero_key()) continue;
            if (!z.coeff.count(-1)) continue;
            for (const auto& [label, c] : z.coeff.at(-1).parts) CHECK(label == "c1Sn");
        }
    }
    CHECK_THROWS_AS(I_sharp_hilbn(0, p2, 3), input_error);
}
