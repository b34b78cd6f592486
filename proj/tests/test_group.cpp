#include <catch2/catch_amalgamated.hpp>

#include "cuspdim/group.hpp"
#include "cuspdim/group_io.hpp"
#include "cuspdim/rng.hpp"

#include <cstdio>
#include <set>

using namespace cuspdim;

static Letter by_label(const GroupPresentation& g, const std::string& s) {
    for (Letter a = 0; a < g.alphabet.size(); ++a)
        if (g.alphabet.label[a] == s) return a;
    FAIL("no such letter " << s);
    return -1;
}

TEST_CASE("gamma2 passes validation") {
    GroupPresentation g = builtin_gamma2();
    ValidationReport rep = validate(g);
    for (const auto& c : rep.checks) {
        INFO(c.name << " slack=" << c.slack << " " << c.note);
        if (c.applicable) CHECK(c.pass);
    }
    CHECK(rep.ok);
    CHECK(g.ford);  // sides of this polygon are the isometric circles

    // disc vertices are the images of inf, -1, 0, 1
    std::vector<cplx> expect{cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    for (cplx e : expect) CHECK(g.find_vertex(e) != nullptr);

    // cusp widths
    CHECK(g.cusps[0].width == Catch::Approx(2.0));
    CHECK(g.cusps[1].width == Catch::Approx(2.0));
    CHECK(g.cusps[2].width == Catch::Approx(2.0));
    CHECK(g.max_cusp_width() == Catch::Approx(2.0));
}

TEST_CASE("punctured torus passes validation") {
    GroupPresentation g = builtin_punctured_torus();
    ValidationReport rep = validate(g);
    for (const auto& c : rep.checks) {
        INFO(c.name << " slack=" << c.slack << " " << c.note);
        if (c.applicable) CHECK(c.pass);
    }
    CHECK(rep.ok);
    CHECK_FALSE(g.ford);  // sides pair correctly but are not isometric circles

    // commutator of the generators is parabolic
    Letter a = by_label(g, "a"), b = by_label(g, "b");
    RealMoebius K = g.gen_h[a] * g.gen_h[b] * g.gen_h[a].inverse() * g.gen_h[b].inverse();
    CHECK(std::abs(std::abs(K.trace()) - 2.0) < 1e-12);
    CHECK(g.cusps.size() == 1);
    CHECK(g.cusps[0].width == Catch::Approx(6.0));
}

TEST_CASE("corrupted presentations fail validation") {
    {
        GroupPresentation g = builtin_gamma2();
        Letter a = by_label(g, "a");
        g.gen_h[a] = g.gen_h[a] * g.gen_h[a];  // squared generator breaks the pairing
        g.gen_d[a] = to_disc(g.gen_h[a]);
        ValidationReport rep = validate(g);
        CHECK_FALSE(rep.ok);
        bool pairing_failed = false;
        for (const auto& c : rep.checks)
            if (c.name == "side_pairing_endpoints" && !c.pass) pairing_failed = true;
        CHECK(pairing_failed);
    }
    {
        GroupPresentation g = builtin_gamma2();
        g.alphabet.hat[0] = 0;  // hat no longer involutive
        ValidationReport rep = validate(g);
        CHECK_FALSE(rep.ok);
        bool alphabet_failed = false;
        for (const auto& c : rep.checks)
            if (c.name == "alphabet_involution" && !c.pass) alphabet_failed = true;
        CHECK(alphabet_failed);
    }
}

TEST_CASE("boundary action of generators") {
    for (const char* name : {"gamma2", "punctured_torus"}) {
        GroupPresentation g = builtin(name);
        for (Letter a = 0; a < g.alphabet.size(); ++a) {
            Letter ah = g.alphabet.hat[a];
            // endpoints plus 20 interior samples of the complement of [hat a]
            CHECK(std::abs(apply_boundary(g.gen_d[a], g.arc[ah].right) - g.arc[a].left) < 1e-10);
            for (int s = 1; s < 20; ++s) {
                double t = g.arc[ah].theta_right + g.arc[ah].width +
                           (2 * kPi - g.arc[ah].width) * s / 20.0;
                cplx img = apply_boundary(g.gen_d[a], cplx(std::cos(t), std::sin(t)));
                CHECK(g.locate(img) == a);
            }
        }
    }
}

TEST_CASE("vertex charts send vertices to infinity") {
    GroupPresentation g = builtin_gamma2();

    // the cusp at infinity carries the identity chart
    RealMoebius M = g.vertex_at_infinity_chart(ExtendedPoint::infinity());
    CHECK(apply(M, ExtendedPoint::infinity()).infinite);
    CHECK(std::abs(M.b) < 1e-12);
    CHECK(std::abs(M.c) < 1e-12);

    // the vertex at 0 maps to infinity under its chart
    RealMoebius M0 = g.vertex_at_infinity_chart(ExtendedPoint::half_plane(0.0));
    CHECK(apply(M0, ExtendedPoint::half_plane(0.0)).infinite);

    CHECK_THROWS_AS(g.vertex_at_infinity_chart(ExtendedPoint::half_plane(0.37)), std::domain_error);

    // torus: the chart straightens the two sides meeting at each vertex into
    // vertical half lines (constant real part along each side)
    GroupPresentation pt = builtin_punctured_torus();
    for (const auto& v : pt.vertices) {
        RealMoebius Mv = pt.vertex_at_infinity_chart(v.zeta);
        for (Letter a = 0; a < pt.alphabet.size(); ++a) {
            // sides through this vertex: arcs with an endpoint at v.xi
            for (cplx e : {pt.arc[a].left, pt.arc[a].right}) {
                if (std::abs(e - v.xi) > 1e-9) continue;
                cplx other = (std::abs(pt.arc[a].left - v.xi) < 1e-9) ? pt.arc[a].right : pt.arc[a].left;
                // sample the geodesic from v.xi to other in the half plane
                ExtendedPoint p1 = cayley_inverse(ExtendedPoint::disc(v.xi));
                ExtendedPoint p2 = cayley_inverse(ExtendedPoint::disc(other));
                double x_ref = 0;
                for (int s = 1; s <= 10; ++s) {
                    // points on the geodesic via its half-plane parameterization
                    double u1 = p1.infinite ? 1e8 : p1.z.real();
                    double u2 = p2.infinite ? 1e8 : p2.z.real();
                    double c = 0.5 * (u1 + u2), r = 0.5 * std::abs(u1 - u2);
                    double t = kPi * s / 11.0;
                    cplx zs = p1.infinite || p2.infinite
                                  ? cplx(std::min(u1, u2), s * 0.5)
                                  : cplx(c + r * std::cos(t), r * std::sin(t));
                    auto img = apply(Mv, ExtendedPoint::half_plane(zs));
                    REQUIRE_FALSE(img.infinite);
                    if (s == 1)
                        x_ref = img.z.real();
                    else
                        CHECK(std::abs(img.z.real() - x_ref) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("vertex classes per cusp") {
    GroupPresentation g2 = builtin_gamma2();
    std::set<int> classes;
    for (const auto& v : g2.vertices) classes.insert(v.cusp);
    CHECK(classes.size() == 3);

    GroupPresentation pt = builtin_punctured_torus();
    classes.clear();
    for (const auto& v : pt.vertices) classes.insert(v.cusp);
    CHECK(classes.size() == 1);

    // the chart data is consistent: vertex = B A_k inf
    for (const GroupPresentation& g : {g2, pt})
        for (const auto& v : g.vertices) {
            auto img = apply(v.B * g.cusps[v.cusp].rep, ExtendedPoint::infinity());
            if (v.zeta.infinite)
                CHECK(img.infinite);
            else
                CHECK(std::abs(img.z - v.zeta.z) < 1e-10);
        }
}

TEST_CASE("locate follows the right-open convention") {
    GroupPresentation g = builtin_gamma2();
    for (Letter a = 0; a < g.alphabet.size(); ++a) {
        CHECK(g.locate(g.arc[a].midpoint()) == a);
        CHECK(g.locate(g.arc[a].left) == a);                       // inf J belongs to J
        CHECK(g.locate(g.arc[a].right) == g.alphabet.successor(a));  // sup J to the successor
    }
}

TEST_CASE("group spec files round-trip") {
    const char* path = "gamma2_spec_test.json";
    {
        std::ofstream out(path);
        out << R"({
  "name": "gamma2_from_file",
  "hp_vertices": [null, -1.0, 0.0, 1.0],
  "sides": ["ah", "bh", "b", "a"],
  "letters": {
    "a": {"hat": "ah", "matrix": [1, 2, 0, 1]},
    "b": {"hat": "bh", "matrix": [1, 0, 2, 1]}
  },
  "cusps": [
    {"rep": [1, 0, 0, 1], "stabilizer": [1, 2, 0, 1]},
    {"rep": [0, -1, 1, 0], "stabilizer": [1, 0, 2, 1]},
    {"rep": [1, -1, 1, 0], "stabilizer": [-1, 2, -2, 3]}
  ],
  "vertex_charts": [
    {"B": [1, 0, 0, 1], "cusp": 0},
    {"B": [1, 0, -2, 1], "cusp": 2},
    {"B": [1, 0, 0, 1], "cusp": 1},
    {"B": [1, 0, 0, 1], "cusp": 2}
  ]
})";
    }
    GroupPresentation g = load_group_file(path);
    CHECK(g.name == "gamma2_from_file");
    CHECK(validate(g).ok);
    CHECK(g.cusps[2].width == Catch::Approx(2.0));
    std::remove(path);

    // non-unimodular matrices are rejected by the parser
    const char* bad = "bad_spec_test.json";
    {
        std::ofstream out(bad);
        out << R"({"name":"x","hp_vertices":[null,-1.0,0.0,1.0],"sides":["ah","bh","b","a"],
 "letters":{"a":{"hat":"ah","matrix":[2,2,0,1]},"b":{"hat":"bh","matrix":[1,0,2,1]}},
 "cusps":[{"rep":[1,0,0,1],"width":2.0}],
 "vertex_charts":[{"B":[1,0,0,1],"cusp":0},{"B":[1,0,0,1],"cusp":0},
                  {"B":[1,0,0,1],"cusp":0},{"B":[1,0,0,1],"cusp":0}]})";
    }
    CHECK_THROWS(load_group_file(bad));
    std::remove(bad);
}

TEST_CASE("unknown builtin") {
    CHECK_THROWS_AS(builtin("nope"), std::invalid_argument);
}
