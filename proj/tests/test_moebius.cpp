#include <catch2/catch_amalgamated.hpp>

#include "cuspdim/moebius.hpp"
#include "cuspdim/group.hpp"
#include "cuspdim/rng.hpp"

using namespace cuspdim;

static cplx unit(double t) { return {std::cos(t), std::sin(t)}; }

TEST_CASE("half-plane action") {
    RealMoebius P{1, 2, 0, 1};
    CHECK(apply(P, ExtendedPoint::infinity()).infinite);  // parabolic fixes infinity

    RealMoebius S{0, -1, 1, 0};
    CHECK(apply(S, ExtendedPoint::half_plane(0.0)).infinite);  // pole of the map

    RealMoebius G{1, 1, 1, 2};
    auto p = apply(G, ExtendedPoint::half_plane(0.0));
    CHECK_FALSE(p.infinite);
    CHECK(p.z.real() == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("group action law and model mismatch") {
    Rng rng(11);
    RealMoebius A{1, 2, 0, 1}, B{1, 0, 2, 1};
    for (int i = 0; i < 20; ++i) {
        cplx z(rng.uniform(-2, 2), rng.uniform(0.1, 3));
        auto lhs = apply(A, apply(B, ExtendedPoint::half_plane(z)));
        auto rhs = apply(A * B, ExtendedPoint::half_plane(z));
        CHECK(std::abs(lhs.z - rhs.z) < 1e-10);
    }
    CHECK_THROWS_AS(apply(to_disc(A), ExtendedPoint::half_plane(1.0)), model_mismatch);
    CHECK_THROWS_AS(apply(A, ExtendedPoint::disc_boundary(cplx(1, 0))), model_mismatch);
}

TEST_CASE("composition chains keep unit determinant") {
    Rng rng(5);
    std::vector<RealMoebius> gens{{1, 2, 0, 1}, {1, 0, 2, 1}, {1, -2, 0, 1}, {1, 0, -2, 1}};
    RealProduct prod;
    for (int i = 0; i < 64; ++i) {
        prod.push(gens[std::size_t(rng.uniform_int(4))]);
        const RealMoebius& m = prod.value;
        // once |ad|+|bc| is large, det-1 of any stored double matrix is only
        // defined up to conditioning; below that scale the drift bound applies
        double representable =
            32 * std::numeric_limits<double>::epsilon() * (std::abs(m.a * m.d) + std::abs(m.b * m.c));
        CHECK(std::abs(m.det() - 1.0) < std::max(1e-10, representable));
    }
    // in the measurable regime the strict bound holds through length 64
    RealProduct tame;
    for (int i = 0; i < 64; ++i) {
        tame.push(gens[std::size_t(i % 2)]);
        tame.push(gens[std::size_t(i % 2 + 2)]);  // alternate with inverses
        CHECK(std::abs(tame.value.det() - 1.0) < 1e-10);
    }
}

TEST_CASE("conjugation into the disc model") {
    CHECK(same_up_to_sign(to_disc(RealMoebius::identity()), DiscMoebius::identity()));

    DiscMoebius R = to_disc({0, -1, 1, 0});  // rotation by pi about i
    CHECK(same_up_to_sign(R, DiscMoebius{cplx(0, 1), 0}));

    DiscMoebius Pd = to_disc({1, 2, 0, 1});
    CHECK(same_up_to_sign(Pd, DiscMoebius{cplx(1, 1), cplx(0, 1)}));

    // phi(G z) = to_disc(G) phi(z) on random points
    Rng rng(7);
    RealMoebius G{1, 1, 1, 2};
    DiscMoebius F = to_disc(G);
    for (int i = 0; i < 20; ++i) {
        cplx z(rng.uniform(-2, 2), rng.uniform(0.1, 3));
        cplx lhs = cayley(apply(G, ExtendedPoint::half_plane(z)).z);
        cplx rhs = (F.alpha * cayley(z) + std::conj(F.beta)) / (F.beta * cayley(z) + std::conj(F.alpha));
        CHECK(std::abs(lhs - rhs) < 1e-10);
        CHECK(std::abs(F.unitarity_defect()) < 1e-12);
    }
}

TEST_CASE("conjugation is functorial up to sign") {
    Rng rng(3);
    std::vector<RealMoebius> gens{{1, 2, 0, 1}, {1, 0, 2, 1}, {1, 1, 1, 2}};
    for (int i = 0; i < 30; ++i) {
        const RealMoebius& G = gens[std::size_t(rng.uniform_int(3))];
        const RealMoebius& H = gens[std::size_t(rng.uniform_int(3))];
        CHECK(same_up_to_sign(to_disc(G * H), to_disc(G) * to_disc(H)));
    }
}

TEST_CASE("boundary derivative") {
    DiscMoebius rot{std::polar(1.0, 0.7), 0.0};
    CHECK(derivative_modulus(rot, unit(1.3)) == Catch::Approx(1.0));  // rotations are isometries

    DiscMoebius F{cplx(1, 1), cplx(0, 1)};
    CHECK(derivative_modulus(F, cplx(-1, 0)) == Catch::Approx(0.2).epsilon(1e-12));

    // chain rule against the inverse
    Rng rng(9);
    for (int i = 0; i < 20; ++i) {
        cplx xi = unit(rng.uniform(0, 2 * kPi));
        cplx img = apply_boundary(F, xi);
        CHECK(derivative_modulus(F, xi) * derivative_modulus(F.inverse(), img) ==
              Catch::Approx(1.0).epsilon(1e-10));
    }

    // multiplicative under composition
    DiscMoebius G = to_disc({1, 0, 2, 1});
    for (int i = 0; i < 20; ++i) {
        cplx xi = unit(rng.uniform(0, 2 * kPi));
        double lhs = derivative_modulus(F * G, xi);
        double rhs = derivative_modulus(F, apply_boundary(G, xi)) * derivative_modulus(G, xi);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("isometric circles") {
    DiscMoebius F{cplx(1, 1), cplx(0, 1)};
    auto I = isometric_circle(F);
    CHECK(std::abs(I.center - cplx(1, 1)) < 1e-12);
    CHECK(I.radius == Catch::Approx(1.0));

    auto Ii = isometric_circle(F.inverse());
    CHECK(std::abs(Ii.center - cplx(1, -1)) < 1e-12);
    CHECK(Ii.radius == Catch::Approx(I.radius));           // rho(F) = rho(F^{-1})
    CHECK(std::abs(std::abs(Ii.center) - std::abs(I.center)) < 1e-10);

    DiscMoebius G{cplx(std::sqrt(2.0), 0), cplx(1, 0)};
    auto Ig = isometric_circle(G);
    CHECK(std::abs(Ig.center - cplx(-std::sqrt(2.0), 0)) < 1e-12);
    CHECK(Ig.radius == Catch::Approx(1.0));

    CHECK_THROWS_AS(isometric_circle(DiscMoebius::identity()), no_isometric_circle);

    // F maps its own isometric circle onto the circle of the inverse
    for (int s = 0; s < 40; ++s) {
        double t = 2 * kPi * s / 40.0;
        cplx z = I.center + I.radius * unit(t);
        cplx img = (F.alpha * z + std::conj(F.beta)) / (F.beta * z + std::conj(F.alpha));
        CHECK(std::abs(std::abs(img - Ii.center) - Ii.radius) < 1e-9);
    }

    // |DF| = 1 exactly on the circle, < 1 outside the closed disc
    for (int s = 0; s < 16; ++s) {
        cplx on = I.center + I.radius * unit(0.4 * s);
        CHECK(std::abs(derivative_modulus(F, on) - 1.0) < 1e-9);
    }
    cplx outside = I.center + 1.5 * I.radius * unit(2.2);
    CHECK(derivative_modulus(F, outside) < 1.0);
}

TEST_CASE("denominators") {
    std::vector<RealMoebius> reps{RealMoebius::identity()};
    CHECK(denominator(RealMoebius::identity(), 0, reps) == 0.0);  // the point is infinity
    CHECK(denominator({0, -1, 1, 0}, 0, reps) == Catch::Approx(1.0));

    // right-multiplying by a conjugated parabolic stabilizer leaves D unchanged
    GroupPresentation g = builtin_gamma2();
    auto creps = g.cusp_reps();
    RealMoebius G{3, 2, 4, 3};
    REQUIRE(std::abs(G.det() - 1.0) < 1e-12);
    for (std::size_t k = 0; k < creps.size(); ++k) {
        RealMoebius trans{1, 2, 0, 1};  // translation by the cusp width
        RealMoebius P = creps[k] * trans * creps[k].inverse();
        CHECK(denominator(G * P, k, creps) == Catch::Approx(denominator(G, k, creps)).epsilon(1e-9));
    }
}

TEST_CASE("horoball images") {
    Horoball h1 = horoball_image({0, -1, 1, 0}, 1.0);
    CHECK_FALSE(h1.half_plane_marker);
    CHECK(h1.tangency.z.real() == Catch::Approx(0.0).margin(1e-15));
    CHECK(h1.diameter == Catch::Approx(1.0));

    Horoball h2 = horoball_image({1, 0, 2, 1}, 1.0);
    CHECK(h2.tangency.z.real() == Catch::Approx(0.5));
    CHECK(h2.diameter == Catch::Approx(0.25));

    CHECK(horoball_image({1, 2, 0, 1}, 1.0).half_plane_marker);
}

TEST_CASE("parabolic closed form") {
    // to_disc(z -> z+t) fixes phi(inf) = 1 with translation t
    for (double t : {2.0, -2.0, 6.0, 0.5}) {
        DiscMoebius F = to_disc({1, t, 0, 1});
        ParabolicData pd = parabolic_data(F);
        CHECK(std::abs(pd.fixed_point - cplx(1, 0)) < 1e-12);
        CHECK(pd.translation == Catch::Approx(t));
        CHECK(same_up_to_sign(parabolic_about(pd.fixed_point, pd.translation), F, 1e-12));
        // the closed-form power matches repeated multiplication
        DiscMoebius F5 = F * F * F * F * F;
        CHECK(same_up_to_sign(parabolic_power(pd, 5), F5, 1e-10));
    }
    CHECK_THROWS_AS(parabolic_data(to_disc({1, 1, 1, 2})), std::domain_error);  // hyperbolic
}
