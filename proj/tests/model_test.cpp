#include <doctest.h>

#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/model.hpp"
#include "blowup/profile.hpp"

using namespace blowup;

TEST_CASE("derive_params closed forms") {
    SUBCASE("regional point has zero similarity exponent") {
        const auto d = derive_params({0.2, 1.2, 0.0});
        CHECK(std::abs(d.beta) <= 1e-15);
        CHECK(std::abs(d.beta_tilde) < 1e-15);
    }
    SUBCASE("linear limit has beta = 1/4 for every p") {
        for (double p : {1.0, 1.5, 2.0, 7.0}) CHECK(derive_params({0.0, p, 0.0}).beta == doctest::Approx(0.25));
    }
    SUBCASE("f_star") {
        // (p-1)^{-1/(p-1)} evaluated by hand: 0.2^{-5} = 3125.
        CHECK(*derive_params({0.2, 1.2, 0.0}).f_star == doctest::Approx(3125.0).epsilon(1e-13));
        for (double n : {0.0, 0.3, 2.0}) CHECK(*derive_params({n, 2.0, 0.0}).f_star == doctest::Approx(1.0));
    }
    SUBCASE("interface exponents") {
        const auto d = derive_params({0.5, 1.5, 0.0});
        CHECK(*d.mu_tw == doctest::Approx(8.0));
        CHECK(*d.mu_reg == doctest::Approx(10.0));
        CHECK_FALSE(derive_params({0.0, 2.0, 0.0}).mu_tw.has_value());
    }
    SUBCASE("tail fields only in the single-point regime") {
        CHECK_FALSE(derive_params({0.2, 1.2, 0.0}).gamma.has_value());
        CHECK_FALSE(derive_params({0.2, 1.1, 0.0}).nu.has_value());
        const auto d = derive_params({0.2, 1.5, 0.0});
        REQUIRE(d.gamma.has_value());
        CHECK(*d.gamma < 0.0);
        CHECK(*d.nu > 0.0);
        CHECK(*d.b0 > 0.0);
    }
    SUBCASE("p = 1 with n > 0 is rejected") { CHECK_THROWS_AS(derive_params({0.2, 1.0, 0.0}), DomainError); }
}

TEST_CASE("regime tag") {
    CHECK(ProblemParams{0.2, 1.2, 0.0}.regime() == Regime::regional);
    CHECK(ProblemParams{0.2, 1.5, 0.0}.regime() == Regime::single_point);
    CHECK(ProblemParams{0.2, 1.1, 0.0}.regime() == Regime::global);
    CHECK_THROWS_AS(ProblemParams({-0.1, 1.2, 0.0}).validate(), DomainError);
    CHECK_THROWS_AS(ProblemParams({0.2, 0.9, 0.0}).validate(), DomainError);
    CHECK_THROWS_AS(ProblemParams({0.2, 1.2, -1.0}).validate(), DomainError);
}

TEST_CASE("tail_exponents") {
    const auto t = tail_exponents({0.2, 1.5, 0.0}, 1.0);
    CHECK(t.gamma == doctest::Approx(-4.4 / 0.3));
    CHECK(t.nu == doctest::Approx(2.2 / 0.9));
    // b0 from the displayed bracket with beta = 0.3 / (4.4 * 0.5).
    const double beta = 0.3 / 4.4 / 0.5;
    const double b0 = std::cbrt(beta / (1.2 * std::pow(t.gamma * (t.gamma - 1.0), 0.2))) / t.nu;
    CHECK(t.b0 == doctest::Approx(b0).epsilon(1e-14));
    CHECK(tail_exponents({0.0, 2.0, 0.0}, 1.0).nu == doctest::Approx(4.0 / 3.0));
    CHECK(tail_exponents({0.2, 1.5, 0.0}, -2.0).b0 == doctest::Approx(tail_exponents({0.2, 1.5, 0.0}, 2.0).b0));
    CHECK_THROWS_AS(tail_exponents({0.2, 1.2, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(tail_exponents({0.2, 1.5, 0.0}, 0.0), DomainError);
}

TEST_CASE("P_k operators") {
    SUBCASE("P_0 is the identity") { CHECK(pk_apply(0, {{3.5, 1.0, 2.0}, 7.0}) == 3.5); }
    SUBCASE("P_1 of a constant") { CHECK(pk_apply(1, {{2.0, 0.0}, 4.5}) == doctest::Approx(9.0)); }
    SUBCASE("P_3 and P_4 match the explicit displays") {
        for (double mu : {-1.3, 0.0, 2.5, 6.0}) {
            const auto c3 = pk_coefficients(3, mu);
            CHECK(c3[0] == 1.0);
            CHECK(c3[1] == doctest::Approx(3.0 * (mu - 1.0)));
            CHECK(c3[2] == doctest::Approx(3.0 * mu * mu - 6.0 * mu + 2.0));
            CHECK(c3[3] == doctest::Approx(mu * (mu - 1.0) * (mu - 2.0)));
            const auto c4 = pk_coefficients(4, mu);
            CHECK(c4[1] == doctest::Approx(2.0 * (2.0 * mu - 3.0)));
            CHECK(c4[2] == doctest::Approx(6.0 * mu * mu - 18.0 * mu + 11.0));
            CHECK(c4[3] == doctest::Approx(2.0 * (2.0 * mu * mu * mu - 9.0 * mu * mu + 11.0 * mu - 3.0)));
            CHECK(c4[4] == doctest::Approx(mu * (mu - 1.0) * (mu - 2.0) * (mu - 3.0)));
        }
    }
    SUBCASE("short jet is rejected") { CHECK_THROWS_AS(pk_apply(3, {{1.0, 2.0, 3.0}, 1.0}), DomainError); }
}

TEST_CASE("final_time_profile") {
    const ProblemParams P{0.2, 1.5, 0.0};
    CHECK(final_time_profile(1.0, P, 1.0) == doctest::Approx(1.0));
    CHECK(final_time_profile(1.0, P, 2.0) == doctest::Approx(std::pow(2.0, -44.0 / 3.0)).epsilon(1e-12));
    CHECK(final_time_profile(1.0, P, -2.0) == final_time_profile(1.0, P, 2.0));
    CHECK(final_time_profile(2.0, P, 0.7) == doctest::Approx(2.0 * final_time_profile(1.0, P, 0.7)));
    CHECK_THROWS_AS(final_time_profile(1.0, P, 0.0), DomainError);
    CHECK_THROWS_AS(final_time_profile(1.0, {0.2, 1.2, 0.0}, 1.0), DomainError);
}

TEST_CASE("rescale_profile") {
    Profile f;
    f.mesh = Mesh::uniform(10.0, 101);
    f.params = {0.2, 1.5, 0.0};
    f.norm = Normalization::physical;
    f.bc = BoundaryKind::dirichlet_far;

    SUBCASE("zero maps to zero") {
        f.values.assign(f.mesh.size(), 0.0);
        const auto g = rescale_profile(f, ScaleDirection::forward, ScaleTarget::generic);
        for (double v : g.values) CHECK(v == 0.0);
    }
    SUBCASE("constant f_* becomes the unit equilibrium") {
        const double fs = *derive_params(f.params).f_star;
        f.values.assign(f.mesh.size(), fs);
        const auto g = rescale_profile(f, ScaleDirection::forward, ScaleTarget::generic);
        CHECK(g.norm == Normalization::scaled);
        for (std::size_t i = 0; i < g.values.size(); i += 10) CHECK(g.at(g.mesh.nodes[i]) == doctest::Approx(1.0));
    }
    SUBCASE("regional target needs p = n+1") {
        f.values.assign(f.mesh.size(), 1.0);
        CHECK_THROWS_AS(rescale_profile(f, ScaleDirection::forward, ScaleTarget::regional), DomainError);
    }
}
