#include <doctest.h>

#include <cmath>
#include <optional>

#include "causticfd/caustics.hpp"

using namespace causticfd;

namespace {

std::vector<CausticRoot> interior(const std::vector<CausticRoot>& roots) {
    std::vector<CausticRoot> out;
    for (const auto& r : roots) {
        if (r.kind == RootKind::interior) out.push_back(r);
    }
    return out;
}

// Lax: Vg = c / D with D = cos^2 + sigma^2 sin^2, so
// dVg/dphi = 2 c (1 - sigma^2) sin cos / D^2.
double lax_dvg_hand(double sigma, double phi) {
    const double s = std::sin(phi), c = std::cos(phi);
    const double d = c * c + sigma * sigma * s * s;
    return 2.0 * (1.0 - sigma * sigma) * s * c / (d * d);
}

// Stationary points of the Lax-Wendroff group velocity satisfy
//   -2 + s^2 + 3 s^4 - 4 s^4 cos phi + s^2 (s^2 - 1) cos 2 phi = 0,
// a quadratic in x = cos phi:
//   s^2 (s^2 - 1) x^2 - 2 s^4 x + (s^4 + s^2 - 1) = 0.
std::optional<double> lax_wendroff_interior_root(double sigma) {
    const double s2 = sigma * sigma;
    const double a = s2 * (s2 - 1.0), b = -2.0 * s2 * s2, c = s2 * s2 + s2 - 1.0;
    const double disc = b * b - 4.0 * a * c;
    for (double sign : {-1.0, 1.0}) {
        const double x = (-b + sign * std::sqrt(disc)) / (2.0 * a);
        if (x > -1.0 && x < 1.0) return std::acos(x);
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("group velocity derivative") {
    SUBCASE("lax increases towards pi/2 below unit CFL") {
        const auto prob = AdvectionProblem::from_sigma(1.0, 1.0, 0.7);
        const auto st = build_scheme(SchemeId::lax, prob);
        const double d = dvg_dphi(st, prob, M_PI / 4);
        CHECK(d > 0.0);
        CHECK(d == doctest::Approx(lax_dvg_hand(0.7, M_PI / 4)).epsilon(1e-10));
    }
    SUBCASE("lax at unit CFL is flat") {
        const auto prob = AdvectionProblem::from_sigma(1.0, 1.0, 1.0);
        const auto st = build_scheme(SchemeId::lax, prob);
        for (double phi : {0.2, 1.0, 2.0, 3.0}) CHECK(std::abs(dvg_dphi(st, prob, phi)) <= 1e-9);
    }
    SUBCASE("leapfrog at pi/2 is -c / sqrt(1 - sigma^2)") {
        // dVg/dphi = c sin phi (sigma^2 - 1) / (1 - sigma^2 sin^2 phi)^{3/2}
        const auto prob = AdvectionProblem::from_sigma(1.0, 1.0, 0.5);
        const auto st = build_scheme(SchemeId::leapfrog, prob);
        CHECK(dvg_dphi(st, prob, M_PI / 2) == doctest::Approx(-1.0 / std::sqrt(0.75)).epsilon(1e-10));
    }
}

TEST_CASE("lax caustic roots") {
    for (double sigma : {0.1, 0.3, 0.7, 0.9}) {
        const auto prob = AdvectionProblem::from_sigma(1.0, 1.0, sigma);
        const auto roots = find_caustic_roots(build_scheme(SchemeId::lax, prob), prob);
        REQUIRE(roots.size() == 3);
        CHECK(roots[0].kind == RootKind::trivial_boundary);
        CHECK(roots[0].phi_c == 0.0);
        CHECK(roots[0].u_c == doctest::Approx(1.0));
        CHECK(roots[0].extremum == Extremum::min);
        CHECK(roots[1].kind == RootKind::interior);
        CHECK(std::abs(roots[1].phi_c - M_PI / 2) <= 1e-7);
        CHECK(std::abs(roots[1].u_c - 1.0 / (sigma * sigma)) <= 1e-6);
        CHECK(roots[1].extremum == Extremum::max);
        CHECK(roots[2].kind == RootKind::trivial_boundary);
        CHECK(roots[2].u_c == doctest::Approx(1.0));
    }
}

TEST_CASE("leapfrog has only the trivial roots below unit CFL") {
    const auto prob = AdvectionProblem::from_sigma(1.0, 1.0, 0.5);
    const auto st = build_scheme(SchemeId::leapfrog, prob);
    for (int b = 0; b < 2; ++b) {
        const auto roots = find_caustic_roots(st, prob, b);
        REQUIRE(roots.size() == 2);
        CHECK(roots[0].phi_c == 0.0);
        CHECK(roots[1].phi_c == doctest::Approx(M_PI));
        const double sign = b == 0 ? 1.0 : -1.0;
        CHECK(roots[0].u_c == doctest::Approx(sign));
        CHECK(roots[1].u_c == doctest::Approx(-sign));
    }
}

TEST_CASE("lax-wendroff interior roots") {
    for (double sigma : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9, 0.95}) {
        const auto prob = AdvectionProblem::from_sigma(1.0, 1.0, sigma);
        const auto found = interior(find_caustic_roots(build_scheme(SchemeId::lax_wendroff, prob), prob));
        const auto expected = lax_wendroff_interior_root(sigma);
        CAPTURE(sigma);
        // A root exists iff 8 sigma^4 - 2 > 0, i.e. sigma > 1/sqrt(2).
        CHECK(expected.has_value() == (sigma > std::sqrt(0.5)));
        REQUIRE(found.size() == (expected ? 1u : 0u));
        if (expected) {
            CHECK(found[0].phi_c == doctest::Approx(*expected).epsilon(1e-9));
            CHECK(found[0].u_c == doctest::Approx(lax_wendroff_vg_arctan_form(sigma, *expected)).epsilon(1e-10));
            CHECK(found[0].extremum == Extremum::min);
        }
    }
}

TEST_CASE("constant group velocity yields no interior roots") {
    for (auto id : {SchemeId::lax, SchemeId::lax_wendroff}) {
        const auto prob = AdvectionProblem::from_sigma(1.0, 1.0, 1.0);
        const auto search = search_caustic_roots(build_scheme(id, prob), prob);
        CHECK(search.summary.flat);
        CHECK(search.summary.caustic_free());
        CHECK(search.summary.interior_roots == 0);
    }
    CHECK_THROWS_AS((void)find_caustic_roots(build_scheme(SchemeId::lax, AdvectionProblem{}), AdvectionProblem{}, 0, 32),
                    std::invalid_argument);
}

TEST_CASE("locus sweeps") {
    const auto base = AdvectionProblem::make(1.0, 1.0, 1.0);
    const SigmaGrid grid{0.1, 0.9, 0.1};
    REQUIRE(grid.values().size() == 9);
    CHECK(grid.values()[2] == 0.3);

    SUBCASE("lax") {
        const auto locus = sweep_locus(SchemeId::lax, base, grid);
        CHECK_FALSE(locus.caustic_free);
        CHECK(locus.slices.size() == 9);
        for (std::size_t i = 1; i < locus.roots.size(); ++i) {
            const auto& a = locus.roots[i - 1];
            const auto& b = locus.roots[i];
            CHECK((a.sigma < b.sigma || (a.sigma == b.sigma && a.phi_c < b.phi_c)));
        }
        for (double sigma : grid.values()) {
            int hits = 0;
            for (const auto& r : locus.roots) {
                if (r.sigma == doctest::Approx(sigma) && r.kind == RootKind::interior) {
                    ++hits;
                    CHECK(r.u_c * sigma * sigma == doctest::Approx(1.0).epsilon(1e-6));
                }
            }
            CHECK(hits == 1);
        }
    }
    SUBCASE("lax-wendroff has a non-empty interior locus") {
        const auto locus = sweep_locus(SchemeId::lax_wendroff, base, grid);
        CHECK_FALSE(locus.caustic_free);
        int interior_count = 0;
        for (const auto& r : locus.roots) interior_count += r.kind == RootKind::interior;
        CHECK(interior_count == 2);  // sigma = 0.8 and 0.9
    }
    SUBCASE("crank-nicolson variants: monotone but not constant") {
        for (auto id : {SchemeId::crank_nicolson_table1, SchemeId::crank_nicolson_standard}) {
            const auto locus = sweep_locus(id, base, grid);
            CAPTURE(to_string(id));
            CHECK(locus.caustic_free);
            CHECK_FALSE(locus.constant_vg);
            CHECK(locus.max_abs_dvg > 0.1);
        }
    }
    SUBCASE("unstable CFL needs opt-in") {
        CHECK_THROWS_AS((void)sweep_locus(SchemeId::lax, base, SigmaGrid{0.5, 1.5, 0.5}), std::invalid_argument);
        SweepOptions opt;
        opt.allow_unstable = true;
        CHECK_NOTHROW((void)sweep_locus(SchemeId::lax, base, SigmaGrid{0.5, 1.5, 0.5}, opt));
    }
    SUBCASE("leapfrog sweep reports both branches") {
        const auto locus = sweep_locus(SchemeId::leapfrog, base, grid);
        CHECK(locus.slices.size() == 18);
    }
}

TEST_CASE("crank-nicolson group velocity is c cos(phi) / (1 + sigma^2 sin^2(phi) / 4)") {
    // Both variants share G up to sign: G = -/+ (2 - i sigma sin) / (2 + i sigma sin).
    for (auto id : {SchemeId::crank_nicolson_table1, SchemeId::crank_nicolson_standard}) {
        const auto prob = AdvectionProblem::from_sigma(1.0, 1.0, 0.8);
        const auto st = build_scheme(id, prob);
        for (double phi : {0.5, 1.5, 2.5}) {
            const double s = std::sin(phi);
            const auto sample = dispersion_sample(st, prob, phi);
            CHECK(sample.v_group == doctest::Approx(std::cos(phi) / (1.0 + 0.16 * s * s)).epsilon(1e-12));
            CHECK(sample.amp_modulus == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("root invariants over the catalog") {
    const auto base = AdvectionProblem::make(1.0, 1.0, 1.0);
    for (auto id : {SchemeId::leapfrog, SchemeId::lax, SchemeId::lax_wendroff, SchemeId::crank_nicolson_standard,
                    SchemeId::crank_nicolson_table1}) {
        for (double sigma : SigmaGrid{0.1, 0.9, 0.1}.values()) {
            const auto prob = AdvectionProblem::from_sigma(base.c, base.h, sigma);
            const auto st = build_scheme(id, prob);
            for (int b = 0; b < branch_count(st); ++b) {
                CAPTURE(to_string(id));
                CAPTURE(sigma);
                const auto coarse = interior(find_caustic_roots(st, prob, b, 256));
                const auto fine = interior(find_caustic_roots(st, prob, b, 512));
                REQUIRE(coarse.size() == fine.size());
                for (std::size_t i = 0; i < coarse.size(); ++i) {
                    CHECK(std::abs(coarse[i].phi_c - fine[i].phi_c) <= 1e-8);
                    // idempotent verification
                    CHECK(std::abs(dvg_dphi(st, prob, coarse[i].phi_c, b)) <= root_tolerance);
                    CHECK(coarse[i].phi_c > 0.0);
                }
            }
        }
    }
}

TEST_CASE("caustic rays") {
    CausticRoot lax_root;
    lax_root.u_c = 1.0 / 0.49;
    CHECK(caustic_line(lax_root).position(2.0) == doctest::Approx(2.0 / 0.49));
    CausticRoot trivial;
    trivial.u_c = 1.0;
    CHECK(caustic_line(trivial).position(3.0) == doctest::Approx(3.0));
    CausticRoot backwards;
    backwards.u_c = -1.0;
    CHECK(caustic_line(backwards, 5.0).position(2.0) == doctest::Approx(3.0));
    CausticRoot k;
    k.phi_c = M_PI / 2;
    CHECK(k.k_c(0.01) == doctest::Approx(50 * M_PI));
}
