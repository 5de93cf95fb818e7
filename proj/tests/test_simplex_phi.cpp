// Exact simplex and the Φ LP of Definition "zc": optima, certificates, the
// binary branch-and-bound, and the zc-binary sandwich.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vslab/errors.hpp"
#include "vslab/measures.hpp"
#include "vslab/simplex.hpp"
#include "vslab/version_space.hpp"

using namespace vslab;

namespace {

VersionSpaceView full_view(const ConceptClass& c) {
    VersionSpaceView v;
    v.cls = &c;
    v.members = BitVec(c.size(), true);
    return v;
}

} // namespace

TEST_CASE("simplex solves a textbook LP exactly") {
    // min -3x - 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 (classic example;
    // optimum at (2,6) with value -36). Slack-augmented by hand.
    std::vector<std::vector<Rational>> A = {
        {1, 0, 1, 0, 0},
        {0, 2, 0, 1, 0},
        {3, 2, 0, 0, 1},
    };
    std::vector<Rational> b = {4, 12, 18};
    std::vector<Rational> c = {-3, -5, 0, 0, 0};
    auto r = simplex_min(A, b, c, {2, 3, 4});
    REQUIRE(r.has_value());
    CHECK(r->value == Rational(-36));
    CHECK(r->x[0] == Rational(2));
    CHECK(r->x[1] == Rational(6));
    // Same result through the two-phase path.
    auto r2 = simplex_min(A, b, c);
    REQUIRE(r2.has_value());
    CHECK(r2->value == Rational(-36));
}

TEST_CASE("simplex detects infeasibility") {
    // x + y = 1 and x + y = 2 cannot both hold.
    std::vector<std::vector<Rational>> A = {{1, 1}, {1, 1}};
    std::vector<Rational> b = {1, 2};
    std::vector<Rational> c = {1, 1};
    CHECK_FALSE(simplex_min(A, b, c).has_value());
}

TEST_CASE("simplex handles degenerate ties without cycling") {
    // Redundant constraints force degenerate pivots; Bland's rule must exit.
    std::vector<std::vector<Rational>> A = {
        {1, 1, 1, 0, 0},
        {1, 1, 0, 1, 0},
        {1, 0, 0, 0, 1},
    };
    std::vector<Rational> b = {1, 1, 0};
    std::vector<Rational> c = {-1, -1, 0, 0, 0};
    auto r = simplex_min(A, b, c, {2, 3, 4});
    REQUIRE(r.has_value());
    CHECK(r->value == Rational(-1));
}

TEST_CASE("phi on the paper's star ball example") {
    // star(4), uniform, ball at r1 = 3/10 (= everything), eta = r1/16:
    // Appendix (sup-zc) optimum is 1 - 4*(3/10)/16 = 37/40 = 0.925.
    ConceptClass c = make_class("star(4)");
    Distribution d = Distribution::uniform(4);
    VersionSpaceView v = full_view(c);
    Rational eta = Rational(3, 10) / 16;
    PhiResult p = phi(v, d, eta);
    CHECK(p.value == Rational(37, 40));
    CHECK(verify_certificate(v, d, eta, p.cert, p.value));
}

TEST_CASE("phi trivial values") {
    ConceptClass c = make_class("star(4)");
    Distribution d = Distribution::uniform(4);

    SUBCASE("singleton view -> 0 for any eta") {
        VersionSpaceView v;
        v.cls = &c;
        v.members = BitVec(c.size());
        v.members.set(2, true);
        for (Rational eta : {Rational(0), Rational(1, 100), Rational(1)}) {
            PhiResult p = phi(v, d, eta);
            CHECK(p.value == 0);
            CHECK(verify_certificate(v, d, eta, p.cert, p.value));
        }
    }
    SUBCASE("eta = 1 -> 0 on the full view") {
        PhiResult p = phi(full_view(c), d, 1);
        CHECK(p.value == 0);
        CHECK(verify_certificate(full_view(c), d, Rational(1), p.cert, p.value));
    }
    SUBCASE("eta = 0 -> P(DIS) on the full view") {
        // With eta = 0 no disagreement point can shed weight onto zeta/xi.
        PhiResult p = phi(full_view(c), d, 0);
        CHECK(p.value == 1); // DIS(star) is the whole space
    }
}

TEST_CASE("phi monotonicity properties") {
    ConceptClass c = make_class("powerset(3)");
    Distribution d = Distribution::from_decimals({"0.5", "0.25", "0.25"});
    VersionSpaceView all = full_view(c);
    VersionSpaceView sub;
    sub.cls = &c;
    sub.members = BitVec(c.size());
    for (int i : {0, 3, 5}) sub.members.set(i, true);

    Rational small(1, 50), big(1, 5);
    CHECK(phi(all, d, small).value >= phi(all, d, big).value);
    CHECK(phi(sub, d, small).value <= phi(all, d, small).value);
    // Phi <= P(DIS(view)) for all eta.
    CHECK(phi(all, d, 0).value <= region_mass(d, disagreement_region(all)));
    CHECK(phi(sub, d, small).value <= region_mass(d, disagreement_region(sub)));
}

TEST_CASE("binary phi: exactness on a hand-solvable instance") {
    // star(2) over 2 points, masses (1/2, 1/2), eta = 1/4. Binary gamma:
    // gamma(x)=0 forces zeta(x)+xi(x)=1; singleton h_i needs zeta(x_i)<=1/2,
    // h_0 needs xi(x_1)+xi(x_2)<=1/2. Setting gamma=0 on both: xi(x_i)>=1/2
    // each, sum 1 > 1/2 -> infeasible. One gamma=1 suffices: value 1/2.
    ConceptClass c = make_class("star(2)");
    Distribution d = Distribution::uniform(2);
    VersionSpaceView v = full_view(c);
    Rational eta(1, 4);
    PhiResult bin = phi(v, d, eta, PhiMode::binary);
    CHECK(bin.value == Rational(1, 2));
    CHECK(bin.cert.binary);
    CHECK(verify_certificate(v, d, eta, bin.cert, bin.value));

    PhiResult real = phi(v, d, eta);
    CHECK(real.value <= bin.value);
}

TEST_CASE("zc-binary sandwich holds exactly") {
    // Lemma zc-binary: phi_real(eta) <= phi_binary(eta) <= 2 phi_real(eta/2).
    for (const char* name : {"star(3)", "powerset(3)", "thresholds(4)"}) {
        ConceptClass c = make_class(name);
        Distribution d = Distribution::uniform(c.n());
        VersionSpaceView v = full_view(c);
        for (Rational eta : {Rational(0), Rational(1, 20), Rational(1, 8), Rational(1, 3)}) {
            PhiResult lo = phi(v, d, eta);
            PhiResult bin = phi(v, d, eta, PhiMode::binary);
            PhiResult half = phi(v, d, eta / 2);
            CHECK(lo.value <= bin.value);
            CHECK(bin.value <= 2 * half.value);
            CHECK(verify_certificate(v, d, eta, bin.cert, bin.value));
        }
    }
}

TEST_CASE("phi parameter errors") {
    ConceptClass c = make_class("star(4)");
    Distribution d = Distribution::uniform(4);
    VersionSpaceView empty;
    empty.cls = &c;
    empty.members = BitVec(c.size());
    CHECK_THROWS_AS(phi(empty, d, Rational(1, 10)), ParameterError);
    CHECK_THROWS_AS(phi(full_view(c), d, Rational(-1, 10)), ParameterError);
}
