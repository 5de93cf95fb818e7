// Acceptance suite: one test case per criterion, each registered as its own
// ctest entry (see CMakeLists). Every case prints exactly one line
//   ACCEPTANCE <k> <slug>: PASS|FAIL
// and backs it with assertions. All seeds are pinned here; Monte Carlo sizes
// and tolerances are the ones fixed in the criteria, never loosened.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "vslab/bounds.hpp"
#include "vslab/concept_core.hpp"
#include "vslab/harness.hpp"
#include "vslab/learners.hpp"
#include "vslab/measures.hpp"
#include "vslab/noise.hpp"
#include "vslab/rng.hpp"
#include "vslab/version_space.hpp"

using namespace vslab;

namespace {

Rational R(long long a, long long b) { return Rational(a) / Rational(b); }

void verdict(int k, const char* slug, bool ok) {
    std::printf("ACCEPTANCE %d %s: %s\n", k, slug, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
    CHECK(ok);
}

const Rational& rmin(const Rational& a, const Rational& b) { return b < a ? b : a; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Quantile-check config shared by criteria 2-5: uniform marginal, realizable
// labels, m ∈ {32,128,512}, δ = 0.1, T = 2000.
ExperimentConfig quantile_config(const std::string& cls, int target, std::uint64_t seed,
                                 std::vector<BoundCheck> checks) {
    ExperimentConfig cfg;
    cfg.class_spec = cls;
    cfg.target = target;
    cfg.m_grid = {32, 128, 512};
    cfg.delta = R(1, 10);
    cfg.trials = 2000;
    cfg.seed = seed;
    cfg.checks = std::move(checks);
    return cfg;
}

} // namespace

// 1. Oracle equivalence: on 200 random classes (n <= 7, |C| <= 32),
//    vc_dimension, star_number, and exact compression_set_size match an
//    independent brute-force enumerator exactly (0 mismatches).
TEST_CASE("criterion-01-oracle-equivalence") {
    RngStream rng(9001);
    int vc_mismatch = 0, star_mismatch = 0, nhat_mismatch = 0;
    for (int i = 0; i < 200; ++i) {
        const ConceptClass c = oracles::random_class(rng, 7, 32);
        if (vc_dimension(c) != oracles::oracle_vc(c)) ++vc_mismatch;
        const StarNumber s = star_number(c);
        if (s.exceeds_cap || s.value != oracles::oracle_star(c)) ++star_mismatch;
        const LabeledSample sample = oracles::random_realizable_sample(rng, c, 10);
        if (compression_set_size(c, sample).nhat != oracles::oracle_nhat(c, sample))
            ++nhat_mismatch;
    }
    CHECK(vc_mismatch == 0);
    CHECK(star_mismatch == 0);
    CHECK(nhat_mismatch == 0);
    verdict(1, "oracle-equivalence", vc_mismatch + star_mismatch + nhat_mismatch == 0);
}

// 2. Theorem PDIS: thresholds(64), uniform, m ∈ {32,128,512}, δ = 0.1,
//    T = 2000 — violation rate of 𝒫(DIS(V_m)) > (16/m)(2n̂_{1:m} + ln(3/δ))
//    has 99% CI lower bound <= 0.1 (expected observed rate: 0).
TEST_CASE("criterion-02-pdis-thresholds") {
    ExperimentConfig cfg =
        quantile_config("thresholds(64)", 32, 9002, {BoundCheck{"pdis", "pdis_nhat", {}, false}});
    const ValidationReport report = run_validation(cfg, 4);
    for (const CheckRow& row : report.rows) {
        CHECK(row.quantile_pass);
        CHECK(row.violations == 0); // expected observed rate
    }
    verdict(2, "pdis-thresholds", report.pass);
}

// 3. Theorem int-closed: thresholds and axis_rectangles(4x4), er(Closure) vs
//    (1/m)(21d + 16 ln(3/δ)) quantile rule; expectation check:
//    mean er <= (21d+34)/m + 3 SE.
TEST_CASE("criterion-03-closure-int-closed") {
    bool ok = true;

    ExperimentConfig th =
        quantile_config("thresholds(64)", 32, 9003, {BoundCheck{"closure_er", "closure", {}, true}});
    const ValidationReport th_report = run_validation(th, 4);
    ok = ok && th_report.pass;

    // Target for the grid class: the concrete 2x2 box rows 1-2 x cols 1-2.
    const ConceptClass rects = make_class("axis_rectangles(4x4)");
    BitVec box(rects.n());
    for (int p : {1 * 4 + 1, 1 * 4 + 2, 2 * 4 + 1, 2 * 4 + 2}) box.set(p, true);
    int box_target = -1;
    for (int h = 0; h < rects.size(); ++h)
        if (rects.hypotheses[h].pos == box) box_target = h;
    REQUIRE(box_target >= 0);

    ExperimentConfig rc = quantile_config("axis_rectangles(4x4)", box_target, 9103,
                                          {BoundCheck{"closure_er", "closure", {}, true}});
    const ValidationReport rc_report = run_validation(rc, 4);
    ok = ok && rc_report.pass;

    for (const ValidationReport* rep : {&th_report, &rc_report})
        for (const CheckRow& row : rep->rows) {
            CHECK(row.quantile_pass);
            CHECK(row.has_expectation);
            CHECK(row.expectation_pass);
        }
    verdict(3, "closure-int-closed", ok);
}

// 4. Theorem monotone-compression via the DIS instantiation on star(8):
//    𝒫(A_m) <= (21𝔰 + 16 ln(3/δ))/m quantile check (Theorem PDIS-star form).
TEST_CASE("criterion-04-pdis-star") {
    ExperimentConfig cfg =
        quantile_config("star(8)", 0, 9004, {BoundCheck{"pdis", "pdis_star", {}, false}});
    const ValidationReport report = run_validation(cfg, 4);
    for (const CheckRow& row : report.rows) CHECK(row.quantile_pass);
    verdict(4, "pdis-star", report.pass);
}

// 5. Theorems vc-erm and vc-erm-subregion (c = 16): worst_consistent_error
//    quantile checks on thresholds and star(8), with per-trial n̂_{1:m} and
//    precomputed φ_16(d/m).
TEST_CASE("criterion-05-erm-quantiles") {
    BoundParams sub_params;
    sub_params["phi_c_c"] = Rational(16);
    const std::vector<BoundCheck> checks = {
        BoundCheck{"sup_er", "erm_nhat", {}, false},
        BoundCheck{"sup_er", "erm_subregion", sub_params, false},
    };

    bool ok = true;
    for (const auto& [cls, target, seed] :
         {std::tuple<std::string, int, std::uint64_t>{"thresholds(64)", 32, 9005},
          std::tuple<std::string, int, std::uint64_t>{"star(8)", 0, 9105}}) {
        ExperimentConfig cfg = quantile_config(cls, target, seed, checks);
        const ValidationReport report = run_validation(cfg, 4);
        for (const CheckRow& row : report.rows) CHECK(row.quantile_pass);
        ok = ok && report.pass;
    }
    verdict(5, "erm-quantiles", ok);
}

// 6. LP exactness: Φ on the star(k) construction equals 1 − kρ/c exactly for
//    k ∈ {2,4,8}, c ∈ {8,16,128}, ρ just above 1/k (here ρ = 101/(100k));
//    Lemma zc-binary sandwich holds exactly on 100 random (view, η) instances.
TEST_CASE("criterion-06-lp-exactness") {
    bool ok = true;
    for (int k : {2, 4, 8}) {
        const ConceptClass c = make_class("star(" + std::to_string(k) + ")");
        const Distribution u = Distribution::uniform(k);
        const VersionSpaceView view = version_space(c, {});
        const Rational rho = R(101, 100 * k);
        for (int cc : {8, 16, 128}) {
            const Rational eta = rho / Rational(cc);
            const Rational expect = Rational(1) - Rational(k) * rho / Rational(cc);
            const PhiResult got = phi(view, u, eta);
            CHECK(got.value == expect);
            CHECK(verify_certificate(view, u, eta, got.cert, got.value));
            ok = ok && got.value == expect;
        }
    }

    // Lemma zc-binary: Φ(η) <= Φ_{0,1}(η) <= 2Φ(η/2), exact rationals.
    RngStream rng(9006);
    int checked = 0;
    for (int i = 0; i < 100; ++i) {
        const ConceptClass c = oracles::random_class(rng, 6, 20);
        VersionSpaceView view;
        view.cls = &c;
        view.members = BitVec(c.size());
        for (int h = 0; h < c.size(); ++h)
            if (rng.next_u64() & 1u) view.members.set(h, true);
        if (view.empty())
            view.members.set(static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(c.size())),
                             true);
        const Rational eta = R(static_cast<long long>(rng.next_u64() % 40), 97);
        const PhiResult real = phi(view, Distribution::uniform(c.n()), eta);
        const PhiResult bin = phi(view, Distribution::uniform(c.n()), eta, PhiMode::binary);
        const PhiResult half = phi(view, Distribution::uniform(c.n()), eta / 2);
        const bool sandwich = real.value <= bin.value && bin.value <= 2 * half.value;
        CHECK(sandwich);
        ok = ok && sandwich;
        ++checked;
    }
    CHECK(checked == 100);
    verdict(6, "lp-exactness", ok);
}

// 7. Eq. (sup-zc): φ_c(r0) on star(k)+uniform lies in
//    [(1−1/c)·min{k, 1/r0 − 1/(c−1)}, (1−1/c)·min{k, 1/r0}]
//    for c ∈ {2,4,16}, r0 ∈ {0, 1/(2k)} (exact interval membership; 1/0 = ∞).
TEST_CASE("criterion-07-phic-interval") {
    bool ok = true;
    for (int k : {2, 4, 8}) {
        const ConceptClass c = make_class("star(" + std::to_string(k) + ")");
        const Distribution u = Distribution::uniform(k);
        for (int cc : {2, 4, 16}) {
            for (const Rational& r0 : {Rational(0), R(1, 2 * k)}) {
                const Rational got = phi_c(c, u, c.hypotheses[0], r0, Rational(cc));
                const Rational scale = Rational(1) - R(1, cc);
                const Rational hi =
                    scale * (r0 == 0 ? Rational(k) : rmin(Rational(k), Rational(1) / r0));
                const Rational lo =
                    scale * (r0 == 0 ? Rational(k)
                                     : rmin(Rational(k), Rational(1) / r0 - R(1, cc - 1)));
                CHECK(lo <= got);
                CHECK(got <= hi);
                ok = ok && lo <= got && got <= hi;
            }
        }
    }
    verdict(7, "phic-interval", ok);
}

// 8. Eq. (doubling-zc-bound): D(r0) <= 2d·log₂(96·φ_8(r0)) on star(4),
//    thresholds(8), intervals(8), powerset(3) at r0 ∈ {0.1, 0.3}.
TEST_CASE("criterion-08-doubling-bound") {
    bool ok = true;
    for (const char* name : {"star(4)", "thresholds(8)", "intervals(8)", "powerset(3)"}) {
        const ConceptClass c = make_class(name);
        const Distribution u = Distribution::uniform(c.n());
        const Hypothesis& target = c.hypotheses[0];
        const int d = vc_dimension(c);
        for (const Rational& r0 : {R(1, 10), R(3, 10)}) {
            const double D = doubling_dimension(c, u, target, r0);
            const Rational phi8 = phi_c(c, u, target, r0, Rational(8));
            const double rhs = 2.0 * d * std::log2(96.0 * to_double(phi8));
            CHECK(D <= rhs);
            ok = ok && D <= rhs;
        }
    }
    verdict(8, "doubling-bound", ok);
}

// 9. Lemma log-factors-abstract fuzz: 1e5 random in-domain tuples
//    (a, b, c1 >= 1, c2 >= 0), zero violations.
TEST_CASE("criterion-09-log-factors-fuzz") {
    RngStream rng(9009);
    int violations = 0;
    for (int i = 0; i < 100000; ++i) {
        const double a = std::exp(rng.next_unit() * std::log(1e6));      // [1, 1e6]
        const double b = std::exp(rng.next_unit() * std::log(1e8));      // [1, 1e8]
        const double c1 = 1.0 + rng.next_unit() * 99.0;                  // [1, 100]
        const double c2 = rng.next_unit() * 100.0;                       // [0, 100]
        if (!log_factors_lemma_check(a, b, c1, c2)) ++violations;
    }
    CHECK(violations == 0);
    verdict(9, "log-factors-fuzz", violations == 0);
}

// 10. Theorem erm-lb coupon-collector scenario on star(32), ε = 1/64, m at
//     0.8x the regime bound: empirical frequency of sup er >= ε exceeds 1/2
//     with 99% binomial confidence at T = 2000.
TEST_CASE("criterion-10-erm-lower-bound") {
    const ConceptClass c = make_class("star(32)");
    LowerBoundParams params;
    params.epsilon = R(1, 64);
    const LowerBoundScenario scenario = lower_bound_construction("realizable_star", c, params);
    const double regime = lower_bound_regime(scenario); // (1/2ε)·ln(min{𝔰−1, ⌊1/ε⌋})
    CHECK(regime == doctest::Approx(32.0 * std::log(31.0)).epsilon(1e-12));
    const int m = static_cast<int>(0.8 * regime); // 87

    const LowerBoundReport report = run_lower_bound(scenario, {m}, 2000, 9010);
    REQUIRE(report.rows.size() == 1);
    const LowerBoundRow& row = report.rows.front();
    CHECK(row.ci_lo > 0.5);
    CHECK(row.verdict == "PASS");
    verdict(10, "erm-lower-bound", row.verdict == "PASS" && row.ci_lo > 0.5);
}

// 11. Algorithm 1 under β-bounded noise (β = 0.1) on thresholds(16), m = 256,
//     δ = 0.1, c0 = 2: h* ∈ final 𝒢 in >= 1−δ of T = 500 runs (CI rule), and
//     median excess error decreases monotonically across m ∈ {64, 256, 1024}.
TEST_CASE("criterion-11-algorithm1-noise") {
    const ConceptClass c = make_class("thresholds(16)");
    const Distribution u = Distribution::uniform(16);
    const int target = 8;
    std::vector<int> all_points(16);
    for (int i = 0; i < 16; ++i) all_points[i] = i;
    const NoiseModel noise = bounded_noise_from(c.hypotheses[target], R(1, 10), all_points);
    const Rational best_risk = noisy_error(u, noise, c.hypotheses[target]);
    const Rational a = R(5, 4); // bounded noise: Bernstein (a, α) = (1/(1−2β), 1)
    const int trials = 500;

    int retained_fail = 0;                       // target dropped from final 𝒢 at m = 256
    std::vector<std::vector<Rational>> excess(3); // per m ∈ {64, 256, 1024}
    const std::vector<std::int64_t> ms = {64, 256, 1024};
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t seed = derive_seed(9011, static_cast<std::uint64_t>(t));
        for (std::size_t j = 0; j < ms.size(); ++j) {
            const Algo1RunRecord rec =
                run_algorithm1(c, u, noise, ms[j], 0.1, a, 1.0, 2.0, seed);
            REQUIRE(!rec.per_round.empty());
            if (ms[j] == 256 && !rec.per_round.back().g_next.get(target)) ++retained_fail;
            excess[j].push_back(noisy_error(u, noise, c.hypotheses[rec.final_hyp]) - best_risk);
        }
    }

    // CI rule: failure-rate 99% CI lower bound <= δ = 0.1.
    const BinomialCi ci = clopper_pearson(retained_fail, trials);
    const bool retention_ok = ci.lo <= 0.1;
    CHECK(retention_ok);

    // Lower medians; "decreases monotonically" = nonincreasing, since the
    // medians tie at 0 once the algorithm has converged.
    std::vector<Rational> med;
    for (auto& v : excess) {
        std::sort(v.begin(), v.end());
        med.push_back(v[(trials - 1) / 2]);
    }
    const bool monotone = !(med[1] > med[0]) && !(med[2] > med[1]);
    CHECK(monotone);
    verdict(11, "algorithm1-noise", retention_ok && monotone);
}

// 12. Determinism: `vslab validate` run twice with the same config+seed gives
//     byte-identical CSV; different worker counts give byte-identical CSV.
TEST_CASE("criterion-12-cli-determinism") {
    const std::string bin = VSLAB_BIN;
    nlohmann::ordered_json cfg;
    cfg["class"] = "thresholds(16)";
    cfg["target"] = 8;
    cfg["m_grid"] = {16, 64};
    cfg["delta"] = "0.1";
    cfg["trials"] = 500;
    cfg["seed"] = 77;
    cfg["quantities"] = {"pdis"};
    cfg["checks"] = nlohmann::ordered_json::array(
        {{{"quantity", "pdis"}, {"bound", "pdis_nhat"}},
         {{"quantity", "sup_er"}, {"bound", "classic_vapnik"}}});
    {
        std::ofstream out("acc12_cfg.json", std::ios::binary);
        out << cfg.dump(2) << "\n";
    }

    auto run = [&](const std::string& out, int workers) {
        const std::string cmd = bin + " --out " + out + " validate --config acc12_cfg.json" +
                                " --workers " + std::to_string(workers) + " > /dev/null";
        REQUIRE(std::system(cmd.c_str()) == 0);
    };
    run("acc12_run1", 1);
    run("acc12_run2", 1);
    run("acc12_run3", 5);

    const std::string csv1 = slurp("acc12_run1.csv");
    const bool rerun_identical = csv1 == slurp("acc12_run2.csv");
    const bool workers_identical = csv1 == slurp("acc12_run3.csv");
    const bool json_identical = slurp("acc12_run1.json") == slurp("acc12_run3.json");
    CHECK(csv1.find("trial,seed,m,") == 0);
    CHECK(rerun_identical);
    CHECK(workers_identical);
    CHECK(json_identical);
    for (const char* f : {"acc12_cfg.json", "acc12_run1.csv", "acc12_run1.json", "acc12_run2.csv",
                          "acc12_run2.json", "acc12_run3.csv", "acc12_run3.json"})
        std::remove(f);
    verdict(12, "cli-determinism", rerun_identical && workers_identical && json_identical);
}
