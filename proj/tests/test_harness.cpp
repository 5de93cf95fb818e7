#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vslab/concept_core.hpp"
#include "vslab/errors.hpp"
#include "vslab/harness.hpp"
#include "vslab/learners.hpp"
#include "vslab/noise.hpp"
#include "vslab/rng.hpp"
#include "vslab/version_space.hpp"

using namespace vslab;

namespace {

Rational R(long long a, long long b) { return Rational(a, b); }

ExperimentConfig mini_config() {
    ExperimentConfig config;
    config.class_spec = "thresholds(5)";
    config.target = 2;
    config.m_grid = {8, 32};
    config.delta = R(1, 10);
    config.trials = 200;
    config.seed = 11;
    config.checks.push_back({"pdis", "pdis_nhat", {}, false});
    config.checks.push_back({"sup_er", "classic_vapnik", {}, false});
    config.checks.push_back({"closure_er", "closure", {}, true});
    config.checks.push_back({"pdis", "pdis_star", {}, false});
    return config;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    return out;
}

} // namespace

TEST_CASE("clopper_pearson: exact binomial interval") {
    // k = 0: lower endpoint 0; upper solves (1-p)^n = alpha/2.
    const BinomialCi zero = clopper_pearson(0, 2000, 0.99);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi == doctest::Approx(1.0 - std::pow(0.005, 1.0 / 2000)).epsilon(1e-9));

    // k = n mirrors it: p^n = alpha/2.
    const BinomialCi full = clopper_pearson(2000, 2000, 0.99);
    CHECK(full.hi == 1.0);
    CHECK(full.lo == doctest::Approx(std::pow(0.005, 1.0 / 2000)).epsilon(1e-9));

    // k = 1, n = 2 has closed forms: P(X>=1|p) = 1-(1-p)^2 and P(X<=1|p) = 1-p^2.
    const BinomialCi mid = clopper_pearson(1, 2, 0.99);
    CHECK(mid.lo == doctest::Approx(1.0 - std::sqrt(0.995)).epsilon(1e-9));
    CHECK(mid.hi == doctest::Approx(std::sqrt(0.995)).epsilon(1e-9));

    // The interval brackets the observed rate, and complements mirror.
    for (int k : {0, 1, 7, 100, 193, 200}) {
        const BinomialCi ci = clopper_pearson(k, 200, 0.99);
        const double rate = k / 200.0;
        CHECK(ci.lo <= rate);
        CHECK(ci.hi >= rate);
        CHECK(ci.lo < ci.hi);
        const BinomialCi co = clopper_pearson(200 - k, 200, 0.99);
        CHECK(ci.lo == doctest::Approx(1.0 - co.hi).epsilon(1e-9));
    }

    CHECK_THROWS_AS(clopper_pearson(1, 0), ParameterError);
    CHECK_THROWS_AS(clopper_pearson(3, 2), ParameterError);
    CHECK_THROWS_AS(clopper_pearson(-1, 2), ParameterError);
    CHECK_THROWS_AS(clopper_pearson(1, 2, 1.0), ParameterError);
}

TEST_CASE("run_validation: mini PDIS/closure validation passes deterministically") {
    const ExperimentConfig config = mini_config();
    const ValidationReport report = run_validation(config);

    CHECK(report.pass);
    // Column order: check quantities in first-appearance order, then the
    // auto-measured compression size.
    CHECK(report.columns ==
          std::vector<std::string>{"pdis", "sup_er", "closure_er", "nhat1m"});
    CHECK(report.rows.size() == 8); // 4 checks x 2 grid points, check-major
    CHECK(report.rows[0].bound == "pdis_nhat");
    CHECK(report.rows[0].m == 8);
    CHECK(report.rows[1].m == 32);
    CHECK(report.trial_records.size() == 200);
    CHECK(report.trial_records[7].seed == derive_seed(11, 7));

    for (const CheckRow& row : report.rows) {
        CHECK(row.trials == 200);
        CHECK(row.rate == doctest::Approx(row.violations / 200.0));
        CHECK(row.ci_lo <= row.rate);
        CHECK(row.ci_hi >= row.rate);
        CHECK(row.quantile_pass);
        CHECK(row.mean_quantity <= 1.0);
    }
    // At these sizes the PDIS bound exceeds 1 while the quantity is a
    // probability, so the violation count is exactly zero.
    CHECK(report.rows[0].violations == 0);

    // The expectation check rides on the closure rows only.
    CHECK(report.rows[4].has_expectation);
    CHECK(report.rows[4].expectation_bound ==
          doctest::Approx((21.0 * 1 + 34) / 8).epsilon(1e-12));
    CHECK(report.rows[4].expectation_pass);
    CHECK_FALSE(report.rows[0].has_expectation);

    // The auto-filled nhat wiring: each trial's pdis_nhat bound equals the
    // catalog formula at that trial's measured nhat1m.
    for (int t : {0, 63, 199}) {
        const TrialRecord& rec = report.trial_records[t];
        for (std::size_t mi = 0; mi < config.m_grid.size(); ++mi) {
            BoundParams p;
            p["nhat"] = rec.values[mi].at("nhat1m");
            p["m"] = Rational(config.m_grid[mi]);
            p["delta"] = config.delta;
            CHECK(rec.bound_values[mi][0] == evaluate_bound("pdis_nhat", p).value);
        }
    }

    // Determinism: same config twice, and any worker count, give the same bytes.
    const ValidationReport again = run_validation(config);
    CHECK(report.csv == again.csv);
    CHECK(to_json(report) == to_json(again));
    for (int workers : {2, 5}) {
        const ValidationReport parallel = run_validation(config, workers);
        CHECK(report.csv == parallel.csv);
        CHECK(to_json(report) == to_json(parallel));
    }

    const std::string json = to_json(report);
    CHECK(json.find("\"vslab-validation v1\"") != std::string::npos);
    CHECK(json.find("\"splitmix64-v1\"") != std::string::npos);
}

TEST_CASE("run_validation: verdicts are recomputable from the CSV") {
    // Add a deliberately absurd constant so some rows FAIL: the erm_star
    // bound at constant 1/100 sits near 0.004 while sup_er is often 1/5.
    ExperimentConfig config = mini_config();
    config.trials = 120;
    config.checks.push_back({"sup_er", "erm_star", {{"constant", R(1, 100)}}, false});
    const ValidationReport report = run_validation(config);

    CHECK_FALSE(report.pass);
    const CheckRow& bad = report.rows[8]; // 5th check, m = 8
    CHECK(bad.bound == "erm_star");
    CHECK(bad.violations > 0);
    CHECK_FALSE(bad.quantile_pass);

    // Recount every row's violations from the CSV text alone.
    std::istringstream csv(report.csv);
    std::string line;
    REQUIRE(std::getline(csv, line));
    const std::vector<std::string> header = split(line, ',');
    REQUIRE(header.size() == 3 + report.columns.size() + config.checks.size());
    CHECK(header[0] == "trial");
    CHECK(header[3 + report.columns.size()] == "check1:pdis_nhat");

    std::vector<std::vector<int>> violations(config.checks.size(),
                                             std::vector<int>(config.m_grid.size(), 0));
    int rows_seen = 0;
    while (std::getline(csv, line)) {
        const std::vector<std::string> cells = split(line, ',');
        REQUIRE(cells.size() == header.size());
        const int m = std::stoi(cells[2]);
        const std::size_t mi = m == config.m_grid[0] ? 0 : 1;
        ++rows_seen;
        for (std::size_t k = 0; k < config.checks.size(); ++k) {
            // Quantity column for this check, then its bound column.
            std::size_t qcol = 0;
            while (report.columns[qcol] != config.checks[k].quantity) ++qcol;
            const Rational q = parse_rational(cells[3 + qcol]);
            const double b = std::strtod(cells[3 + report.columns.size() + k].c_str(), nullptr);
            if (q > Rational(b)) ++violations[k][mi];
        }
    }
    CHECK(rows_seen == config.trials * static_cast<int>(config.m_grid.size()));
    for (std::size_t k = 0; k < config.checks.size(); ++k)
        for (std::size_t mi = 0; mi < config.m_grid.size(); ++mi)
            CHECK(violations[k][mi] ==
                  report.rows[k * config.m_grid.size() + mi].violations);
}

TEST_CASE("run_validation: parameter resolution and input validation") {
    // Unresolvable constant: the catalog's complaint is surfaced with advice.
    {
        ExperimentConfig config = mini_config();
        config.checks = {{"sup_er", "erm_star", {}, false}};
        CHECK_THROWS_WITH_AS(run_validation(config),
                             doctest::Contains("missing required parameter 'constant'"),
                             ParameterError);
    }
    // phi_c needs the harness-only c selector.
    {
        ExperimentConfig config = mini_config();
        config.checks = {{"sup_er", "erm_subregion", {}, false}};
        CHECK_THROWS_WITH_AS(run_validation(config), doctest::Contains("phi_c_c"),
                             ParameterError);
    }
    // ... and with it, the per-m phi_c is data-independent and wired through.
    {
        ExperimentConfig config = mini_config();
        config.trials = 30;
        config.checks = {{"sup_er", "erm_subregion", {{"phi_c_c", Rational(16)}}, false}};
        const ValidationReport report = run_validation(config);
        for (const TrialRecord& rec : report.trial_records)
            for (std::size_t mi = 0; mi < config.m_grid.size(); ++mi)
                CHECK(rec.bound_values[mi][0] ==
                      report.trial_records[0].bound_values[mi][0]);
    }
    // Auto phi_hat/theta require explicit (a, alpha).
    {
        ExperimentConfig config = mini_config();
        config.checks = {{"sup_er", "zc_noise", {{"constant", Rational(1)}}, false}};
        CHECK_THROWS_WITH_AS(run_validation(config),
                             doctest::Contains("needs explicit 'a' and 'alpha'"),
                             ParameterError);
    }
    // Expectation forms refuse the per-trial nhat slot.
    {
        ExperimentConfig config = mini_config();
        config.checks = {{"pdis", "monotone_compression", {}, true}};
        CHECK_THROWS_WITH_AS(run_validation(config), doctest::Contains("data-independent"),
                             ParameterError);
    }
    // Realizable-only quantities are rejected under noise.
    {
        ExperimentConfig config = mini_config();
        config.has_noise = true;
        config.noise_beta = R(1, 10);
        CHECK_THROWS_WITH_AS(run_validation(config),
                             doctest::Contains("realizable labels only"), ParameterError);
    }
    // closure_er needs an intersection-closed class; singletons lacks the
    // all-negative intersection of two distinct singletons.
    {
        ExperimentConfig config = mini_config();
        config.class_spec = "singletons(4)";
        config.target = 0;
        config.checks = {{"closure_er", "closure", {}, false}};
        CHECK_THROWS_WITH_AS(run_validation(config),
                             doctest::Contains("intersection-closed"), ParameterError);
    }
    // Config shape errors.
    {
        ExperimentConfig config = mini_config();
        config.m_grid = {8, 8};
        CHECK_THROWS_WITH_AS(run_validation(config), doctest::Contains("strictly increasing"),
                             ParameterError);
    }
    {
        ExperimentConfig config = mini_config();
        config.target = 99;
        CHECK_THROWS_WITH_AS(run_validation(config), doctest::Contains("out of range"),
                             ParameterError);
    }
    {
        ExperimentConfig config = mini_config();
        config.dist_decimals = {"0.5", "0.5"};
        CHECK_THROWS_AS(run_validation(config), ParameterError);
    }
    {
        ExperimentConfig config = mini_config();
        config.checks[0].bound = "no_such_bound";
        CHECK_THROWS_AS(run_validation(config), ParameterError);
    }
}

TEST_CASE("config JSON parsing is exact and validated") {
    const std::string text = R"json({
        "class": "thresholds(5)",
        "dist": ["0.5", "0.25", "0.125", "0.0625", "0.0625"],
        "target": 2,
        "noise": null,
        "m_grid": [4, 16],
        "delta": "0.1",
        "trials": 50,
        "seed": 3,
        "quantities": ["sup_er"],
        "checks": [
            {"quantity": "sup_er", "bound": "classic_vapnik"}
        ],
        "out": ""
    })json";
    const ExperimentConfig config = parse_config_json(text);
    CHECK(config.class_spec == "thresholds(5)");
    CHECK(config.dist_decimals.size() == 5);
    CHECK(config.target == 2);
    CHECK_FALSE(config.has_noise);
    CHECK(config.m_grid == std::vector<int>{4, 16});
    CHECK(config.delta == R(1, 10)); // "0.1" is exactly 1/10, not a double
    CHECK(config.trials == 50);
    CHECK(config.seed == 3);
    CHECK(config.checks.size() == 1);
    CHECK_FALSE(config.checks[0].expectation);

    // Noise block and rational check params.
    const std::string noisy = R"json({
        "class": "thresholds(5)", "target": 2, "m_grid": [16], "delta": "1/8",
        "trials": 10, "seed": 1,
        "noise": {"beta": "0.1", "flip": [0, 2]},
        "checks": [{"quantity": "erm_excess", "bound": "bernstein_erm_mn",
                    "params": {"a": "1.25", "alpha": "1", "constant": "4"}}]
    })json";
    const ExperimentConfig nc = parse_config_json(noisy);
    CHECK(nc.has_noise);
    CHECK(nc.noise_beta == R(1, 10));
    CHECK(nc.noise_flip == std::vector<int>{0, 2});
    CHECK(nc.delta == R(1, 8));
    CHECK(nc.checks[0].params.at("a") == R(5, 4));

    CHECK_THROWS_WITH_AS(parse_config_json("not json"), doctest::Contains("not valid JSON"),
                         ParameterError);
    CHECK_THROWS_AS(parse_config_json(R"json({"target": 0})json"), ParameterError); // class missing
    CHECK_THROWS_AS(parse_config_json(R"json({
        "class": "thresholds(5)", "target": 2, "m_grid": [16, 4], "delta": "0.1",
        "trials": 10, "seed": 1, "checks": []
    })json"),
                    ParameterError); // grid not increasing

    const std::string path = "test_harness_config.json";
    {
        std::ofstream out(path);
        out << text;
    }
    const ExperimentConfig loaded = load_config(path);
    CHECK(loaded.delta == config.delta);
    CHECK(loaded.class_spec == config.class_spec);
    std::remove(path.c_str());
    CHECK_THROWS_WITH_AS(load_config("missing-config.json"), doctest::Contains("cannot open"),
                         ParameterError);
}

TEST_CASE("estimate_M: coupled bisection over the sample size") {
    const ConceptClass c = make_class("thresholds(5)");
    const Distribution d = Distribution::uniform(5);
    const Hypothesis& target = c.hypotheses[2];

    // eps = 1 is satisfied at the first probe.
    const MEstimate trivial = estimate_M(c, d, target, Rational(1), R(1, 10), 50, 7);
    CHECK(trivial.value == 1);
    REQUIRE(!trivial.probes.empty());
    CHECK(trivial.probes.front().m == 1);
    CHECK(trivial.probes.front().successes == 50);

    // Uniform thresholds: sup er <= 1/20 forces full collapse, which needs
    // every boundary point, i.e. a 5-coupon collector per trial.
    const MEstimate est = estimate_M(c, d, target, R(1, 20), R(1, 10), 300, 5);
    CHECK(est.value > 5);
    // The bisection boundary is witnessed in the probes: value qualifies,
    // value - 1 does not. T = 300, delta = 1/10 -> need ceil(285) = 285.
    bool saw_value = false, saw_prev = false;
    for (const MProbe& probe : est.probes) {
        CHECK(probe.trials == 300);
        CHECK(probe.ci_lo <= probe.successes / 300.0);
        if (probe.m == est.value) {
            saw_value = true;
            CHECK(probe.successes >= 285);
        }
        if (probe.m == est.value - 1) {
            saw_prev = true;
            CHECK(probe.successes < 285);
        }
    }
    CHECK(saw_value);
    CHECK(saw_prev);

    // Coupled trials make the estimate monotone in eps on a fixed seed.
    const MEstimate coarser = estimate_M(c, d, target, R(1, 5), R(1, 10), 300, 5);
    CHECK(coarser.value <= est.value);

    // Degenerate distribution: all mass on x0, whose label every h != h0
    // shares with the target, so sup er drops to 0 after one draw.
    const Distribution atom = Distribution::from_decimals({"1", "0", "0", "0", "0"});
    const MEstimate one = estimate_M(c, atom, target, R(1, 100), R(1, 10), 40, 9);
    CHECK(one.value == 1);

    // Unreachable eps within m_cap: 3 draws can never collapse thresholds(5).
    CHECK_THROWS_AS(estimate_M(c, d, target, R(1, 1000), R(1, 10), 20, 7, 3), BudgetExceeded);

    CHECK_THROWS_AS(estimate_M(c, d, target, Rational(0), R(1, 10), 10, 1), ParameterError);
    CHECK_THROWS_AS(estimate_M(c, d, target, R(1, 2), Rational(1), 10, 1), ParameterError);
    CHECK_THROWS_AS(estimate_M(c, d, target, R(1, 2), R(1, 10), 0, 1), ParameterError);
}

TEST_CASE("quantile_nhat: empirical (1-delta)-quantile of the compression size") {
    const ConceptClass c = make_class("thresholds(5)");
    const Distribution d = Distribution::uniform(5);
    const Hypothesis& target = c.hypotheses[2];

    // Thresholds have star number 2, and nhat <= s always (Theorem td-hat-s).
    const QuantileNhat qn = quantile_nhat(c, d, target, 40, R(1, 10), 200, 13);
    CHECK(qn.value <= 2);
    REQUIRE(qn.values.size() == 200);
    CHECK(std::is_sorted(qn.values.begin(), qn.values.end()));
    // k-th order statistic with k = ceil(0.9 * 200) = 180.
    CHECK(qn.value == qn.values[179]);

    // delta -> 1 degenerates to the sample minimum.
    const QuantileNhat lax = quantile_nhat(c, d, target, 40, R(199, 200), 200, 13);
    CHECK(lax.value == lax.values.front());

    // star(8) with the all-negative center: every distinct drawn point is a
    // forced pair, so nhat equals the distinct-point count. Replay trial 0.
    const ConceptClass star8 = make_class("star(8)");
    const Distribution d8 = Distribution::uniform(8);
    const QuantileNhat sq = quantile_nhat(star8, d8, star8.hypotheses[0], 3, R(1, 10), 1, 21);
    RngStream rng = derive_stream(21, 0);
    PointSampler points(d8);
    LabelSampler labels(star8.hypotheses[0]);
    BitVec seen(8);
    for (int j = 0; j < 3; ++j) {
        const int x = points.draw(rng);
        (void)labels.draw(x, rng);
        seen.set(x, true);
    }
    CHECK(sq.value == seen.count());

    CHECK_THROWS_AS(quantile_nhat(c, d, target, 0, R(1, 10), 10, 1), ParameterError);
    CHECK_THROWS_AS(quantile_nhat(c, d, target, 5, Rational(0), 10, 1), ParameterError);
}

TEST_CASE("cal_curve: label complexity and coverage columns") {
    const ConceptClass c = make_class("thresholds(5)");
    const Distribution d = Distribution::uniform(5);
    const Hypothesis& target = c.hypotheses[2];

    const CalCurve curve = cal_curve(c, d, target, {0, 2, 10}, 100, 9);
    REQUIRE(curve.rows.size() == 3);

    // Budget 0: no queries, the returned hypothesis is the first in C, and
    // DIS(C) is everything.
    CHECK(curve.rows[0].mean_labels == 0);
    CHECK(curve.rows[0].mean_error == R(2, 5)); // d(h0, h2) exactly
    CHECK(curve.rows[0].mean_dis == 1);
    CHECK(curve.rows[0].coverage == 0);

    for (const CalCurveRow& row : curve.rows) {
        CHECK(row.coverage == 1 - row.mean_dis); // identity column
        CHECK(row.mean_labels <= Rational(row.budget));
    }
    // Shared trial seeds couple the rows: labels nondecreasing pointwise, so
    // also in mean; error shrinks from the budget-0 baseline.
    CHECK(curve.rows[0].mean_labels <= curve.rows[1].mean_labels);
    CHECK(curve.rows[1].mean_labels <= curve.rows[2].mean_labels);
    CHECK(curve.rows[2].mean_error < curve.rows[0].mean_error);
    CHECK(curve.rows[2].mean_dis < R(1, 10)); // 10 labels collapse thresholds(5)

    const std::string csv = to_csv(curve);
    CHECK(csv.rfind("budget,mean_labels,mean_error,mean_dis,coverage\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    CHECK_THROWS_AS(cal_curve(c, d, target, {}, 10, 1), ParameterError);
    CHECK_THROWS_AS(cal_curve(c, d, target, {1}, 0, 1), ParameterError);
}

TEST_CASE("run_lower_bound: realizable star scenario") {
    const ConceptClass c = make_class("star(8)");
    LowerBoundParams params;
    params.epsilon = R(1, 64);
    const LowerBoundScenario s = lower_bound_construction("realizable_star", c, params);

    // regime = (1/(2 eps)) ln(min{s-1, floor(1/eps)}) = 32 ln 7.
    const LowerBoundReport report = run_lower_bound(s, {4, 64}, 400, 13);
    CHECK(report.kind == "realizable_star");
    CHECK(report.regime == doctest::Approx(32.0 * std::log(7.0)).epsilon(1e-12));
    CHECK(report.threshold == R(1, 64));
    REQUIRE(report.rows.size() == 2);

    // m = 4 cannot collect the 7 eps-mass coupons, so sup er >= eps always.
    CHECK(report.rows[0].m == 4);
    CHECK(report.rows[0].hits == 400);
    CHECK(report.rows[0].verdict == "PASS");
    CHECK(report.rows[0].ci_lo > 0.5);

    // m = 64 >= regime: informational only.
    CHECK(report.rows[1].verdict == "n/a");
    CHECK(report.rows[1].hits <= 400);

    const std::string json = to_json(report);
    CHECK(json.find("\"vslab-lowerbound v1\"") != std::string::npos);
    CHECK(json.find("\"splitmix64-v1\"") != std::string::npos);

    CHECK_THROWS_AS(run_lower_bound(s, {}, 10, 1), ParameterError);
    CHECK_THROWS_AS(run_lower_bound(s, {4, 4}, 10, 1), ParameterError);
    CHECK_THROWS_AS(run_lower_bound(s, {4}, 0, 1), ParameterError);
}

TEST_CASE("run_lower_bound: noisy star scenario is qualitative") {
    const ConceptClass c = make_class("star(4)");
    LowerBoundParams params;
    params.k = 3;
    params.zeta = R(1, 8);
    params.beta = R(1, 4);
    params.t = 1;
    const LowerBoundScenario s = lower_bound_construction("noisy_star", c, params);
    REQUIRE(s.threshold == R(1, 32)); // (zeta/2)(1 - 2 beta)

    const LowerBoundReport report = run_lower_bound(s, {2, 16}, 300, 17);
    CHECK(report.kind == "noisy_star");
    CHECK(report.regime == 0.0); // vacuous below k = 96e
    for (const LowerBoundRow& row : report.rows) {
        CHECK(row.verdict == "n/a");
        CHECK(row.hits >= 0);
        CHECK(row.hits <= 300);
        CHECK(row.ci_lo <= row.rate);
        CHECK(row.ci_hi >= row.rate);
    }
    // Small samples mis-select the ERM often enough to see hits at m = 2.
    CHECK(report.rows[0].hits > 0);
}

TEST_CASE("write_validation_outputs: csv and json land next to the prefix") {
    ExperimentConfig config = mini_config();
    config.trials = 20;
    config.out = "test_harness_out";
    const ValidationReport report = run_validation(config);
    write_validation_outputs(report);

    std::ifstream csv("test_harness_out.csv", std::ios::binary);
    REQUIRE(csv.good());
    std::ostringstream csv_body;
    csv_body << csv.rdbuf();
    CHECK(csv_body.str() == report.csv);

    std::ifstream js("test_harness_out.json", std::ios::binary);
    REQUIRE(js.good());
    std::ostringstream js_body;
    js_body << js.rdbuf();
    CHECK(js_body.str() == to_json(report));

    std::remove("test_harness_out.csv");
    std::remove("test_harness_out.json");

    // Empty prefix is a documented no-op.
    ExperimentConfig quiet = mini_config();
    quiet.trials = 5;
    const ValidationReport no_out = run_validation(quiet);
    write_validation_outputs(no_out);
}
