#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vslab/bounds.hpp"
#include "vslab/concept_core.hpp"
#include "vslab/noise.hpp"
#include "vslab/rational.hpp"
#include "vslab/version_space.hpp"

namespace vslab {

// ---------------------------------------------------------------------------
// Seeded Monte Carlo experiment runner and bound validation. A theorem's
// "with probability at least 1−δ" claim is validated as: the rate of trials
// violating the bound has 99% Clopper–Pearson CI with lower endpoint ≤ δ.
// Expectation forms are validated as mean ≤ bound + 3·(sample std/√T).
// Per-trial streams are derive_seed(master, trial); aggregation is ordered by
// trial index, so outputs are byte-identical for any worker count.
// ---------------------------------------------------------------------------

// One bound comparison: a measured quantity (per trial, per m) against a
// bound-catalog formula. Missing parameters are resolved in this order, with
// explicit `params` entries always winning:
//   m, delta        from the config (per grid point)
//   beta            from the config's noise model
//   vc, dim         exact VC dimension of the class
//   s               exact star number of the class
//   nhat, n         the trial's measured n̂_{1:m} (forces the nhat1m column)
//   phi_c           φ_c(vc/m) computed once per m; requires a "phi_c_c" entry
//                   naming c (17 in Theorem vc-erm; 16 in its φ term)
//   phi_hat, theta  φ̂_{a,α} / θ at r₀ = a(a·dim/m)^{α/(2−α)} once per m;
//                   require "a" and "alpha" entries
// Anything else (constant, a, alpha, ntilde, M, ...) must be explicit.
struct BoundCheck {
    std::string quantity;   // sup_er | pdis | closure_er | nhat1m | erm_excess
    std::string bound;      // evaluate_bound name
    BoundParams params;     // explicit overrides / required constants
    bool expectation = false; // also check the "-expectation" form
};

struct ExperimentConfig {
    std::string class_spec;                  // make_class descriptor
    std::vector<std::string> dist_decimals;  // empty => uniform
    int target = 0;                          // hypothesis index
    bool has_noise = false;                  // realizable when false
    Rational noise_beta;                     // bounded noise at the target
    std::vector<int> noise_flip;             // empty (with has_noise) => all points
    std::vector<int> m_grid;
    Rational delta = Rational(1, 10);
    int trials = 2000;
    std::uint64_t seed = 0;
    std::vector<std::string> quantities;     // CSV column order; auto-extended
    std::vector<BoundCheck> checks;
    std::string out;                         // output path prefix; "" = no files

    void validate() const;
};

// JSON config (see README for the schema). Rational-valued fields (delta,
// beta, check params) are strings so 0.1 stays exactly 1/10.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    // values[i][q] = quantity q at m_grid[i]; exact.
    std::vector<std::map<std::string, Rational>> values;
    // bound_values[i][k] = check k's bound at m_grid[i] (varies across trials
    // only through n̂); the CSV carries these, so verdicts are recomputable.
    std::vector<std::vector<double>> bound_values;
};

// Aggregate of one (check, m) cell.
struct CheckRow {
    std::string quantity, bound;
    int m = 0;
    int violations = 0, trials = 0;
    double rate = 0, ci_lo = 0, ci_hi = 1; // 99% Clopper–Pearson
    bool quantile_pass = true;             // ci_lo <= delta
    double mean_quantity = 0;
    double mean_bound = 0;                 // bound evaluated at per-trial params
    bool has_expectation = false;
    double expectation_bound = 0, expectation_se = 0;
    bool expectation_pass = true;          // mean <= bound + 3*SE
};

struct ValidationReport {
    ExperimentConfig config;
    std::vector<std::string> columns; // quantity column order in the CSV
    std::vector<TrialRecord> trial_records;
    std::vector<CheckRow> rows;       // checks × m-grid, check-major
    bool pass = true;
    std::string csv;                  // per-trial table, byte-stable
};

ValidationReport run_validation(const ExperimentConfig& config, int workers = 1);
std::string to_json(const ValidationReport& report);
// Writes <out>.csv and <out>.json when config.out is nonempty.
void write_validation_outputs(const ValidationReport& report);

// Exact (Clopper–Pearson) two-sided binomial confidence interval.
struct BinomialCi {
    double lo = 0, hi = 1;
};
BinomialCi clopper_pearson(int successes, int trials, double confidence = 0.99);

// Empirical M(ε,δ) (§4): smallest m with P(sup_{h∈ℂ[ℒ_m]} er(h) ≤ ε) ≥ 1−δ/2,
// estimated by bisection; per-trial streams are shared across probed m, so
// the empirical frequency is exactly nonincreasing in m and the bisection is
// well defined. Probes record the per-m frequency with its 99% CI.
struct MProbe {
    int m = 0;
    int successes = 0, trials = 0;
    double ci_lo = 0, ci_hi = 1;
};
struct MEstimate {
    int value = 0;
    std::vector<MProbe> probes;
};
MEstimate estimate_M(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
                     const Rational& eps, const Rational& delta, int trials, std::uint64_t seed,
                     int m_cap = 1 << 20);

// Empirical ñ_{1:m}(δ) (Definition td-hat): the smallest b with
// #{trials: n̂_{1:m} ≤ b}/T ≥ 1−δ. `values` is the sorted per-trial sample.
struct QuantileNhat {
    int value = 0;
    std::vector<int> values;
};
QuantileNhat quantile_nhat(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
                           int m, const Rational& delta, int trials, std::uint64_t seed);

// CAL label-complexity curve: per budget, mean labels requested, mean final
// error, mean final 𝒫(DIS), and the §4 selective-classification coverage
// 1 − mean 𝒫(DIS) — all exact rationals.
struct CalCurveRow {
    int budget = 0;
    Rational mean_labels, mean_error, mean_dis, coverage;
};
struct CalCurve {
    std::vector<CalCurveRow> rows;
};
CalCurve cal_curve(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
                   const std::vector<int>& budgets, int trials, std::uint64_t seed);
std::string to_csv(const CalCurve& curve);

// Lower-bound scenario runner. Realizable: event {sup_{h∈V_m} er(h) ≥ ε}.
// Noisy: event {excess of lowest-index ERM hypothesis ≥ (ζ/2)(1−2β)}.
// Verdicts for m below the scenario's regime bound: realizable PASS iff the
// 99% CI lower endpoint > 1/2 (Theorem erm-lb's "with probability greater
// than 1/2"); noisy claims failure probability > δ for every δ ∈ (0,1/4),
// i.e. ≥ 1/4, which a finite CI can refute but not confirm (the true rate may
// sit exactly at 1/4), so the noisy verdict is refutation-style: FAIL iff the
// CI lies wholly below 1/4. Above the regime the row is informational ("n/a").
struct LowerBoundRow {
    int m = 0;
    int hits = 0, trials = 0;
    double rate = 0, ci_lo = 0, ci_hi = 1;
    std::string verdict; // "PASS" | "FAIL" | "n/a"
};
struct LowerBoundReport {
    std::string kind;
    double regime = 0;
    Rational threshold;
    std::vector<LowerBoundRow> rows;
};
LowerBoundReport run_lower_bound(const LowerBoundScenario& s, const std::vector<int>& m_grid,
                                 int trials, std::uint64_t seed);
std::string to_json(const LowerBoundReport& report);

} // namespace vslab
