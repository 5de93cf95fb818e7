#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vslab/concept_core.hpp"
#include "vslab/noise.hpp"
#include "vslab/rational.hpp"
#include "vslab/version_space.hpp"

namespace vslab {

// ---------------------------------------------------------------------------
// The paper's learning algorithms: abstract consistent monotone rules (§2),
// the Closure algorithm for intersection-closed classes (§3), the CAL active
// learner (§4), exact ERM (§6), and Appendix Algorithm 1 (Theorem zc-noise).
// Every run is a pure function of (inputs, seed); seeded draws go through
// PointSampler/LabelSampler so streams align across algorithms.
// ---------------------------------------------------------------------------

// The two concrete ψ_t instances the paper analyzes: the Closure algorithm's
// error region ⋃_{h∈ℂ[ℒ_t]} {x : h(x) = −1, f*(x) = +1} (§3, requires an
// intersection-closed class) and DIS(ℂ[ℒ_t]) (§4).
enum class MonotoneRule { closure_error_region, dis_version_space };

// One step t: the region A_t = ψ_t(Z_1..Z_t), its mass, and the §2 defining
// properties — re-verified at runtime on every step, never assumed.
struct MonotoneRuleStep {
    std::vector<int> region;  // A_t, ascending point indices
    Rational mass;            // 𝒫(A_t)
    bool consistent = false;  // A_t ∩ {Z_1..Z_t} = ∅
    bool monotone = false;    // A_t ⊆ A_{t−1}, with A_0 = ψ_0()
    int witness_size = 0;     // exact n̂ of the labeled prefix ℒ_t
};

struct MonotoneRuleTrace {
    MonotoneRule rule{};
    std::vector<int> points;             // Z_1..Z_m
    std::vector<MonotoneRuleStep> steps; // t = 1..m
    Rational final_mass;                 // 𝒫(A_m), the Theorem monotone-erm quantity
};

// Samples Z_1..Z_m i.i.d. from dist with target labels (realizable) and runs
// the chosen rule. Preconditions: m ≥ 1, target ∈ ℂ, and for the closure
// rule is_intersection_closed(c). The stream is RngStream(seed).
MonotoneRuleTrace run_monotone_rule(MonotoneRule rule, const ConceptClass& c,
                                    const Distribution& dist, const Hypothesis& target,
                                    int m, std::uint64_t seed);

// CSV form: "step,mass,consistent,monotone,witness_size" plus one row per t.
std::string trace_csv(const MonotoneRuleTrace& trace);

// Closure algorithm prediction (§3): ĥ_m(x) = +1 iff every h ∈ ℂ[sample] has
// h(x) = +1, i.e. the pointwise AND of positive sets over the version space.
// The output lies in the closure hull C̄ (not necessarily in ℂ) and has zero
// empirical error. Errors: class not intersection-closed, or ℂ[sample] = ∅.
Hypothesis closure_predict(const ConceptClass& c, const LabeledSample& sample);

// CAL(n) run record (§4 boxed algorithm).
struct CalRunRecord {
    int budget = 0;                 // n
    int labels = 0;                 // t: labels requested; t ≤ n
    std::int64_t samples = 0;       // m: unlabeled examples consumed; m ≤ 2^n
    int final_hyp = -1;             // lowest-index member of V_m
    std::vector<int> query_indices; // 1-based i with X_i ∈ DIS(V_{i−1})
    std::vector<Rational> dis_mass; // 𝒫(DIS(V_j)) for j = 0..m
};

// Faithful simulation: While t < n and m < 2^n, draw X_m and query its label
// iff X_m ∈ DIS(V_{m−1}). Verifies V_m = ℂ[ℒ_m] (against the full labeled
// prefix, inferred labels included) and f* ∈ V_m at every step. Once
// 𝒫(DIS(V_m)) = 0 no later draw can change V_m or t, so the remaining
// iterations are skipped; `samples` reports draws actually consumed.
CalRunRecord run_cal(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
                     int n, std::uint64_t seed);

std::string to_json(const CalRunRecord& rec);

// ERM(ℂ,L) = {h ∈ ℂ : er_L(h) = min_g er_L(g)} (§6). Exact; the empty sample
// gives all of ℂ, realizable samples give exactly ℂ[L].
VersionSpaceView erm_set(const ConceptClass& c, const LabeledSample& sample);

// U(ℋ,m,δ;R) of Lemma gk-envelopes:
//   1 ∧ inf_{r > diam(ℋ)} c₀√(r(vc(ℋ)Log(𝒫(R)/r) + Log(1/δ))/m)
//                        + c₀(vc(ℋ)Log(𝒫(R)/r) + Log(1/δ))/m,
// with vc(view) and diam exact; the infimum is evaluated over the documented
// candidate grid {diam, 𝒫(R)} ∪ 512 geometric points on [max(diam,1e−9), 1].
// Preconditions: view nonempty, m ≥ 1, δ ∈ (0,1), c0 > 1.
double u_complexity(const VersionSpaceView& view, std::int64_t m, double delta,
                    const std::vector<int>& region, const Distribution& dist, double c0);

struct Algo1Round {
    int k = 0;
    double eta_k = 0;        // proof schedule: η_0 = 2/c, η_k = (2/c)(r_k/a)^{1/α}
    double delta_k = 0;      // δ/(log₂(2m)−k)², exactly as stated
    Rational region_mass;    // 𝒫(R_k)
    std::vector<int> region; // R_k = {x : γ_k(x) = 1}
    int gk_size = 0;         // |𝒢_k| entering the round
    int dk_size = 0;         // |D_k|
    double u_value = 0;      // U(𝒢_k, 2^k, δ_k; R_k)
    BitVec g_next;           // 𝒢_{k+1}
};

struct Algo1RunRecord {
    std::int64_t m = 0;
    int rounds = 0; // ⌊log₂ m⌋
    std::vector<Algo1Round> per_round;
    int final_hyp = -1; // lowest-index member of 𝒢_{⌊log₂ m⌋}
};

// Appendix Algorithm 1. Rounds k = 0..⌊log₂m⌋−1; γ_k solves Φ_{0,1}(𝒢_k,η_k)
// exactly (binary branch-and-bound, `phi_budget` nodes); D_k is the samples
// indexed 2^k+1..2^{k+1} that fall in R_k; the retention rule keeps h with
// 2^{−k}|D_k|(er_{D_k}(h) − min er_{D_k}) ≤ max{4η_k, U(𝒢_k,2^k,δ_k;R_k)}.
// η_k follows the Theorem zc-noise proof schedule with c = 128 and
// c₁ = (32c₀)^{2α/(2−α)}; a and α are the Bernstein parameters the proof
// assumes, and c0 is Lemma gk-envelopes' unspecified universal constant,
// exposed as a knob. Samples with index > 2^{⌊log₂m⌋} are never drawn.
// Preconditions: m ≥ 2, δ ∈ (0,1), a ≥ 1, α ∈ (0,1], c0 > 1.
Algo1RunRecord run_algorithm1(const ConceptClass& c, const Distribution& dist,
                              const NoiseModel& noise, std::int64_t m, double delta,
                              const Rational& a, double alpha, double c0, std::uint64_t seed,
                              std::uint64_t phi_budget = 1'000'000);

std::string to_json(const Algo1RunRecord& rec);

} // namespace vslab
