#pragma once

#include <string>
#include <vector>

#include "vslab/concept_core.hpp"
#include "vslab/rng.hpp"
#include "vslab/version_space.hpp"

namespace vslab {

// ---------------------------------------------------------------------------
// Label noise (§6): a joint distribution 𝒫_XY is the marginal 𝒫 plus the
// conditional η(x) = P(Y = +1 | X = x), held exactly.
// ---------------------------------------------------------------------------

struct NoiseModel {
    std::vector<Rational> eta_plus; // η(x) per point

    int n() const { return static_cast<int>(eta_plus.size()); }
    bool empty() const { return eta_plus.empty(); }
    void validate() const; // entries in [0,1]
};

// "vslab-noise v1": header line, then n decimal η values, one per line.
void save_noise(const NoiseModel& noise, const std::string& path);
NoiseModel load_noise(const std::string& path);

// Deterministic labels: η(x) = 1 where target is +1, else 0.
NoiseModel noise_from_target(const Hypothesis& target);

// β-bounded noise (§6, "P(Y ≠ h*(X) | X) ≤ β almost surely"): flip
// probability exactly β on flip_set, 0 elsewhere. β ∈ [0, 1/2).
NoiseModel bounded_noise_from(const Hypothesis& target, const Rational& beta,
                              const std::vector<int>& flip_set);

// Exact er(h) = Σ_x 𝒫(x)·P(Y ≠ h(x) | x).
Rational noisy_error(const Distribution& dist, const NoiseModel& noise, const Hypothesis& h);

// ---------------------------------------------------------------------------
// Bernstein class condition (§6): 𝒫(x : h(x) ≠ h*(x)) ≤ a·(er(h) − er(h*))^α
// for every h ∈ ℂ, with h* the exact in-class risk minimizer (lexicographic
// tie-break). α = 1 and α = 0 compare exactly in rationals; fractional α
// compares in double (the exponent is irrational in general).
// ---------------------------------------------------------------------------

struct BernsteinResult {
    bool ok = true;
    int hstar = -1;    // exact risk minimizer
    int violator = -1; // lowest-index violator when !ok
    Rational distance; // 𝒫(violator ≠ h*)
    Rational excess;   // er(violator) − er(h*)
};

BernsteinResult bernstein_check(const ConceptClass& c, const Distribution& dist,
                                const NoiseModel& noise, const Rational& a, double alpha);

// ---------------------------------------------------------------------------
// The paper's adversarial lower-bound scenarios, built on the class's own
// star set (Definition "star" witness).
//
// realizable_star (Theorem erm-lb proof): M = min{𝔰, ⌊(1+ε)/ε⌋} star points;
//   𝒫(x_i) = ε for i ∈ {2..M}, 𝒫(x_1) = 1 − (M−1)ε; target f* = h_0. Any
//   coupon point missing from the sample leaves its h_i in V_m, so
//   sup_{V_m} er ≥ ε.
// noisy_star (Appendix, P_{k,ζ,t}): 𝒫(x_i) = ζ for i ∈ [k],
//   𝒫(x_{k+1}) = 1 − kζ; P(Y = h_t(X) | x_i) = 1 − β on i ∈ [k] and = 1 on
//   x_{k+1}. h_t is the exact risk minimizer; h_0 has excess ζ(1−2β) and the
//   other h_j have 2ζ(1−2β).
// ---------------------------------------------------------------------------

struct LowerBoundScenario {
    std::string kind; // "realizable_star" | "noisy_star"
    const ConceptClass* cls = nullptr;
    Distribution dist;
    NoiseModel noise;             // noisy_star only; empty when realizable
    int h0 = -1;                  // star center
    std::vector<int> star_points; // x_1.. (realizable: M; noisy: k+1)
    std::vector<int> star_hyps;   // h_1.. matching star_points
    int target = -1;              // f* = h_0 (realizable) or h_t (noisy)
    int k = 0;                    // coupon points M−1 (realizable) / flip points (noisy)
    int t = 0;                    // noisy: t ∈ [k]; 0 when realizable
    Rational epsilon;             // realizable only
    Rational zeta, beta;          // noisy only
    Rational threshold;           // claimed excess threshold: ε / (ζ/2)(1−2β)
};

struct LowerBoundParams {
    Rational epsilon; // realizable_star: ε ∈ (0, 1/48)
    int k = 0;        // noisy_star: k ≥ 2, k ≤ ⌊1/ζ⌋
    Rational zeta;    // noisy_star: ζ ∈ (0, 1]
    Rational beta;    // noisy_star: β ∈ (0, 1/2)
    int t = 1;        // noisy_star: t ∈ [k] (1-based)
};

LowerBoundScenario lower_bound_construction(const std::string& kind, const ConceptClass& c,
                                            const LowerBoundParams& params);

// Sample sizes m strictly below this bound fail (excess ≥ threshold) with
// probability > 1/2 in the realizable scenario ((1/(2ε))·ln(min{𝔰−1,⌊1/ε⌋}),
// coupon collector + Chebyshev), and with probability > δ for every
// δ ∈ (0,1/4) in the noisy scenario (3β·ln(k/96)/(16ζ(1−2β)²), Lemma
// rr11-star; vacuous — returns 0 — unless k ≥ 96e).
double lower_bound_regime(const LowerBoundScenario& s);

// "vslab-scenario v1": exact-rational text form. load checks the class name
// and rebinds the pointer; save(load(save(x))) is byte-identical.
void save_scenario(const LowerBoundScenario& s, const std::string& path);
LowerBoundScenario load_scenario(const std::string& path, const ConceptClass& c);

// ---------------------------------------------------------------------------
// Seeded sampling. Point draws invert floor(CDF·2⁶⁴) thresholds with one
// u64 per draw; label draws always consume exactly one u64 (even when the
// conditional is deterministic), so samples from labelers that agree
// pointwise are identical on the same stream.
// ---------------------------------------------------------------------------

class PointSampler {
public:
    explicit PointSampler(const Distribution& dist);
    int draw(RngStream& rng) const;

private:
    std::vector<std::uint64_t> thresholds_; // floor(CDF_i·2⁶⁴) where < 2⁶⁴
};

class LabelSampler {
public:
    explicit LabelSampler(const Hypothesis& target);
    explicit LabelSampler(const NoiseModel& noise);
    int draw(int point, RngStream& rng) const; // label in {-1, +1}

private:
    std::vector<std::uint64_t> thresholds_; // floor(η(x)·2⁶⁴)
    std::vector<char> always_pos_;          // η(x) = 1 exactly
};

LabeledSample sample_labeled(const Distribution& dist, const Hypothesis& target, int m, RngStream& rng);
LabeledSample sample_labeled(const Distribution& dist, const NoiseModel& noise, int m, RngStream& rng);

} // namespace vslab
