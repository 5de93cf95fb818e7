#pragma once

#include <cstdint>
#include <vector>

#include "vslab/concept_core.hpp"
#include "vslab/rational.hpp"
#include "vslab/version_space.hpp"

namespace vslab {

// ---------------------------------------------------------------------------
// Distribution-dependent complexity measures (paper §4–§6): disagreement
// coefficient θ, the LP quantities Φ / φ_c / φ̂_{a,α} of Definition "zc",
// covering and packing numbers, and the doubling dimension. Everything here
// is exact rational arithmetic except the final log₂ in the doubling
// dimension; Φ optima come with machine-checkable certificates.
// ---------------------------------------------------------------------------

// Feasible point of the Φ LP: γ(x)+ζ(x)+ξ(x) = 1 with all entries in [0,1],
// and E[1[h(X)=+1]ζ(X) + 1[h(X)=-1]ξ(X)] <= η for every h in the view.
// In binary mode γ(x) ∈ {0,1}. Vectors run over the full instance space.
struct WeightingCertificate {
    std::vector<Rational> gamma, zeta, xi;
    bool binary = false;
};

struct PhiResult {
    Rational value; // E[γ(X)] at the optimum
    WeightingCertificate cert;
};

enum class PhiMode { real, binary };

// Φ(view, η) (Definition "zc"): exact LP optimum in real mode; exact optimum
// over γ ∈ {0,1} in binary mode via branch-and-bound with the real LP as the
// relaxation bound (node count limited by `budget`). Never infeasible (γ≡1
// always works). Preconditions: nonempty view, η >= 0.
PhiResult phi(const VersionSpaceView& view, const Distribution& dist, const Rational& eta,
              PhiMode mode = PhiMode::real, std::uint64_t budget = 1'000'000);

// Recheck a certificate against every constraint in rational arithmetic and
// confirm E[γ] equals `value`. Used by tests; cheap enough to run always.
bool verify_certificate(const VersionSpaceView& view, const Distribution& dist, const Rational& eta,
                        const WeightingCertificate& cert, const Rational& value);

// Distances 𝒫(x : h(x) != center(x)) over h ∈ ℂ: sorted distinct radii with
// cumulative ball-membership masks. ball_members[i] = {h : dist <= radii[i]}.
struct RadiusProfile {
    std::vector<Rational> radii;
    std::vector<BitVec> ball_members;

    static RadiusProfile build(const ConceptClass& c, const Distribution& dist, const Hypothesis& center);
};

// B(center, r) = {h ∈ ℂ : 𝒫(x : h(x) != center(x)) <= r} (§4). Closed ball;
// center must belong to the class.
VersionSpaceView ball(const ConceptClass& c, const Hypothesis& center, const Rational& r,
                      const Distribution& dist);

// θ(r₀) = sup_{r>r₀} 𝒫(DIS(B(f*,r)))/r ∨ 1 (§4). The ball is piecewise
// constant between the finitely many distance breakpoints, so the supremum
// is attained on {right-limit at r₀} ∪ {breakpoints > r₀}; the right-limit
// equals 𝒫(DIS(B(f*,r₀)))/r₀ (and vanishes when r₀ = 0).
Rational disagreement_coefficient(const ConceptClass& c, const Distribution& dist,
                                  const Hypothesis& target, const Rational& r0);

// φ_c(r₀) = sup_{r₀<r<=1} Φ(B(f*,r), r/c)/r ∨ 1 (Definition "zc"), exact by
// the same breakpoint argument; the right-limit term evaluates
// Φ(B(f*,r₀), r₀/c)/r₀ since Φ is continuous in η. Requires c > 1,
// 0 <= r₀ < 1.
Rational phi_c(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
               const Rational& r0, const Rational& cc);

// φ̂_{a,α}(r₀) = sup_{h∈ℂ} sup_{r>r₀} Φ(B(h,r), (r/a)^{1/α}/c)/r ∨ 1 (§6.2),
// with φ̂_{a,α}(r₀) = 1 for r₀ >= 1 per the paper's convention. For α = 1 the
// thresholds (r/a)/c stay rational and the value is fully exact; for α < 1
// each threshold is the exact rational value of the double (r/a)^{1/α}/c,
// after which the LP is again exact. Requires a >= 1, α ∈ (0,1], c > 1.
Rational phi_hat_noise(const ConceptClass& c, const Distribution& dist, const Rational& a,
                       double alpha, const Rational& r0, const Rational& cc);

enum class CoverMode { exact, greedy };

// Candidate centers for covering balls. The paper permits arbitrary
// classifiers as centers; `all_labelings` enumerates every labeling of the
// instance space (faithful, capped at n <= 20) and is the default.
// `members` restricts centers to labelings realized by the view's members
// (an upper bound on the true covering number; unlimited n).
enum class CenterMode { all_labelings, members };

// 𝒩(radius, view, 𝒫): minimum number of balls of the given radius covering
// the view's members. Exact mode is set-cover branch-and-bound (node count
// limited by `budget`, which also meters candidate-center enumeration);
// greedy mode is the standard upper bound.
int covering_number(const VersionSpaceView& view, const Distribution& dist, const Rational& radius,
                    CoverMode mode = CoverMode::exact, CenterMode centers = CenterMode::all_labelings,
                    std::uint64_t budget = 10'000'000);

// Greedy maximal packing: member indices, pairwise distances > radius,
// lexicographic insertion order. Satisfies 𝒩(r) <= |packing(r)| for the same
// radius and the Appendix sandwich 𝒩(r/2,B) <= |G_r| <= 𝒩(r/4,B).
std::vector<int> packing(const VersionSpaceView& view, const Distribution& dist, const Rational& radius);

// D(r₀) = max_{r>=r₀} log₂ 𝒩(r/2, B(f*,r), 𝒫) (§5.2). Exact covering numbers
// at the breakpoint radii; only the final log₂ is floating point. r₀ > 0.
double doubling_dimension(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
                          const Rational& r0, CenterMode centers = CenterMode::all_labelings,
                          std::uint64_t budget = 10'000'000);

} // namespace vslab
