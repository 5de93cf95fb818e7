#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vslab/concept_core.hpp"
#include "vslab/rational.hpp"

namespace vslab {

// ---------------------------------------------------------------------------
// Distribution 𝒫 over the instance space, held as exact rationals so region
// masses and error rates carry no float drift. Entries must be >= 0 and sum
// to 1 within 1e-12 (not renormalized; the stored values are what you get).
// ---------------------------------------------------------------------------

struct Distribution {
    std::vector<Rational> mass;

    int n() const { return static_cast<int>(mass.size()); }

    static Distribution uniform(int n);
    static Distribution from_decimals(const std::vector<std::string>& decimals);
    void validate() const;
};

// "vslab-dist v1": header line, then n decimal masses, one per line.
void save_distribution(const Distribution& d, const std::string& path);
Distribution load_distribution(const std::string& path);

// Ordered, possibly repeating labeled sample ℒ_m.
struct LabeledSample {
    std::vector<std::pair<int, int>> pairs; // (point index, label in {-1,+1})

    int m() const { return static_cast<int>(pairs.size()); }
    void push(int point, int label) { pairs.emplace_back(point, label); }
};

// Subset of hypothesis indices consistent with some sample.
struct VersionSpaceView {
    const ConceptClass* cls = nullptr;
    BitVec members;

    int count() const { return members.count(); }
    bool empty() const { return members.none(); }
    bool contains(int h) const { return members.get(h); }
    int lowest_index() const { return members.find_first(); }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// ℂ[sample]; ℂ[∅] = ℂ. Empty result is representable, not an error.
VersionSpaceView version_space(const ConceptClass& c, const LabeledSample& sample);
VersionSpaceView version_space(const ConceptClass& c, const ClassIndex& idx, const LabeledSample& sample);

// DIS(view): points where some pair of members disagrees. Errors on empty view.
std::vector<int> disagreement_region(const VersionSpaceView& view);

// Exact 𝒫-mass of a point set.
Rational region_mass(const Distribution& dist, const std::vector<int>& region);

// Version-space compression set (Definition "td-hat").
enum class CompressionMode { exact, greedy };

struct CompressionResult {
    int nhat = 0;
    LabeledSample witness;        // ℂ[witness] = ℂ[sample], deduplicated pairs
    CompressionMode mode = CompressionMode::exact; // greedy results are upper bounds
};

// exact: minimum-cardinality witness via increasing-size search over distinct
// pairs with forced-pair pruning — (x,y) is forced iff x ∈ DIS(ℂ[ℒ∖{(x,y)}]),
// so every witness must contain it (§4 expectation argument). The returned
// witness is the lexicographically first minimal subset (pair order = first
// occurrence in the sample). greedy: delete-one-at-a-time upper bound.
// budget counts subset evaluations; exceeding it throws BudgetExceeded.
CompressionResult compression_set_size(const ConceptClass& c, const LabeledSample& sample,
                                       CompressionMode mode = CompressionMode::exact,
                                       std::uint64_t budget = 10'000'000);

// n̂_{1:m} = max over prefixes t=1..m of the exact n̂ of the target-labeled
// prefix. Exact mode at every prefix.
int prefix_max_nhat(const ConceptClass& c, const std::vector<int>& points, const Hypothesis& target,
                    std::uint64_t budget = 10'000'000);

// Incremental form of prefix_max_nhat for Monte Carlo loops: feed sampled
// points one at a time; n̂ of the current prefix is recomputed exactly at
// every step (forced-pair fast path; combinatorial search fallback under the
// per-step budget).
class NhatTracker {
public:
    NhatTracker(const ConceptClass& c, const ClassIndex& idx, const Hypothesis& target,
                std::uint64_t budget = 10'000'000);

    void push(int point);
    int current_nhat() const { return current_; }
    int running_max() const { return running_max_; }

private:
    const ConceptClass* cls_;
    const ClassIndex* idx_;
    const Hypothesis* target_;
    std::uint64_t budget_;
    std::vector<std::pair<int, int>> pairs_; // distinct, first-occurrence order
    std::vector<BitVec> masks_;
    BitVec seen_points_;
    BitVec full_;
    int current_ = 0;
    int running_max_ = 0;
};

// sup_{h in view} 𝒫(x : h(x) != target(x)); exact. Errors on empty view.
Rational worst_consistent_error(const VersionSpaceView& view, const Distribution& dist, const Hypothesis& target);

// Exact 𝒫-distance between two labelings (shared helper).
Rational point_distance(const Distribution& dist, const BitVec& a, const BitVec& b);

} // namespace vslab
