#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vslab/bits.hpp"
#include "vslab/errors.hpp"

namespace vslab {

// ---------------------------------------------------------------------------
// Domain types (paper §1.1): instance space 𝒳, classifier h, class ℂ.
// ---------------------------------------------------------------------------

struct InstanceSpace {
    std::vector<std::string> points; // unique opaque identifiers
    int n() const { return static_cast<int>(points.size()); }
};

// A classifier over a finite instance space, stored as a packed bit vector:
// bit i set <=> h(x_i) = +1.
struct Hypothesis {
    BitVec pos;
    int n() const { return pos.size(); }
    int label(int i) const { return pos.get(i) ? +1 : -1; }
};

struct ConceptClass {
    InstanceSpace space;
    std::vector<Hypothesis> hypotheses; // deduplicated label vectors
    std::string name;

    int n() const { return space.n(); }
    int size() const { return static_cast<int>(hypotheses.size()); }
};

// Validates invariants (unique point ids, consistent lengths, no duplicate
// hypotheses, |C| >= 3 per the paper's standing assumption) and returns the
// finished class. All generators funnel through this.
ConceptClass finish_class(InstanceSpace space, std::vector<BitVec> labelings, std::string name);

// ---------------------------------------------------------------------------
// Generators. Descriptor strings: thresholds(n), intervals(n), singletons(n),
// star(k), powerset(n<=20), conjunctions(p<=12), axis_rectangles(WxH, W*H<=24),
// at_most_d_positive(n,d), from_file(path).
// ---------------------------------------------------------------------------

struct ClassSpec {
    std::string kind;
    long long a = 0, b = 0;
    std::string path;
};

ClassSpec parse_class_spec(const std::string& descriptor);
ConceptClass make_class(const ClassSpec& spec);
ConceptClass make_class(const std::string& descriptor);

// "vslab-class v1" file format; save(load(x)) is byte-identical for files
// produced by save (loads deduplicate silently, so arbitrary input files are
// canonicalized rather than preserved).
void save_class(const ConceptClass& c, const std::string& path);
ConceptClass load_class(const std::string& path);

// ---------------------------------------------------------------------------
// Combinatorial measures.
// ---------------------------------------------------------------------------

// Exact VC dimension by exhaustive shattering search in increasing subset
// size with early exit (no k-subset shattered => vc = k-1).
int vc_dimension(const ConceptClass& c);
// Same, restricted to the hypotheses in `members` (used by U(H,m,δ;R)).
int vc_dimension(const ConceptClass& c, const BitVec& members);

struct StarNumber {
    int value = 0;        // exact when !exceeds_cap; otherwise 𝔰 >= cap
    bool exceeds_cap = false;
};

// Exact star number (Definition "star"): largest s <= cap admitting distinct
// points x_1..x_s and h_0,h_1..h_s in ℂ with DIS({h_0,h_i}) ∩ {x_1..x_s} =
// {x_i}. Search is exhaustive over h_0 with backtracking over point sets
// (feasibility is hereditary, so depth-first growth with pruning is exact).
// cap < 0 means the default cap n (a star sequence cannot repeat points, so
// the result is then always exact).
StarNumber star_number(const ConceptClass& c, int cap = -1, int max_points = 64);

// A concrete star set: center h0 plus points[i] each witnessed by hyps[i]
// (DIS({h0, hyps[i]}) ∩ points = {points[i]}). Points ascend; used by the
// lower-bound constructions, which place mass on the class's own star set.
struct StarWitness {
    int h0 = -1;
    std::vector<int> points;
    std::vector<int> hyps;
};

// Canonical star set of exactly `size` points: lowest feasible center index,
// then the first point set in the backtracking order (lexicographically
// minimal), then the lowest witness hypothesis per point. Throws
// ParameterError if the class has no star set that large.
StarWitness star_witness(const ConceptClass& c, int size, int max_points = 64);

// True iff for every pair of hypotheses the AND of their positive sets is
// realized in the class. pair_cap guards the quadratic scan.
bool is_intersection_closed(const ConceptClass& c, std::size_t pair_cap = 1u << 16);

// Closure hull C̄: all intersections of positive sets over nonempty subsets,
// computed as the fixed point of pairwise intersection. Original hypotheses
// keep their order; new labelings are appended in canonical (lexicographic)
// order. Errors if |C̄| would exceed size_cap.
ConceptClass closure_hull(const ConceptClass& c, std::size_t size_cap = 1u << 20);

// ---------------------------------------------------------------------------
// Shared consistency index: for each point, the mask (over hypothesis
// indices) of hypotheses labeling it +1. Built once, reused by the
// version-space and learner machinery.
// ---------------------------------------------------------------------------

struct ClassIndex {
    std::vector<BitVec> pos; // pos[x] over hypothesis indices
    BitVec all;              // every hypothesis

    static ClassIndex build(const ConceptClass& c);
};

} // namespace vslab
