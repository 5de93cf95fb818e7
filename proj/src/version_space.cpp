#include "vslab/version_space.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace vslab {

// ---------------------------------------------------------------------------
// Distribution
// ---------------------------------------------------------------------------

Distribution Distribution::uniform(int n) {
    if (n < 1) throw ParameterError("Distribution::uniform: n >= 1 required");
    Distribution d;
    d.mass.assign(n, Rational(1, n));
    return d;
}

Distribution Distribution::from_decimals(const std::vector<std::string>& decimals) {
    Distribution d;
    for (const auto& s : decimals) d.mass.push_back(parse_rational(s));
    d.validate();
    return d;
}

void Distribution::validate() const {
    Rational sum = 0;
    for (const auto& q : mass) {
        if (q < 0) throw ParameterError("Distribution: negative mass");
        sum += q;
    }
    const double err = std::abs(to_double(sum - Rational(1)));
    if (err > 1e-12)
        throw ParameterError("Distribution: masses sum to " + format_rational(sum) + ", off by more than 1e-12");
}

void save_distribution(const Distribution& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("save_distribution: cannot open '" + path + "'");
    out << "vslab-dist v1\n";
    for (const auto& q : d.mass) out << format_double(to_double(q)) << '\n';
}

Distribution load_distribution(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("load_distribution: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "vslab-dist v1")
        throw ParameterError("load_distribution '" + path + "' line 1: expected header 'vslab-dist v1'");
    Distribution d;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            d.mass.push_back(parse_rational(line));
        } catch (const ParameterError& e) {
            throw ParameterError("load_distribution '" + path + "' line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    d.validate();
    return d;
}

// ---------------------------------------------------------------------------
// Version spaces
// ---------------------------------------------------------------------------

VersionSpaceView version_space(const ConceptClass& c, const LabeledSample& sample) {
    VersionSpaceView v;
    v.cls = &c;
    v.members = BitVec(c.size(), true);
    for (int h = 0; h < c.size(); ++h)
        for (const auto& [x, y] : sample.pairs)
            if (c.hypotheses[h].label(x) != y) {
                v.members.set(h, false);
                break;
            }
    return v;
}

VersionSpaceView version_space(const ConceptClass& c, const ClassIndex& idx, const LabeledSample& sample) {
    VersionSpaceView v;
    v.cls = &c;
    v.members = idx.all;
    for (const auto& [x, y] : sample.pairs)
        v.members &= (y > 0 ? idx.pos[x] : ~idx.pos[x]);
    return v;
}

std::vector<int> disagreement_region(const VersionSpaceView& view) {
    if (view.empty()) throw ParameterError("disagreement_region: empty version space");
    const ConceptClass& c = *view.cls;
    std::vector<int> region;
    const int first = view.members.find_first();
    for (int x = 0; x < c.n(); ++x) {
        const bool ref = c.hypotheses[first].pos.get(x);
        for (int h = view.members.find_next(first); h >= 0; h = view.members.find_next(h)) {
            if (c.hypotheses[h].pos.get(x) != ref) {
                region.push_back(x);
                break;
            }
        }
    }
    return region;
}

Rational region_mass(const Distribution& dist, const std::vector<int>& region) {
    Rational sum = 0;
    for (int x : region) sum += dist.mass[x];
    return sum;
}

Rational point_distance(const Distribution& dist, const BitVec& a, const BitVec& b) {
    Rational sum = 0;
    for (int x = 0; x < dist.n(); ++x)
        if (a.get(x) != b.get(x)) sum += dist.mass[x];
    return sum;
}

// ---------------------------------------------------------------------------
// Compression sets
// ---------------------------------------------------------------------------

namespace {

// Distinct pairs in first-occurrence order, with per-pair consistency masks.
struct DistinctPairs {
    std::vector<std::pair<int, int>> pairs;
    std::vector<BitVec> mask; // hypotheses consistent with the pair

    static DistinctPairs build(const ConceptClass& c, const ClassIndex& idx, const LabeledSample& sample) {
        DistinctPairs d;
        std::map<std::pair<int, int>, bool> seen;
        for (const auto& p : sample.pairs) {
            if (seen.emplace(p, true).second) {
                d.pairs.push_back(p);
                d.mask.push_back(p.second > 0 ? idx.pos[p.first] : ~idx.pos[p.first]);
            }
        }
        (void)c;
        return d;
    }
};

bool dis_contains(const ClassIndex& idx, const BitVec& members, int x) {
    return members.intersects(idx.pos[x]) && members.intersects(~idx.pos[x]);
}

// Exact minimum witness over a distinct-pair list. Returns chosen indices
// (into the distinct list) sorted ascending. Forced pairs first: (x,y) is
// forced iff x is in the disagreement region of ℂ[distinct pairs minus
// (x,y)]; every witness must contain every forced pair, so if the forced set
// alone induces ℂ[ℒ] it is the unique minimum witness. Otherwise an
// increasing-size search over additions in lexicographic order yields the
// lexicographically first minimal witness (all witnesses contain the forced
// set, and merging additions with the fixed forced set preserves their
// lexicographic order).
std::vector<int> exact_min_witness(const ClassIndex& idx, const std::vector<std::pair<int, int>>& pairs,
                                   const std::vector<BitVec>& masks, const BitVec& full, std::uint64_t budget) {
    const int D = static_cast<int>(pairs.size());
    auto induces = [&](const std::vector<int>& chosen) {
        BitVec v = idx.all;
        for (int i : chosen) v &= masks[i];
        return v == full;
    };

    std::vector<BitVec> prefix(D + 1), suffix(D + 1);
    prefix[0] = idx.all;
    for (int i = 0; i < D; ++i) prefix[i + 1] = prefix[i] & masks[i];
    suffix[D] = idx.all;
    for (int i = D - 1; i >= 0; --i) suffix[i] = suffix[i + 1] & masks[i];

    std::vector<int> forced, rest;
    for (int i = 0; i < D; ++i) {
        const BitVec without = prefix[i] & suffix[i + 1];
        if (dis_contains(idx, without, pairs[i].first))
            forced.push_back(i);
        else
            rest.push_back(i);
    }

    std::uint64_t used = 0;
    auto charge = [&]() {
        if (++used > budget)
            throw BudgetExceeded("compression_set_size: exact search exceeded budget of " + std::to_string(budget) +
                                 " subset evaluations; retry with greedy mode");
    };

    charge();
    if (induces(forced)) return forced; // already sorted ascending

    const int R = static_cast<int>(rest.size());
    for (int extra = 1; extra <= R; ++extra) {
        std::vector<int> sel(extra);
        for (int i = 0; i < extra; ++i) sel[i] = i;
        while (true) {
            std::vector<int> chosen = forced;
            for (int i : sel) chosen.push_back(rest[i]);
            charge();
            if (induces(chosen)) {
                std::sort(chosen.begin(), chosen.end());
                return chosen;
            }
            int i = extra - 1;
            while (i >= 0 && sel[i] == R - extra + i) --i;
            if (i < 0) break;
            ++sel[i];
            for (int j = i + 1; j < extra; ++j) sel[j] = sel[j - 1] + 1;
        }
    }
    // Unreachable: taking every distinct pair induces ℂ[ℒ] by definition.
    throw ParameterError("compression_set_size: internal error (no witness found)");
}

} // namespace

CompressionResult compression_set_size(const ConceptClass& c, const LabeledSample& sample, CompressionMode mode,
                                       std::uint64_t budget) {
    const ClassIndex idx = ClassIndex::build(c);
    const DistinctPairs d = DistinctPairs::build(c, idx, sample);
    const int D = static_cast<int>(d.pairs.size());

    BitVec full = idx.all;
    for (int i = 0; i < D; ++i) full &= d.mask[i];
    if (full.none()) throw ParameterError("compression_set_size: empty version space");

    CompressionResult result;
    result.mode = mode;

    if (mode == CompressionMode::greedy) {
        auto induces = [&](const std::vector<int>& chosen) {
            BitVec v = idx.all;
            for (int i : chosen) v &= d.mask[i];
            return v == full;
        };
        std::vector<int> kept(D);
        for (int i = 0; i < D; ++i) kept[i] = i;
        for (int i = 0; i < D; ++i) {
            std::vector<int> trial;
            for (int j : kept)
                if (j != i) trial.push_back(j);
            if (trial.size() != kept.size() && induces(trial)) kept = std::move(trial);
        }
        result.nhat = static_cast<int>(kept.size());
        for (int i : kept) result.witness.push(d.pairs[i].first, d.pairs[i].second);
        return result;
    }

    const std::vector<int> chosen = exact_min_witness(idx, d.pairs, d.mask, full, budget);
    result.nhat = static_cast<int>(chosen.size());
    for (int i : chosen) result.witness.push(d.pairs[i].first, d.pairs[i].second);
    return result;
}

NhatTracker::NhatTracker(const ConceptClass& c, const ClassIndex& idx, const Hypothesis& target, std::uint64_t budget)
    : cls_(&c), idx_(&idx), target_(&target), budget_(budget), seen_points_(c.n()), full_(idx.all) {}

void NhatTracker::push(int point) {
    if (!seen_points_.get(point)) {
        seen_points_.set(point, true);
        const int y = target_->label(point);
        pairs_.emplace_back(point, y);
        masks_.push_back(y > 0 ? idx_->pos[point] : ~idx_->pos[point]);
        full_ &= masks_.back();
    }
    current_ = static_cast<int>(exact_min_witness(*idx_, pairs_, masks_, full_, budget_).size());
    running_max_ = std::max(running_max_, current_);
}

int prefix_max_nhat(const ConceptClass& c, const std::vector<int>& points, const Hypothesis& target,
                    std::uint64_t budget) {
    const ClassIndex idx = ClassIndex::build(c);
    NhatTracker tracker(c, idx, target, budget);
    for (int x : points) tracker.push(x);
    return tracker.running_max();
}

Rational worst_consistent_error(const VersionSpaceView& view, const Distribution& dist, const Hypothesis& target) {
    if (view.empty()) throw ParameterError("worst_consistent_error: empty version space");
    const ConceptClass& c = *view.cls;
    Rational worst = 0;
    for (int h = view.members.find_first(); h >= 0; h = view.members.find_next(h))
        worst = std::max(worst, point_distance(dist, c.hypotheses[h].pos, target.pos));
    return worst;
}

} // namespace vslab
