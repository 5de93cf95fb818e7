#include "vslab/concept_core.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace vslab {

namespace {

std::string point_name(int i) { return "p" + std::to_string(i); }

InstanceSpace linear_space(int n) {
    InstanceSpace s;
    s.points.reserve(n);
    for (int i = 0; i < n; ++i) s.points.push_back(point_name(i));
    return s;
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw ParameterError(msg);
}

} // namespace

ConceptClass finish_class(InstanceSpace space, std::vector<BitVec> labelings, std::string name) {
    const int n = space.n();
    require(n >= 1, "class '" + name + "': instance space must be nonempty");
    {
        std::unordered_set<std::string> seen;
        for (const auto& p : space.points)
            require(seen.insert(p).second, "class '" + name + "': duplicate point id '" + p + "'");
    }
    // Deduplicate silently (generators may collide), preserving first-seen order.
    std::vector<BitVec> uniq;
    std::set<BitVec> seen;
    for (auto& l : labelings) {
        require(l.size() == n, "class '" + name + "': hypothesis length mismatch");
        if (seen.insert(l).second) uniq.push_back(std::move(l));
    }
    require(uniq.size() >= 3,
            "class '" + name + "': |C| >= 3 required (paper's standing assumption), got " +
                std::to_string(uniq.size()));

    ConceptClass c;
    c.space = std::move(space);
    c.name = std::move(name);
    c.hypotheses.reserve(uniq.size());
    for (auto& l : uniq) c.hypotheses.push_back(Hypothesis{std::move(l)});
    return c;
}

ClassSpec parse_class_spec(const std::string& descriptor) {
    std::string s;
    for (char ch : descriptor)
        if (ch != ' ') s.push_back(ch);
    auto open = s.find('(');
    ClassSpec spec;
    if (open == std::string::npos) {
        spec.kind = s;
        return spec;
    }
    require(!s.empty() && s.back() == ')', "class spec '" + descriptor + "': missing ')'");
    spec.kind = s.substr(0, open);
    std::string args = s.substr(open + 1, s.size() - open - 2);
    if (spec.kind == "from_file") {
        spec.path = args;
        return spec;
    }
    // numeric args: "n", "n,d", or "WxH"
    for (char& ch : args)
        if (ch == 'x' || ch == 'X') ch = ',';
    std::stringstream ss(args);
    std::string tok;
    std::vector<long long> vals;
    while (std::getline(ss, tok, ',')) {
        try {
            vals.push_back(std::stoll(tok));
        } catch (const std::exception&) {
            throw ParameterError("class spec '" + descriptor + "': bad integer '" + tok + "'");
        }
    }
    require(!vals.empty() && vals.size() <= 2, "class spec '" + descriptor + "': expected 1-2 args");
    spec.a = vals[0];
    if (vals.size() == 2) spec.b = vals[1];
    return spec;
}

ConceptClass make_class(const std::string& descriptor) { return make_class(parse_class_spec(descriptor)); }

namespace {

ConceptClass make_thresholds(int n) {
    require(n >= 2 && n <= 4096, "thresholds(n): need 2 <= n <= 4096");
    std::vector<BitVec> hs;
    for (int t = 0; t <= n; ++t) { // h_t(x_i) = +1 iff i >= t
        BitVec h(n);
        for (int i = t; i < n; ++i) h.set(i, true);
        hs.push_back(h);
    }
    return finish_class(linear_space(n), std::move(hs), "thresholds(" + std::to_string(n) + ")");
}

ConceptClass make_intervals(int n) {
    require(n >= 2 && n <= 4096, "intervals(n): need 2 <= n <= 4096");
    std::vector<BitVec> hs;
    hs.emplace_back(n); // empty interval
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            BitVec h(n);
            for (int i = a; i <= b; ++i) h.set(i, true);
            hs.push_back(h);
        }
    return finish_class(linear_space(n), std::move(hs), "intervals(" + std::to_string(n) + ")");
}

ConceptClass make_singletons(int n) {
    require(n >= 3 && n <= 4096, "singletons(n): need 3 <= n <= 4096");
    std::vector<BitVec> hs;
    for (int i = 0; i < n; ++i) {
        BitVec h(n);
        h.set(i, true);
        hs.push_back(h);
    }
    return finish_class(linear_space(n), std::move(hs), "singletons(" + std::to_string(n) + ")");
}

ConceptClass make_star(int k) {
    require(k >= 2 && k <= 4096, "star(k): need 2 <= k <= 4096");
    std::vector<BitVec> hs;
    hs.emplace_back(k); // all-negative center
    for (int i = 0; i < k; ++i) {
        BitVec h(k);
        h.set(i, true);
        hs.push_back(h);
    }
    return finish_class(linear_space(k), std::move(hs), "star(" + std::to_string(k) + ")");
}

ConceptClass make_powerset(int n) {
    require(n >= 2 && n <= 20, "powerset(n): need 2 <= n <= 20 (capacity cap)");
    std::vector<BitVec> hs;
    hs.reserve(1u << n);
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
        BitVec h(n);
        for (int i = 0; i < n; ++i)
            if ((m >> i) & 1) h.set(i, true);
        hs.push_back(h);
    }
    return finish_class(linear_space(n), std::move(hs), "powerset(" + std::to_string(n) + ")");
}

ConceptClass make_conjunctions(int p) {
    require(p >= 1 && p <= 12, "conjunctions(p): need 1 <= p <= 12 (capacity cap)");
    const int n = 1 << p;
    InstanceSpace space;
    space.points.reserve(n);
    for (int x = 0; x < n; ++x) { // point = assignment, id "b<bits>", var 0 = leftmost
        std::string id = "b";
        for (int v = 0; v < p; ++v) id.push_back(((x >> v) & 1) ? '1' : '0');
        space.points.push_back(id);
    }
    // Each variable: 0 = absent, 1 = positive literal, 2 = negated literal.
    std::vector<BitVec> hs;
    long long total = 1;
    for (int v = 0; v < p; ++v) total *= 3;
    for (long long code = 0; code < total; ++code) {
        long long c = code;
        int lit[12];
        for (int v = 0; v < p; ++v) {
            lit[v] = static_cast<int>(c % 3);
            c /= 3;
        }
        BitVec h(n);
        for (int x = 0; x < n; ++x) {
            bool sat = true;
            for (int v = 0; v < p && sat; ++v) {
                const bool xv = (x >> v) & 1;
                if (lit[v] == 1 && !xv) sat = false;
                if (lit[v] == 2 && xv) sat = false;
            }
            h.set(x, sat);
        }
        hs.push_back(h);
    }
    hs.emplace_back(n); // the contradictory conjunction (all-negative)
    return finish_class(std::move(space), std::move(hs), "conjunctions(" + std::to_string(p) + ")");
}

ConceptClass make_axis_rectangles(int w, int h) {
    require(w >= 1 && h >= 1 && w * h <= 24, "axis_rectangles(WxH): need W*H <= 24");
    const int n = w * h;
    InstanceSpace space;
    for (int r = 0; r < h; ++r)
        for (int col = 0; col < w; ++col) space.points.push_back("g" + std::to_string(r) + "_" + std::to_string(col));
    std::vector<BitVec> hs;
    hs.emplace_back(n); // empty rectangle
    for (int r1 = 0; r1 < h; ++r1)
        for (int r2 = r1; r2 < h; ++r2)
            for (int c1 = 0; c1 < w; ++c1)
                for (int c2 = c1; c2 < w; ++c2) {
                    BitVec hyp(n);
                    for (int r = r1; r <= r2; ++r)
                        for (int col = c1; col <= c2; ++col) hyp.set(r * w + col, true);
                    hs.push_back(hyp);
                }
    return finish_class(std::move(space), std::move(hs),
                        "axis_rectangles(" + std::to_string(w) + "x" + std::to_string(h) + ")");
}

ConceptClass make_at_most_d_positive(int n, int d) {
    require(n >= 2 && n <= 64 && d >= 0 && d <= n, "at_most_d_positive(n,d): need 2 <= n <= 64, 0 <= d <= n");
    std::vector<BitVec> hs;
    const std::size_t size_cap = 1u << 20;
    // Enumerate subsets of size 0..d lexicographically.
    std::vector<int> idx;
    auto emit = [&](const std::vector<int>& sel) {
        BitVec h(n);
        for (int i : sel) h.set(i, true);
        hs.push_back(h);
        require(hs.size() <= size_cap, "at_most_d_positive: capacity cap exceeded");
    };
    emit({});
    for (int k = 1; k <= d; ++k) {
        idx.assign(k, 0);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            emit(idx);
            int i = k - 1;
            while (i >= 0 && idx[i] == n - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return finish_class(linear_space(n), std::move(hs),
                        "at_most_d_positive(" + std::to_string(n) + "," + std::to_string(d) + ")");
}

} // namespace

ConceptClass make_class(const ClassSpec& spec) {
    if (spec.kind == "thresholds") return make_thresholds(static_cast<int>(spec.a));
    if (spec.kind == "intervals") return make_intervals(static_cast<int>(spec.a));
    if (spec.kind == "singletons") return make_singletons(static_cast<int>(spec.a));
    if (spec.kind == "star") return make_star(static_cast<int>(spec.a));
    if (spec.kind == "powerset") return make_powerset(static_cast<int>(spec.a));
    if (spec.kind == "conjunctions") return make_conjunctions(static_cast<int>(spec.a));
    if (spec.kind == "axis_rectangles") return make_axis_rectangles(static_cast<int>(spec.a), static_cast<int>(spec.b));
    if (spec.kind == "at_most_d_positive")
        return make_at_most_d_positive(static_cast<int>(spec.a), static_cast<int>(spec.b));
    if (spec.kind == "from_file") return load_class(spec.path);
    throw ParameterError("unknown class generator '" + spec.kind + "'");
}

void save_class(const ConceptClass& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(bool(out), "save_class: cannot open '" + path + "'");
    out << "vslab-class v1\n" << c.n() << ' ' << c.size() << '\n';
    for (int i = 0; i < c.n(); ++i) out << (i ? " " : "") << c.space.points[i];
    out << '\n';
    for (const auto& h : c.hypotheses) {
        for (int i = 0; i < c.n(); ++i) out << (i ? " " : "") << (h.pos.get(i) ? "+1" : "-1");
        out << '\n';
    }
}

ConceptClass load_class(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(bool(in), "load_class: cannot open '" + path + "'");
    auto fail = [&](int line, const std::string& msg) -> void {
        throw ParameterError("load_class '" + path + "' line " + std::to_string(line) + ": " + msg);
    };
    std::string line;
    int lineno = 0;
    auto next_line = [&]() {
        if (!std::getline(in, line)) fail(lineno + 1, "unexpected end of file");
        ++lineno;
    };
    next_line();
    if (line != "vslab-class v1") fail(lineno, "expected header 'vslab-class v1'");
    next_line();
    int n = 0, H = 0;
    {
        std::stringstream ss(line);
        if (!(ss >> n >> H) || n < 1 || H < 1) fail(lineno, "expected 'n H'");
    }
    next_line();
    InstanceSpace space;
    {
        std::stringstream ss(line);
        std::string tok;
        while (ss >> tok) space.points.push_back(tok);
        if (space.n() != n) fail(lineno, "expected " + std::to_string(n) + " point ids");
    }
    std::vector<BitVec> labelings;
    for (int hidx = 0; hidx < H; ++hidx) {
        next_line();
        std::stringstream ss(line);
        BitVec h(n);
        std::string tok;
        for (int i = 0; i < n; ++i) {
            if (!(ss >> tok)) fail(lineno, "expected " + std::to_string(n) + " labels");
            if (tok == "+1")
                h.set(i, true);
            else if (tok != "-1")
                fail(lineno, "bad label token '" + tok + "'");
        }
        if (ss >> tok) fail(lineno, "trailing tokens");
        labelings.push_back(std::move(h));
    }
    return finish_class(std::move(space), std::move(labelings), path);
}

// ---------------------------------------------------------------------------
// VC dimension
// ---------------------------------------------------------------------------

namespace {

// Checks whether the point subset `pts` is shattered by the given labelings.
bool shattered(const std::vector<const BitVec*>& hyps, const std::vector<int>& pts) {
    const std::size_t want = 1u << pts.size();
    std::unordered_set<std::uint32_t> seen;
    seen.reserve(want * 2);
    for (const BitVec* h : hyps) {
        std::uint32_t pat = 0;
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (h->get(pts[j])) pat |= 1u << j;
        if (seen.insert(pat).second && seen.size() == want) return true;
    }
    return false;
}

// Iterates k-subsets of [0,n) in lexicographic order; returns true if any is
// shattered.
bool any_shattered(const std::vector<const BitVec*>& hyps, int n, int k) {
    std::vector<int> pts(k);
    for (int i = 0; i < k; ++i) pts[i] = i;
    while (true) {
        if (shattered(hyps, pts)) return true;
        int i = k - 1;
        while (i >= 0 && pts[i] == n - k + i) --i;
        if (i < 0) return false;
        ++pts[i];
        for (int j = i + 1; j < k; ++j) pts[j] = pts[j - 1] + 1;
    }
}

int vc_dimension_impl(const std::vector<const BitVec*>& hyps, int n) {
    // vc <= log2 |C|, and trivially vc <= n.
    int log2c = 0;
    while ((1ull << (log2c + 1)) <= hyps.size()) ++log2c;
    const int kmax = std::min(n, log2c);
    int d = 0;
    for (int k = 1; k <= kmax; ++k) {
        if (!any_shattered(hyps, n, k)) break;
        d = k;
    }
    return d;
}

} // namespace

int vc_dimension(const ConceptClass& c) {
    std::vector<const BitVec*> hyps;
    hyps.reserve(c.size());
    for (const auto& h : c.hypotheses) hyps.push_back(&h.pos);
    return vc_dimension_impl(hyps, c.n());
}

int vc_dimension(const ConceptClass& c, const BitVec& members) {
    std::vector<const BitVec*> hyps;
    for (int i = members.find_first(); i >= 0; i = members.find_next(i)) hyps.push_back(&c.hypotheses[i].pos);
    if (hyps.empty()) throw ParameterError("vc_dimension: empty member set");
    return vc_dimension_impl(hyps, c.n());
}

// ---------------------------------------------------------------------------
// Star number
// ---------------------------------------------------------------------------

namespace {

// Backtracking search for the largest feasible point set for a fixed h0.
// diffs[h] = positive-set XOR against h0. S is feasible iff every x in S has
// some h with diffs[h] & S == {x}; feasibility is hereditary (any subset of a
// feasible set is feasible), so incremental growth with pruning is exact.
struct StarSearch {
    int n;
    int cap;
    const std::vector<std::uint64_t>& diffs; // n <= 64: one word per hypothesis
    std::vector<std::vector<int>> at_point;  // hypotheses whose diff covers point x
    int best = 0;
    std::uint64_t best_set = 0;

    bool witness_exists(std::uint64_t S, int x) const {
        const std::uint64_t want = 1ull << x;
        for (int h : at_point[x])
            if ((diffs[h] & S) == want) return true;
        return false;
    }

    bool feasible_with(std::uint64_t S) const {
        for (std::uint64_t rest = S; rest;) {
            const int x = std::countr_zero(rest);
            rest &= rest - 1;
            if (!witness_exists(S, x)) return false;
        }
        return true;
    }

    void grow(std::uint64_t S, int count, int next) {
        if (count > best) {
            best = count;
            best_set = S;
        }
        if (best >= cap) return;
        for (int x = next; x < n; ++x) {
            if (count + (n - x) <= best) return; // not enough points left
            const std::uint64_t S2 = S | (1ull << x);
            if (feasible_with(S2)) {
                grow(S2, count + 1, x + 1);
                if (best >= cap) return;
            }
        }
    }
};

} // namespace

StarNumber star_number(const ConceptClass& c, int cap, int max_points) {
    const int n = c.n();
    if (n > max_points)
        throw ParameterError("star_number: instance space exceeds the measure cap (" + std::to_string(max_points) +
                             " points); raise max_points explicitly for larger desks");
    if (n > 64) throw ParameterError("star_number: packed search supports at most 64 points");
    if (cap < 0) cap = n;
    if (cap < 1) throw ParameterError("star_number: cap must be >= 1");
    const int effective_cap = std::min(cap, n);

    int best = 0;
    for (int h0 = 0; h0 < c.size() && best < effective_cap; ++h0) {
        std::vector<std::uint64_t> diffs(c.size());
        for (int h = 0; h < c.size(); ++h) {
            const auto& a = c.hypotheses[h].pos.words();
            const auto& b = c.hypotheses[h0].pos.words();
            diffs[h] = a.empty() ? 0 : (a[0] ^ b[0]);
        }
        StarSearch search{n, effective_cap, diffs, {}, best};
        search.at_point.assign(n, {});
        for (int h = 0; h < c.size(); ++h)
            for (std::uint64_t rest = diffs[h]; rest;) {
                const int x = std::countr_zero(rest);
                rest &= rest - 1;
                search.at_point[x].push_back(h);
            }
        search.grow(0, 0, 0);
        best = std::max(best, search.best);
    }
    StarNumber r;
    r.value = best;
    r.exceeds_cap = (best >= cap) && (cap < n);
    return r;
}

StarWitness star_witness(const ConceptClass& c, int size, int max_points) {
    const int n = c.n();
    if (n > max_points)
        throw ParameterError("star_witness: instance space exceeds the measure cap (" + std::to_string(max_points) +
                             " points); raise max_points explicitly for larger desks");
    if (n > 64) throw ParameterError("star_witness: packed search supports at most 64 points");
    if (size < 1 || size > n)
        throw ParameterError("star_witness: size must be in [1, " + std::to_string(n) + "], got " +
                             std::to_string(size));

    for (int h0 = 0; h0 < c.size(); ++h0) {
        std::vector<std::uint64_t> diffs(c.size());
        for (int h = 0; h < c.size(); ++h) {
            const auto& a = c.hypotheses[h].pos.words();
            const auto& b = c.hypotheses[h0].pos.words();
            diffs[h] = a.empty() ? 0 : (a[0] ^ b[0]);
        }
        StarSearch search{n, size, diffs, {}, 0, 0};
        search.at_point.assign(n, {});
        for (int h = 0; h < c.size(); ++h)
            for (std::uint64_t rest = diffs[h]; rest;) {
                const int x = std::countr_zero(rest);
                rest &= rest - 1;
                search.at_point[x].push_back(h);
            }
        search.grow(0, 0, 0);
        if (search.best >= size) {
            StarWitness w;
            w.h0 = h0;
            for (std::uint64_t rest = search.best_set; rest;) {
                const int x = std::countr_zero(rest);
                rest &= rest - 1;
                w.points.push_back(x);
                for (int h : search.at_point[x]) // index order => lowest witness
                    if ((diffs[h] & search.best_set) == (1ull << x)) {
                        w.hyps.push_back(h);
                        break;
                    }
            }
            return w;
        }
    }
    throw ParameterError("star_witness: class '" + c.name + "' has no star set of size " + std::to_string(size));
}

// ---------------------------------------------------------------------------
// Intersection-closedness and closure hull
// ---------------------------------------------------------------------------

bool is_intersection_closed(const ConceptClass& c, std::size_t pair_cap) {
    const std::size_t H = c.hypotheses.size();
    if (H * H > pair_cap * 2)
        throw ParameterError("is_intersection_closed: |C|^2 exceeds pair cap; raise pair_cap explicitly");
    std::set<BitVec> present;
    for (const auto& h : c.hypotheses) present.insert(h.pos);
    for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = i + 1; j < H; ++j) {
            BitVec inter = c.hypotheses[i].pos & c.hypotheses[j].pos;
            if (!present.count(inter)) return false;
        }
    return true;
}

ConceptClass closure_hull(const ConceptClass& c, std::size_t size_cap) {
    std::set<BitVec> present;
    std::vector<BitVec> order; // originals first, then new ones in discovery rounds
    for (const auto& h : c.hypotheses) {
        present.insert(h.pos);
        order.push_back(h.pos);
    }
    std::vector<BitVec> frontier = order;
    while (!frontier.empty()) {
        std::set<BitVec> fresh;
        for (const auto& f : frontier)
            for (const auto& g : order) {
                BitVec inter = f & g;
                if (!present.count(inter)) fresh.insert(inter);
            }
        frontier.assign(fresh.begin(), fresh.end()); // canonical (lexicographic) order
        for (const auto& v : frontier) {
            present.insert(v);
            order.push_back(v);
            if (order.size() > size_cap)
                throw ParameterError("closure_hull: hull size exceeds cap " + std::to_string(size_cap));
        }
    }
    // Re-sort the appended tail canonically (frontier rounds are each sorted,
    // but later rounds may interleave; keep originals stable, tail sorted).
    std::sort(order.begin() + c.size(), order.end());
    return finish_class(c.space, std::move(order), c.name + "-hull");
}

ClassIndex ClassIndex::build(const ConceptClass& c) {
    ClassIndex idx;
    idx.all = BitVec(c.size(), true);
    idx.pos.assign(c.n(), BitVec(c.size()));
    for (int h = 0; h < c.size(); ++h)
        for (int x = 0; x < c.n(); ++x)
            if (c.hypotheses[h].pos.get(x)) idx.pos[x].set(h, true);
    return idx;
}

} // namespace vslab
