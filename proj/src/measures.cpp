#include "vslab/measures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "vslab/errors.hpp"
#include "vslab/simplex.hpp"

namespace vslab {

namespace {

int member_index(const ConceptClass& c, const Hypothesis& h) {
    for (int i = 0; i < c.size(); ++i)
        if (c.hypotheses[i].pos == h.pos) return i;
    return -1;
}

// Full-space assignment achieving `value` on some Φ LP (node).
struct PhiAssignment {
    Rational value;
    std::vector<Rational> gamma, zeta, xi;
};

// Off the disagreement region every member agrees, so the zero-penalty
// assignment is forced up to ties: γ=0 and all weight on the variable the
// agreed label never triggers (ξ under agreed +1, ζ under agreed -1).
void fill_off_dis(const VersionSpaceView& view, const std::vector<char>& in_dis, PhiAssignment& out) {
    const ConceptClass& c = *view.cls;
    const Hypothesis& ref = c.hypotheses[view.lowest_index()];
    for (int x = 0; x < c.n(); ++x) {
        if (in_dis[x]) continue;
        out.gamma[x] = 0;
        out.zeta[x] = ref.pos.get(x) ? 0 : 1;
        out.xi[x] = ref.pos.get(x) ? 1 : 0;
    }
}

// One Φ LP with some γ values pre-fixed (branch-and-bound nodes; real mode
// passes everything free). `fixed` runs over instance points: -1 free, 0/1
// pinned. Only entries at DIS points are read. Returns nullopt iff the node
// is infeasible, which requires at least one γ=0 pin.
std::optional<PhiAssignment> solve_phi_node(const VersionSpaceView& view, const Distribution& dist,
                                            const Rational& eta, const std::vector<int>& dis,
                                            const std::vector<char>& in_dis,
                                            const std::vector<signed char>& fixed) {
    const ConceptClass& c = *view.cls;

    // Column layout: per free DIS point γ,ζ,ξ; per γ=0 point ζ,ξ; γ=1 points
    // contribute their mass as a constant (ζ=ξ=0 is forced by the simplex
    // constraint). Slacks for the member rows come after.
    std::vector<int> col_gamma(c.n(), -1), col_zeta(c.n(), -1);
    int ncols = 0;
    Rational fixed_mass = 0;
    bool has_fixed0 = false;
    std::vector<int> contributing;
    for (int x : dis) {
        if (fixed[x] == 1) {
            fixed_mass += dist.mass[x];
            continue;
        }
        if (fixed[x] == 0)
            has_fixed0 = true;
        else
            col_gamma[x] = ncols++;
        col_zeta[x] = ncols++;
        ncols++; // ξ sits right after ζ
        contributing.push_back(x);
    }

    // Distinct member rows: members with equal labels on the contributing
    // points impose the same constraint, so deduplicate (big classes share
    // few patterns on a small disagreement region).
    std::vector<std::vector<char>> patterns;
    {
        std::set<std::vector<char>> seen;
        for (int h = view.members.find_first(); h >= 0; h = view.members.find_next(h)) {
            std::vector<char> pat(contributing.size());
            for (std::size_t i = 0; i < pat.size(); ++i)
                pat[i] = c.hypotheses[h].pos.get(contributing[i]) ? 1 : 0;
            if (seen.insert(pat).second) patterns.push_back(std::move(pat));
        }
    }

    const int nrows = static_cast<int>(contributing.size() + patterns.size());
    const int nvars = ncols + static_cast<int>(patterns.size());
    std::vector<std::vector<Rational>> A(nrows, std::vector<Rational>(nvars, 0));
    std::vector<Rational> b(nrows), costs(nvars, 0);
    std::vector<int> basis;

    for (std::size_t i = 0; i < contributing.size(); ++i) {
        int x = contributing[i];
        if (col_gamma[x] >= 0) {
            A[i][col_gamma[x]] = 1;
            costs[col_gamma[x]] = dist.mass[x];
            basis.push_back(col_gamma[x]);
        }
        A[i][col_zeta[x]] = 1;
        A[i][col_zeta[x] + 1] = 1;
        b[i] = 1;
    }
    for (std::size_t p = 0; p < patterns.size(); ++p) {
        int row = static_cast<int>(contributing.size() + p);
        for (std::size_t i = 0; i < contributing.size(); ++i) {
            int x = contributing[i];
            A[row][patterns[p][i] ? col_zeta[x] : col_zeta[x] + 1] = dist.mass[x];
        }
        A[row][ncols + static_cast<int>(p)] = 1;
        basis.push_back(ncols + static_cast<int>(p));
        b[row] = eta;
    }

    // γ=0 rows have no identity column, so those nodes go through phase 1.
    auto sol = simplex_min(std::move(A), std::move(b), std::move(costs),
                           has_fixed0 ? std::vector<int>{} : std::move(basis));
    if (!sol) return std::nullopt;

    PhiAssignment out;
    out.value = sol->value + fixed_mass;
    out.gamma.assign(c.n(), 0);
    out.zeta.assign(c.n(), 0);
    out.xi.assign(c.n(), 0);
    fill_off_dis(view, in_dis, out);
    for (int x : dis) {
        if (fixed[x] == 1) {
            out.gamma[x] = 1;
        } else {
            if (col_gamma[x] >= 0) out.gamma[x] = sol->x[col_gamma[x]];
            out.zeta[x] = sol->x[col_zeta[x]];
            out.xi[x] = sol->x[col_zeta[x] + 1];
        }
    }
    return out;
}

PhiResult finish_phi(PhiAssignment a, bool binary) {
    PhiResult r;
    r.value = std::move(a.value);
    r.cert.gamma = std::move(a.gamma);
    r.cert.zeta = std::move(a.zeta);
    r.cert.xi = std::move(a.xi);
    r.cert.binary = binary;
    return r;
}

} // namespace

PhiResult phi(const VersionSpaceView& view, const Distribution& dist, const Rational& eta, PhiMode mode,
              std::uint64_t budget) {
    if (!view.cls || view.empty()) throw ParameterError("phi: view must be nonempty");
    if (eta < 0) throw ParameterError("phi: eta must be >= 0");
    const ConceptClass& c = *view.cls;
    if (dist.n() != c.n()) throw ParameterError("phi: distribution size mismatch");

    std::vector<int> dis = disagreement_region(view);
    std::vector<char> in_dis(c.n(), 0);
    for (int x : dis) in_dis[x] = 1;

    if (dis.empty()) {
        PhiAssignment a;
        a.value = 0;
        a.gamma.assign(c.n(), 0);
        a.zeta.assign(c.n(), 0);
        a.xi.assign(c.n(), 0);
        fill_off_dis(view, in_dis, a);
        return finish_phi(std::move(a), mode == PhiMode::binary);
    }

    if (mode == PhiMode::real) {
        std::vector<signed char> fixed(c.n(), -1);
        auto sol = solve_phi_node(view, dist, eta, dis, in_dis, fixed);
        // γ≡1 is always feasible, so the unrestricted LP cannot fail.
        return finish_phi(std::move(*sol), false);
    }

    // Binary mode: branch and bound over γ assignments, real LP as the
    // relaxation. Zero-mass DIS points are pinned to γ=1 up front — they
    // affect neither the objective nor any constraint, and pinning keeps the
    // certificate binary without burning branch nodes on them.
    std::vector<signed char> root(c.n(), -1);
    for (int x : dis)
        if (dist.mass[x] == 0) root[x] = 1;

    // Incumbent: γ≡1 on DIS (always feasible).
    PhiAssignment best;
    best.value = 0;
    best.gamma.assign(c.n(), 0);
    best.zeta.assign(c.n(), 0);
    best.xi.assign(c.n(), 0);
    fill_off_dis(view, in_dis, best);
    for (int x : dis) {
        best.gamma[x] = 1;
        best.value += dist.mass[x];
    }

    std::vector<std::vector<signed char>> stack;
    stack.push_back(std::move(root));
    std::uint64_t nodes = 0;
    while (!stack.empty()) {
        std::vector<signed char> fixed = std::move(stack.back());
        stack.pop_back();
        if (++nodes > budget)
            throw BudgetExceeded("phi: binary branch-and-bound node budget exceeded; raise the budget");
        auto relax = solve_phi_node(view, dist, eta, dis, in_dis, fixed);
        if (!relax || relax->value >= best.value) continue;

        // Branch on the most fractional free γ; if none, the relaxation is
        // already binary and optimal for this subtree.
        int branch = -1;
        Rational branch_score; // |γ - 1/2|, smaller is better
        for (int x : dis) {
            if (fixed[x] != -1) continue;
            const Rational& g = relax->gamma[x];
            if (g == 0 || g == 1) continue;
            Rational score = g < Rational(1, 2) ? Rational(1, 2) - g : g - Rational(1, 2);
            if (branch < 0 || score < branch_score) {
                branch = x;
                branch_score = std::move(score);
            }
        }
        if (branch < 0) {
            best = std::move(*relax);
            continue;
        }
        // Explore the child nearest the relaxed value first (ties toward 0).
        signed char preferred = relax->gamma[branch] > Rational(1, 2) ? 1 : 0;
        auto child = fixed;
        child[branch] = static_cast<signed char>(1 - preferred);
        stack.push_back(std::move(child));
        fixed[branch] = preferred;
        stack.push_back(std::move(fixed));
    }
    return finish_phi(std::move(best), true);
}

bool verify_certificate(const VersionSpaceView& view, const Distribution& dist, const Rational& eta,
                        const WeightingCertificate& cert, const Rational& value) {
    if (!view.cls || view.empty()) return false;
    const ConceptClass& c = *view.cls;
    const int n = c.n();
    if (static_cast<int>(cert.gamma.size()) != n || static_cast<int>(cert.zeta.size()) != n ||
        static_cast<int>(cert.xi.size()) != n)
        return false;
    Rational egamma = 0;
    for (int x = 0; x < n; ++x) {
        const Rational &g = cert.gamma[x], &z = cert.zeta[x], &xi = cert.xi[x];
        if (g < 0 || g > 1 || z < 0 || z > 1 || xi < 0 || xi > 1) return false;
        if (g + z + xi != 1) return false;
        if (cert.binary && g != 0 && g != 1) return false;
        egamma += dist.mass[x] * g;
    }
    if (egamma != value) return false;
    for (int h = view.members.find_first(); h >= 0; h = view.members.find_next(h)) {
        Rational penalty = 0;
        for (int x = 0; x < n; ++x)
            penalty += dist.mass[x] * (c.hypotheses[h].pos.get(x) ? cert.zeta[x] : cert.xi[x]);
        if (penalty > eta) return false;
    }
    return true;
}

RadiusProfile RadiusProfile::build(const ConceptClass& c, const Distribution& dist, const Hypothesis& center) {
    if (dist.n() != c.n()) throw ParameterError("RadiusProfile: distribution size mismatch");
    if (center.n() != c.n()) throw ParameterError("RadiusProfile: center size mismatch");
    std::map<Rational, std::vector<int>> by_dist;
    for (int i = 0; i < c.size(); ++i)
        by_dist[point_distance(dist, center.pos, c.hypotheses[i].pos)].push_back(i);
    RadiusProfile prof;
    BitVec cum(c.size());
    for (auto& [r, idxs] : by_dist) {
        for (int i : idxs) cum.set(i, true);
        prof.radii.push_back(r);
        prof.ball_members.push_back(cum);
    }
    return prof;
}

VersionSpaceView ball(const ConceptClass& c, const Hypothesis& center, const Rational& r,
                      const Distribution& dist) {
    if (member_index(c, center) < 0) throw ParameterError("ball: center must belong to the class");
    VersionSpaceView v;
    v.cls = &c;
    v.members = BitVec(c.size());
    for (int i = 0; i < c.size(); ++i)
        if (point_distance(dist, center.pos, c.hypotheses[i].pos) <= r) v.members.set(i, true);
    return v;
}

namespace {

// Shared sup-over-radii driver for θ, φ_c and φ̂: the ball B(center,r) is
// piecewise constant between the distance breakpoints and each candidate
// functional is maximized toward the left end of every constancy interval,
// so the supremum over r > r0 is attained on {right-limit at r0} ∪
// {breakpoints > r0}. The right-limit at r0 = 0 vanishes (B(center,0) has a
// zero-mass disagreement region), so it is skipped.
template <typename Eval>
void sup_over_radii(const ConceptClass& c, const RadiusProfile& prof, const Rational& r0, Eval&& eval) {
    auto view_at = [&](const Rational& r) {
        VersionSpaceView v;
        v.cls = &c;
        v.members = BitVec(c.size());
        for (std::size_t i = 0; i < prof.radii.size(); ++i)
            if (prof.radii[i] <= r) v.members = prof.ball_members[i];
        return v;
    };
    if (r0 > 0) eval(r0, view_at(r0));
    for (const Rational& rho : prof.radii)
        if (rho > r0) eval(rho, view_at(rho));
}

} // namespace

Rational disagreement_coefficient(const ConceptClass& c, const Distribution& dist,
                                  const Hypothesis& target, const Rational& r0) {
    if (r0 < 0) throw ParameterError("disagreement_coefficient: r0 must be >= 0");
    if (member_index(c, target) < 0)
        throw ParameterError("disagreement_coefficient: target must belong to the class");
    RadiusProfile prof = RadiusProfile::build(c, dist, target);
    Rational best = 1;
    sup_over_radii(c, prof, r0, [&](const Rational& r, const VersionSpaceView& v) {
        Rational ratio = region_mass(dist, disagreement_region(v)) / r;
        if (ratio > best) best = ratio;
    });
    return best;
}

Rational phi_c(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
               const Rational& r0, const Rational& cc) {
    if (!(cc > 1)) throw ParameterError("phi_c: requires c > 1");
    if (r0 < 0 || r0 >= 1) throw ParameterError("phi_c: requires 0 <= r0 < 1");
    if (member_index(c, target) < 0) throw ParameterError("phi_c: target must belong to the class");
    RadiusProfile prof = RadiusProfile::build(c, dist, target);
    Rational best = 1;
    sup_over_radii(c, prof, r0, [&](const Rational& r, const VersionSpaceView& v) {
        Rational ratio = phi(v, dist, r / cc).value / r;
        if (ratio > best) best = ratio;
    });
    return best;
}

Rational phi_hat_noise(const ConceptClass& c, const Distribution& dist, const Rational& a, double alpha,
                       const Rational& r0, const Rational& cc) {
    if (a < 1) throw ParameterError("phi_hat_noise: requires a >= 1");
    if (!(alpha > 0) || alpha > 1) throw ParameterError("phi_hat_noise: requires alpha in (0,1]");
    if (!(cc > 1)) throw ParameterError("phi_hat_noise: requires c > 1");
    if (r0 < 0) throw ParameterError("phi_hat_noise: requires r0 >= 0");
    if (r0 >= 1) return 1; // §6.2 completeness convention

    // (r/a)^{1/α}/c: exact rational when α = 1; otherwise the exact rational
    // value of the double, after which the LP itself is still exact.
    auto threshold = [&](const Rational& r) -> Rational {
        if (alpha == 1.0) return r / (a * cc);
        double t = std::pow(to_double(r) / to_double(a), 1.0 / alpha) / to_double(cc);
        return Rational(t);
    };

    Rational best = 1;
    for (int h = 0; h < c.size(); ++h) {
        RadiusProfile prof = RadiusProfile::build(c, dist, c.hypotheses[h]);
        sup_over_radii(c, prof, r0, [&](const Rational& r, const VersionSpaceView& v) {
            Rational ratio = phi(v, dist, threshold(r)).value / r;
            if (ratio > best) best = ratio;
        });
    }
    return best;
}

namespace {

struct CoverProblem {
    int universe = 0;
    std::vector<BitVec> sets; // coverage of each distinct candidate center
};

CoverProblem cover_problem(const VersionSpaceView& view, const Distribution& dist, const Rational& radius,
                           CenterMode centers, std::uint64_t budget) {
    const ConceptClass& c = *view.cls;
    std::vector<int> members;
    for (int h = view.members.find_first(); h >= 0; h = view.members.find_next(h)) members.push_back(h);
    const int u = static_cast<int>(members.size());
    CoverProblem prob;
    prob.universe = u;

    if (centers == CenterMode::members) {
        prob.sets.assign(u, BitVec(u));
        for (int j = 0; j < u; ++j)
            for (int i = 0; i < u; ++i)
                if (point_distance(dist, c.hypotheses[members[j]].pos, c.hypotheses[members[i]].pos) <= radius)
                    prob.sets[j].set(i, true);
        return prob;
    }

    // Arbitrary centers = all 2^n labelings (the paper's definition). Only
    // distinct coverage sets are kept; the enumeration cost is metered
    // against the node budget.
    const int n = c.n();
    if (n > 20)
        throw ParameterError("covering_number: all-labelings centers are capped at n <= 20 points (n = " +
                             std::to_string(n) + "); pass centers=members for larger spaces");
    std::vector<std::uint32_t> member_bits(u, 0);
    for (int i = 0; i < u; ++i) {
        const auto& words = c.hypotheses[members[i]].pos.words();
        member_bits[i] = words.empty() ? 0u : static_cast<std::uint32_t>(words[0]);
    }
    std::uint64_t work = 0;
    std::set<BitVec> distinct;
    for (std::uint32_t center = 0; center < (1u << n); ++center) {
        if ((work += u) > budget)
            throw BudgetExceeded("covering_number: center enumeration budget exceeded; "
                                 "use centers=members or greedy mode");
        BitVec covered(u);
        for (int i = 0; i < u; ++i) {
            Rational d = 0;
            for (std::uint32_t rest = center ^ member_bits[i]; rest;) {
                const int x = std::countr_zero(rest);
                rest &= rest - 1;
                d += dist.mass[x];
            }
            if (d <= radius) covered.set(i, true);
        }
        distinct.insert(std::move(covered));
    }
    prob.sets.assign(distinct.begin(), distinct.end());
    return prob;
}

int greedy_cover(const CoverProblem& prob) {
    BitVec covered(prob.universe);
    int count = 0;
    while (covered.count() < prob.universe) {
        int bestj = -1, bestgain = -1;
        for (int j = 0; j < static_cast<int>(prob.sets.size()); ++j) {
            int gain = (prob.sets[j] & ~covered).count();
            if (gain > bestgain) {
                bestgain = gain;
                bestj = j;
            }
        }
        covered |= prob.sets[bestj];
        ++count;
    }
    return count;
}

struct CoverSearch {
    const std::vector<BitVec>* sets;
    int universe;
    int best;
    std::uint64_t nodes = 0, budget;

    void run(const BitVec& covered, int count) {
        if (++nodes > budget)
            throw BudgetExceeded("covering_number: exact set-cover budget exceeded; use greedy mode");
        const int rem = universe - covered.count();
        if (rem == 0) {
            if (count < best) best = count;
            return;
        }
        int maxgain = 0;
        for (const auto& s : *sets) maxgain = std::max(maxgain, (s & ~covered).count());
        if (count + (rem + maxgain - 1) / maxgain >= best) return;

        // Branch on the uncovered element with the fewest covering sets.
        int target = -1, fewest = -1;
        for (int i = 0; i < universe; ++i) {
            if (covered.get(i)) continue;
            int cnt = 0;
            for (const auto& s : *sets) cnt += s.get(i) ? 1 : 0;
            if (target < 0 || cnt < fewest) {
                target = i;
                fewest = cnt;
            }
        }
        for (std::size_t j = 0; j < sets->size(); ++j) {
            if (!(*sets)[j].get(target)) continue;
            run(covered | (*sets)[j], count + 1);
        }
    }
};

} // namespace

int covering_number(const VersionSpaceView& view, const Distribution& dist, const Rational& radius,
                    CoverMode mode, CenterMode centers, std::uint64_t budget) {
    if (!view.cls || view.empty()) throw ParameterError("covering_number: view must be nonempty");
    if (radius < 0) throw ParameterError("covering_number: radius must be >= 0");
    CoverProblem prob = cover_problem(view, dist, radius, centers, budget);
    int upper = greedy_cover(prob);
    if (mode == CoverMode::greedy) return upper;

    // Exact mode: drop duplicate and dominated candidate sets first (safe —
    // any cover maps onto one using only the kept sets, same cardinality).
    std::vector<BitVec> pruned;
    for (std::size_t j = 0; j < prob.sets.size(); ++j) {
        bool drop = false;
        for (std::size_t k = 0; k < prob.sets.size() && !drop; ++k) {
            if (k == j || !prob.sets[j].is_subset_of(prob.sets[k])) continue;
            drop = !(prob.sets[k] == prob.sets[j]) || k < j;
        }
        if (!drop) pruned.push_back(prob.sets[j]);
    }

    CoverSearch search;
    search.sets = &pruned;
    search.universe = prob.universe;
    search.best = upper;
    search.budget = budget;
    search.run(BitVec(prob.universe), 0);
    return search.best;
}

std::vector<int> packing(const VersionSpaceView& view, const Distribution& dist, const Rational& radius) {
    if (!view.cls || view.empty()) throw ParameterError("packing: view must be nonempty");
    const ConceptClass& c = *view.cls;
    std::vector<int> chosen;
    for (int h = view.members.find_first(); h >= 0; h = view.members.find_next(h)) {
        bool ok = true;
        for (int g : chosen) {
            if (point_distance(dist, c.hypotheses[h].pos, c.hypotheses[g].pos) <= radius) {
                ok = false;
                break;
            }
        }
        if (ok) chosen.push_back(h);
    }
    return chosen;
}

double doubling_dimension(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
                          const Rational& r0, CenterMode centers, std::uint64_t budget) {
    if (!(r0 > 0)) throw ParameterError("doubling_dimension: r0 must be > 0");
    if (member_index(c, target) < 0)
        throw ParameterError("doubling_dimension: target must belong to the class");
    RadiusProfile prof = RadiusProfile::build(c, dist, target);
    std::vector<Rational> candidates{r0};
    for (const Rational& rho : prof.radii)
        if (rho > r0) candidates.push_back(rho);
    double best = 0;
    for (const Rational& r : candidates) {
        VersionSpaceView v;
        v.cls = &c;
        v.members = BitVec(c.size());
        for (std::size_t i = 0; i < prof.radii.size(); ++i)
            if (prof.radii[i] <= r) v.members = prof.ball_members[i];
        int n = covering_number(v, dist, r / 2, CoverMode::exact, centers, budget);
        best = std::max(best, std::log2(static_cast<double>(n)));
    }
    return best;
}

} // namespace vslab
