#include "vslab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vslab/bounds.hpp"
#include "vslab/errors.hpp"
#include "vslab/measures.hpp"
#include "vslab/rng.hpp"

namespace vslab {

namespace {

// §1.1 conventions (same as the bound evaluators).
double Log(double x) { return std::log(std::max(x, std::exp(1.0))); }
double mul_log(double a, double x) { return a == 0 ? 0.0 : a * Log(x); }

int index_of(const ConceptClass& c, const Hypothesis& h, const char* who) {
    for (int i = 0; i < c.size(); ++i)
        if (c.hypotheses[i].pos == h.pos) return i;
    throw ParameterError(std::string(who) + ": target is not a member of the class");
}

void check_dist(const ConceptClass& c, const Distribution& dist, const char* who) {
    if (dist.n() != c.n())
        throw ParameterError(std::string(who) + ": distribution size does not match the instance space");
    dist.validate();
}

// Region of a monotone rule at the current version-space mask: the Closure
// error region {x : f*(x) = +1, ∃h ∈ V with h(x) = −1} or DIS(V).
BitVec rule_region(MonotoneRule rule, const ConceptClass& c, const ClassIndex& idx,
                   const Hypothesis& target, const BitVec& members) {
    BitVec region(c.n());
    for (int x = 0; x < c.n(); ++x) {
        const BitVec& pos = idx.pos[x];
        const bool in = rule == MonotoneRule::closure_error_region
                            ? target.pos.get(x) && !members.is_subset_of(pos)
                            : members.intersects(pos) && !members.is_subset_of(pos);
        if (in) region.set(x, true);
    }
    return region;
}

std::vector<int> mask_points(const BitVec& mask) {
    std::vector<int> out;
    for (int x = mask.find_first(); x >= 0; x = mask.find_next(x)) out.push_back(x);
    return out;
}

Rational mask_mass(const Distribution& dist, const BitVec& mask) {
    Rational total = 0;
    for (int x = mask.find_first(); x >= 0; x = mask.find_next(x)) total += dist.mass[x];
    return total;
}

// V ∩ {h : h(x) = y}.
void constrain(BitVec& members, const ClassIndex& idx, int x, int y) {
    if (y == +1)
        members &= idx.pos[x];
    else
        members &= ~idx.pos[x];
}

} // namespace

MonotoneRuleTrace run_monotone_rule(MonotoneRule rule, const ConceptClass& c,
                                    const Distribution& dist, const Hypothesis& target,
                                    int m, std::uint64_t seed) {
    check_dist(c, dist, "run_monotone_rule");
    if (m < 1) throw ParameterError("run_monotone_rule: requires m >= 1");
    const int target_idx = index_of(c, target, "run_monotone_rule");
    if (rule == MonotoneRule::closure_error_region && !is_intersection_closed(c))
        throw ParameterError("run_monotone_rule: closure rule requires an intersection-closed class");

    const ClassIndex idx = ClassIndex::build(c);
    NhatTracker tracker(c, idx, target);
    RngStream rng(seed);
    PointSampler points(dist);

    MonotoneRuleTrace trace;
    trace.rule = rule;
    BitVec members = idx.all;
    BitVec prev = rule_region(rule, c, idx, target, members); // A_0 = ψ_0()
    BitVec seen(c.n());

    for (int t = 1; t <= m; ++t) {
        const int x = points.draw(rng);
        constrain(members, idx, x, target.label(x));
        if (!members.get(target_idx))
            throw std::logic_error("run_monotone_rule: target left the version space");
        tracker.push(x);
        seen.set(x, true);
        trace.points.push_back(x);

        const BitVec region = rule_region(rule, c, idx, target, members);
        MonotoneRuleStep step;
        step.region = mask_points(region);
        step.mass = mask_mass(dist, region);
        step.consistent = !region.intersects(seen);
        step.monotone = region.is_subset_of(prev);
        step.witness_size = tracker.current_nhat();
        trace.steps.push_back(std::move(step));
        prev = region;
    }
    trace.final_mass = trace.steps.back().mass;
    return trace;
}

std::string trace_csv(const MonotoneRuleTrace& trace) {
    std::ostringstream out;
    out << "step,mass,consistent,monotone,witness_size\n";
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
        const MonotoneRuleStep& s = trace.steps[t];
        out << (t + 1) << ',' << format_rational(s.mass) << ',' << (s.consistent ? 1 : 0) << ','
            << (s.monotone ? 1 : 0) << ',' << s.witness_size << '\n';
    }
    return out.str();
}

Hypothesis closure_predict(const ConceptClass& c, const LabeledSample& sample) {
    if (!is_intersection_closed(c))
        throw ParameterError("closure_predict: class is not intersection-closed");
    const VersionSpaceView view = version_space(c, sample);
    if (view.empty())
        throw ParameterError("closure_predict: empty version space (sample not realizable)");
    BitVec pos(c.n(), true);
    for (int h = view.members.find_first(); h >= 0; h = view.members.find_next(h))
        pos &= c.hypotheses[h].pos;
    return Hypothesis{pos};
}

CalRunRecord run_cal(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
                     int n, std::uint64_t seed) {
    check_dist(c, dist, "run_cal");
    if (n < 0) throw ParameterError("run_cal: requires n >= 0");
    const int target_idx = index_of(c, target, "run_cal");

    const ClassIndex idx = ClassIndex::build(c);
    RngStream rng(seed);
    PointSampler points(dist);

    CalRunRecord rec;
    rec.budget = n;
    BitVec version = idx.all; // V_m, updated only on queries
    BitVec exact = idx.all;   // ℂ[ℒ_m], every constraint applied
    BitVec dis = rule_region(MonotoneRule::dis_version_space, c, idx, target, version);
    Rational dis_mass = mask_mass(dist, dis);
    rec.dis_mass.push_back(dis_mass);

    const std::int64_t cap =
        n < 63 ? (std::int64_t{1} << n) : std::numeric_limits<std::int64_t>::max();
    std::int64_t m = 0;
    int t = 0;
    while (t < n && m < cap) {
        if (dis_mass == 0) break; // no draw can land in DIS; V_m and t are final
        ++m;
        const int x = points.draw(rng);
        const int y = target.label(x);
        if (dis.get(x)) {
            rec.query_indices.push_back(static_cast<int>(m));
            ++t;
            constrain(version, idx, x, y);
        }
        constrain(exact, idx, x, y);
        if (!(version == exact))
            throw std::logic_error("run_cal: invariant V_m = C[L_m] violated");
        if (!version.get(target_idx))
            throw std::logic_error("run_cal: invariant f* in V_m violated");
        dis = rule_region(MonotoneRule::dis_version_space, c, idx, target, version);
        dis_mass = mask_mass(dist, dis);
        rec.dis_mass.push_back(dis_mass);
    }
    rec.labels = t;
    rec.samples = m;
    rec.final_hyp = version.find_first();
    return rec;
}

std::string to_json(const CalRunRecord& rec) {
    nlohmann::ordered_json j;
    j["algorithm"] = "cal";
    j["budget"] = rec.budget;
    j["labels"] = rec.labels;
    j["samples"] = rec.samples;
    j["final_hyp"] = rec.final_hyp;
    j["query_indices"] = rec.query_indices;
    nlohmann::ordered_json masses = nlohmann::ordered_json::array();
    for (const Rational& q : rec.dis_mass) masses.push_back(format_rational(q));
    j["dis_mass"] = std::move(masses);
    return j.dump();
}

VersionSpaceView erm_set(const ConceptClass& c, const LabeledSample& sample) {
    std::vector<long long> mistakes(c.size(), 0);
    for (const auto& [x, y] : sample.pairs) {
        if (x < 0 || x >= c.n()) throw ParameterError("erm_set: point index out of range");
        if (y != +1 && y != -1) throw ParameterError("erm_set: labels must be +1 or -1");
        for (int h = 0; h < c.size(); ++h)
            if (c.hypotheses[h].label(x) != y) ++mistakes[h];
    }
    const long long best = *std::min_element(mistakes.begin(), mistakes.end());
    VersionSpaceView view;
    view.cls = &c;
    view.members = BitVec(c.size());
    for (int h = 0; h < c.size(); ++h)
        if (mistakes[h] == best) view.members.set(h, true);
    return view;
}

double u_complexity(const VersionSpaceView& view, std::int64_t m, double delta,
                    const std::vector<int>& region, const Distribution& dist, double c0) {
    if (view.cls == nullptr || view.empty()) throw ParameterError("u_complexity: empty view");
    check_dist(*view.cls, dist, "u_complexity");
    if (m < 1) throw ParameterError("u_complexity: requires m >= 1");
    if (!(delta > 0 && delta < 1)) throw ParameterError("u_complexity: requires delta in (0,1)");
    if (!(c0 > 1)) throw ParameterError("u_complexity: requires c0 > 1");
    for (int x : region)
        if (x < 0 || x >= view.cls->n()) throw ParameterError("u_complexity: region point out of range");

    const ConceptClass& c = *view.cls;
    const double vc = vc_dimension(c, view.members);
    Rational diam = 0;
    for (int i = view.members.find_first(); i >= 0; i = view.members.find_next(i))
        for (int j = view.members.find_next(i); j >= 0; j = view.members.find_next(j))
            diam = std::max(diam, point_distance(dist, c.hypotheses[i].pos, c.hypotheses[j].pos));
    const double diam_d = to_double(diam);
    const double pr = to_double(region_mass(dist, region));

    std::vector<double> grid = {diam_d, pr};
    const double lo = std::max(diam_d, 1e-9), hi = 1.0;
    for (int i = 0; i < 512; ++i)
        grid.push_back(lo >= hi ? hi : lo * std::pow(hi / lo, i / 511.0));

    double best = std::numeric_limits<double>::infinity();
    for (double r : grid) {
        const double ratio = r == 0 ? std::numeric_limits<double>::infinity() : pr / r;
        const double t = mul_log(vc, ratio) + Log(1.0 / delta);
        if (!std::isfinite(t)) continue;
        const double md = static_cast<double>(m);
        const double u = c0 * std::sqrt(r * t / md) + c0 * t / md;
        best = std::min(best, u);
    }
    return std::min(1.0, best);
}

Algo1RunRecord run_algorithm1(const ConceptClass& c, const Distribution& dist,
                              const NoiseModel& noise, std::int64_t m, double delta,
                              const Rational& a, double alpha, double c0, std::uint64_t seed,
                              std::uint64_t phi_budget) {
    check_dist(c, dist, "run_algorithm1");
    if (noise.n() != c.n())
        throw ParameterError("run_algorithm1: noise model size does not match the instance space");
    noise.validate();
    if (m < 2) throw ParameterError("run_algorithm1: requires m >= 2");
    if (!(delta > 0 && delta < 1)) throw ParameterError("run_algorithm1: requires delta in (0,1)");
    if (a < 1) throw ParameterError("run_algorithm1: requires a >= 1");
    if (!(alpha > 0) || alpha > 1) throw ParameterError("run_algorithm1: requires alpha in (0,1]");
    if (!(c0 > 1)) throw ParameterError("run_algorithm1: requires c0 > 1");
    if (m > (std::int64_t{1} << 30)) throw ParameterError("run_algorithm1: m too large to simulate");

    int K = 0;
    while ((std::int64_t{1} << (K + 1)) <= m) ++K; // K = ⌊log₂ m⌋ >= 1

    // Proof schedule (Theorem zc-noise): c = 128, η_0 = 2/c, and for k >= 1
    //   r_k  = a c₁ (a 2^{1−k} (dim Log(φ̂_{a,α}(a(a·dim·2^{1−k})^{α/(2−α)}))
    //                           + Log(1/δ_{k−1})))^{α/(2−α)},
    //   η_k  = (2/c)(r_k/a)^{1/α},  c₁ = (32c₀)^{2α/(2−α)}.
    const double cc = 128.0;
    const double a_d = to_double(a);
    const double dim = vc_dimension(c);
    const double c1 = std::pow(32.0 * c0, 2.0 * alpha / (2.0 - alpha));
    std::vector<double> delta_k(K), eta_k(K);
    for (int k = 0; k < K; ++k)
        delta_k[k] = delta / std::pow(std::log2(2.0 * static_cast<double>(m)) - k, 2.0);
    eta_k[0] = 2.0 / cc;
    for (int k = 1; k < K; ++k) {
        const double r0 = zc_noise_r0(a_d, alpha, dim, std::ldexp(1.0, k - 1));
        const Rational phat = phi_hat_noise(c, dist, a, alpha, Rational(r0), Rational(128));
        const double inner = mul_log(dim, to_double(phat)) + Log(1.0 / delta_k[k - 1]);
        const double r_k =
            a_d * c1 * std::pow(a_d * std::ldexp(1.0, 1 - k) * inner, alpha / (2.0 - alpha));
        eta_k[k] = (2.0 / cc) * std::pow(r_k / a_d, 1.0 / alpha);
    }

    RngStream rng(seed);
    const LabeledSample samples =
        sample_labeled(dist, noise, static_cast<int>(std::int64_t{1} << K), rng);

    Algo1RunRecord rec;
    rec.m = m;
    rec.rounds = K;
    BitVec g(c.size(), true);
    for (int k = 0; k < K; ++k) {
        Algo1Round round;
        round.k = k;
        round.eta_k = eta_k[k];
        round.delta_k = delta_k[k];
        round.gk_size = g.count();

        VersionSpaceView gview;
        gview.cls = &c;
        gview.members = g;
        // η >= 1 makes the Φ constraint vacuous (Φ = 0 with the same optimal
        // γ), so clamp the LP argument to keep its exact rationals small.
        const Rational eta_rat =
            k == 0 ? Rational(1, 64) : (eta_k[k] >= 1.0 ? Rational(1) : Rational(eta_k[k]));
        const PhiResult sol = phi(gview, dist, eta_rat, PhiMode::binary, phi_budget);
        BitVec rmask(c.n());
        for (int x = 0; x < c.n(); ++x)
            if (sol.cert.gamma[x] == 1) rmask.set(x, true);
        round.region = mask_points(rmask);
        round.region_mass = mask_mass(dist, rmask);

        // D_k: samples with paper index 2^k+1..2^{k+1} whose point lies in R_k.
        std::vector<std::pair<int, int>> dk;
        for (std::int64_t j = std::int64_t{1} << k; j < (std::int64_t{1} << (k + 1)); ++j)
            if (rmask.get(samples.pairs[static_cast<std::size_t>(j)].first))
                dk.push_back(samples.pairs[static_cast<std::size_t>(j)]);
        round.dk_size = static_cast<int>(dk.size());

        round.u_value = u_complexity(gview, std::int64_t{1} << k, delta_k[k], round.region, dist, c0);
        const double rhs = std::max(4.0 * eta_k[k], round.u_value);

        std::vector<long long> mistakes(c.size(), 0);
        long long best = std::numeric_limits<long long>::max();
        for (int h = g.find_first(); h >= 0; h = g.find_next(h)) {
            for (const auto& [x, y] : dk)
                if (c.hypotheses[h].label(x) != y) ++mistakes[h];
            best = std::min(best, mistakes[h]);
        }
        BitVec next(c.size());
        for (int h = g.find_first(); h >= 0; h = g.find_next(h)) {
            const double lhs = std::ldexp(static_cast<double>(mistakes[h] - best), -k);
            if (lhs <= rhs) next.set(h, true);
        }
        round.g_next = next;
        rec.per_round.push_back(std::move(round));
        g = next;
    }
    rec.final_hyp = g.find_first();
    return rec;
}

std::string to_json(const Algo1RunRecord& rec) {
    nlohmann::ordered_json j;
    j["algorithm"] = "algorithm1";
    j["m"] = rec.m;
    j["rounds"] = rec.rounds;
    nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
    for (const Algo1Round& r : rec.per_round) {
        nlohmann::ordered_json o;
        o["k"] = r.k;
        o["eta"] = r.eta_k;
        o["delta"] = r.delta_k;
        o["region_mass"] = format_rational(r.region_mass);
        o["region"] = r.region;
        o["g_size"] = r.gk_size;
        o["d_size"] = r.dk_size;
        o["u"] = r.u_value;
        o["g_next_size"] = r.g_next.count();
        rounds.push_back(std::move(o));
    }
    j["per_round"] = std::move(rounds);
    j["final_hyp"] = rec.final_hyp;
    return j.dump();
}

} // namespace vslab
