#include "vslab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vslab {

namespace {

// floor(q·2^64) for q ∈ [0,1); the q = 1 value does not fit in 64 bits and
// is the caller's to special-case.
std::uint64_t scaled64(const Rational& q) {
    const BigInt v =
        (boost::multiprecision::numerator(q) << 64) / boost::multiprecision::denominator(q);
    return v.convert_to<std::uint64_t>();
}

} // namespace

// ---------------------------------------------------------------------------
// NoiseModel
// ---------------------------------------------------------------------------

void NoiseModel::validate() const {
    for (const auto& q : eta_plus)
        if (q < 0 || q > 1) throw ParameterError("NoiseModel: eta entries must be in [0,1]");
}

void save_noise(const NoiseModel& noise, const std::string& path) {
    noise.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("save_noise: cannot open '" + path + "'");
    out << "vslab-noise v1\n";
    for (const auto& q : noise.eta_plus) out << format_double(to_double(q)) << '\n';
}

NoiseModel load_noise(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("load_noise: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "vslab-noise v1")
        throw ParameterError("load_noise '" + path + "' line 1: expected header 'vslab-noise v1'");
    NoiseModel noise;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            noise.eta_plus.push_back(parse_rational(line));
        } catch (const ParameterError& e) {
            throw ParameterError("load_noise '" + path + "' line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    noise.validate();
    return noise;
}

NoiseModel noise_from_target(const Hypothesis& target) {
    NoiseModel noise;
    noise.eta_plus.reserve(target.n());
    for (int x = 0; x < target.n(); ++x) noise.eta_plus.emplace_back(target.label(x) == +1 ? 1 : 0);
    return noise;
}

NoiseModel bounded_noise_from(const Hypothesis& target, const Rational& beta,
                              const std::vector<int>& flip_set) {
    if (beta < 0 || beta >= Rational(1, 2))
        throw ParameterError("bounded_noise_from: beta must be in [0, 1/2)");
    NoiseModel noise = noise_from_target(target);
    for (int x : flip_set) {
        if (x < 0 || x >= target.n())
            throw ParameterError("bounded_noise_from: flip point " + std::to_string(x) + " out of range");
        noise.eta_plus[x] = target.label(x) == +1 ? Rational(1) - beta : beta;
    }
    return noise;
}

Rational noisy_error(const Distribution& dist, const NoiseModel& noise, const Hypothesis& h) {
    if (dist.n() != h.n() || noise.n() != h.n())
        throw ParameterError("noisy_error: size mismatch between dist, noise, and hypothesis");
    Rational er = 0;
    for (int x = 0; x < h.n(); ++x) {
        if (dist.mass[x] == 0) continue;
        er += dist.mass[x] * (h.label(x) == +1 ? Rational(1) - noise.eta_plus[x] : noise.eta_plus[x]);
    }
    return er;
}

// ---------------------------------------------------------------------------
// Bernstein class condition
// ---------------------------------------------------------------------------

BernsteinResult bernstein_check(const ConceptClass& c, const Distribution& dist,
                                const NoiseModel& noise, const Rational& a, double alpha) {
    if (a < 1) throw ParameterError("bernstein_check: a must be >= 1");
    if (alpha < 0 || alpha > 1) throw ParameterError("bernstein_check: alpha must be in [0,1]");
    if (dist.n() != c.n() || noise.n() != c.n())
        throw ParameterError("bernstein_check: size mismatch");
    dist.validate();
    noise.validate();

    std::vector<Rational> er(c.size());
    int best = 0;
    for (int h = 0; h < c.size(); ++h) {
        er[h] = noisy_error(dist, noise, c.hypotheses[h]);
        if (er[h] < er[best]) best = h; // strict < keeps the lowest index on ties
    }

    BernsteinResult r;
    r.hstar = best;
    for (int h = 0; h < c.size(); ++h) {
        const Rational lhs = point_distance(dist, c.hypotheses[h].pos, c.hypotheses[best].pos);
        const Rational ex = er[h] - er[best];
        bool ok;
        if (alpha == 1.0)
            ok = lhs <= a * ex;
        else if (alpha == 0.0)
            ok = lhs <= a;
        else if (ex == 0)
            ok = (lhs == 0);
        else
            ok = to_double(lhs) <= to_double(a) * std::pow(to_double(ex), alpha);
        if (!ok) {
            r.ok = false;
            r.violator = h;
            r.distance = lhs;
            r.excess = ex;
            return r;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Lower-bound scenarios
// ---------------------------------------------------------------------------

LowerBoundScenario lower_bound_construction(const std::string& kind, const ConceptClass& c,
                                            const LowerBoundParams& p) {
    LowerBoundScenario s;
    s.kind = kind;
    s.cls = &c;

    if (kind == "realizable_star") {
        const Rational& eps = p.epsilon;
        if (eps <= 0 || eps >= Rational(1, 48))
            throw ParameterError("lower_bound_construction: epsilon must be in (0, 1/48)");
        const StarNumber sn = star_number(c);
        // M_ε = ⌊(1+ε)/ε⌋ = ⌊1/ε⌋ + 1.
        const BigInt inv_floor = boost::multiprecision::denominator(eps) / boost::multiprecision::numerator(eps);
        const long long Meps = inv_floor.convert_to<long long>() + 1;
        const int M = static_cast<int>(std::min<long long>(sn.value, Meps));
        if (M < 2)
            throw ParameterError("lower_bound_construction: class '" + c.name +
                                 "' lacks a star set of size 2");
        const StarWitness w = star_witness(c, M);
        s.h0 = w.h0;
        s.star_points = w.points;
        s.star_hyps = w.hyps;
        s.target = w.h0;
        s.k = M - 1;
        s.epsilon = eps;
        s.threshold = eps;
        s.dist.mass.assign(c.n(), Rational(0));
        for (int i = 1; i < M; ++i) s.dist.mass[w.points[i]] = eps;
        s.dist.mass[w.points[0]] = Rational(1) - (M - 1) * eps;
        s.dist.validate();
        return s;
    }

    if (kind == "noisy_star") {
        const Rational &zeta = p.zeta, &beta = p.beta;
        if (p.k < 2) throw ParameterError("lower_bound_construction: k must be >= 2");
        if (zeta <= 0 || zeta * p.k > 1)
            throw ParameterError("lower_bound_construction: zeta must be in (0, 1/k]");
        if (beta <= 0 || beta >= Rational(1, 2))
            throw ParameterError("lower_bound_construction: beta must be in (0, 1/2)");
        if (p.t < 1 || p.t > p.k)
            throw ParameterError("lower_bound_construction: t must be in [1, k]");
        const StarWitness w = star_witness(c, p.k + 1); // throws if 𝔰 < k+1
        s.h0 = w.h0;
        s.star_points = w.points;
        s.star_hyps = w.hyps;
        s.k = p.k;
        s.t = p.t;
        s.zeta = zeta;
        s.beta = beta;
        s.target = w.hyps[p.t - 1];
        s.threshold = (zeta / 2) * (1 - 2 * beta);
        s.dist.mass.assign(c.n(), Rational(0));
        for (int i = 0; i < p.k; ++i) s.dist.mass[w.points[i]] = zeta;
        s.dist.mass[w.points[p.k]] = 1 - zeta * p.k;
        s.dist.validate();
        const Hypothesis& ht = c.hypotheses[s.target];
        s.noise.eta_plus.assign(c.n(), Rational(0));
        for (int x = 0; x < c.n(); ++x)
            s.noise.eta_plus[x] = ht.label(x) == +1 ? Rational(1) : Rational(0);
        for (int i = 0; i < p.k; ++i) {
            const int x = w.points[i];
            s.noise.eta_plus[x] = ht.label(x) == +1 ? Rational(1) - beta : beta;
        }
        s.noise.validate();
        return s;
    }

    throw ParameterError("lower_bound_construction: unknown kind '" + kind +
                         "' (expected realizable_star or noisy_star)");
}

double lower_bound_regime(const LowerBoundScenario& s) {
    if (s.kind == "realizable_star") {
        // min{𝔰−1, ⌊1/ε⌋} = M−1 = k by construction.
        return std::log(static_cast<double>(s.k)) / (2 * to_double(s.epsilon));
    }
    const double b = to_double(s.beta), z = to_double(s.zeta);
    const double gap = 1 - 2 * b;
    return std::max(0.0, 3 * b * std::log(s.k / 96.0) / (16 * z * gap * gap));
}

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_rats(const std::vector<Rational>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += format_rational(v[i]);
    }
    return out;
}

} // namespace

void save_scenario(const LowerBoundScenario& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("save_scenario: cannot open '" + path + "'");
    out << "vslab-scenario v1\n";
    out << "kind " << s.kind << '\n';
    out << "class " << (s.cls ? s.cls->name : "") << '\n';
    out << "h0 " << s.h0 << '\n';
    out << "points " << join_ints(s.star_points) << '\n';
    out << "hyps " << join_ints(s.star_hyps) << '\n';
    out << "target " << s.target << '\n';
    out << "k " << s.k << '\n';
    out << "t " << s.t << '\n';
    out << "epsilon " << format_rational(s.epsilon) << '\n';
    out << "zeta " << format_rational(s.zeta) << '\n';
    out << "beta " << format_rational(s.beta) << '\n';
    out << "threshold " << format_rational(s.threshold) << '\n';
    out << "masses " << join_rats(s.dist.mass) << '\n';
    if (!s.noise.empty()) out << "etas " << join_rats(s.noise.eta_plus) << '\n';
}

LowerBoundScenario load_scenario(const std::string& path, const ConceptClass& c) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParameterError("load_scenario: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "vslab-scenario v1")
        throw ParameterError("load_scenario '" + path + "' line 1: expected header 'vslab-scenario v1'");

    LowerBoundScenario s;
    s.cls = &c;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        try {
            if (key == "kind") {
                ss >> s.kind;
            } else if (key == "class") {
                std::string name;
                ss >> name;
                if (name != c.name)
                    throw ParameterError("scenario was built on class '" + name + "', got '" + c.name + "'");
            } else if (key == "h0") {
                ss >> s.h0;
            } else if (key == "points") {
                for (int v; ss >> v;) s.star_points.push_back(v);
            } else if (key == "hyps") {
                for (int v; ss >> v;) s.star_hyps.push_back(v);
            } else if (key == "target") {
                ss >> s.target;
            } else if (key == "k") {
                ss >> s.k;
            } else if (key == "t") {
                ss >> s.t;
            } else if (key == "epsilon" || key == "zeta" || key == "beta" || key == "threshold") {
                std::string v;
                ss >> v;
                const Rational q = parse_rational(v);
                if (key == "epsilon") s.epsilon = q;
                else if (key == "zeta") s.zeta = q;
                else if (key == "beta") s.beta = q;
                else s.threshold = q;
            } else if (key == "masses") {
                for (std::string v; ss >> v;) s.dist.mass.push_back(parse_rational(v));
            } else if (key == "etas") {
                for (std::string v; ss >> v;) s.noise.eta_plus.push_back(parse_rational(v));
            } else {
                throw ParameterError("unknown key '" + key + "'");
            }
        } catch (const ParameterError& e) {
            throw ParameterError("load_scenario '" + path + "': " + e.what());
        }
    }
    if (s.kind != "realizable_star" && s.kind != "noisy_star")
        throw ParameterError("load_scenario '" + path + "': bad kind '" + s.kind + "'");
    if (s.dist.n() != c.n())
        throw ParameterError("load_scenario '" + path + "': mass count does not match the class");
    if (!s.noise.empty() && s.noise.n() != c.n())
        throw ParameterError("load_scenario '" + path + "': eta count does not match the class");
    for (int h : s.star_hyps)
        if (h < 0 || h >= c.size())
            throw ParameterError("load_scenario '" + path + "': hypothesis index out of range");
    for (int x : s.star_points)
        if (x < 0 || x >= c.n())
            throw ParameterError("load_scenario '" + path + "': point index out of range");
    if (s.h0 < 0 || s.h0 >= c.size() || s.target < 0 || s.target >= c.size())
        throw ParameterError("load_scenario '" + path + "': center/target index out of range");
    s.dist.validate();
    s.noise.validate();
    return s;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

PointSampler::PointSampler(const Distribution& dist) {
    dist.validate();
    if (dist.n() == 0) throw ParameterError("PointSampler: empty distribution");
    Rational cdf = 0;
    for (int i = 0; i < dist.n() - 1; ++i) {
        cdf += dist.mass[i];
        if (cdf >= 1) break; // saturated: the remaining points have zero mass
        thresholds_.push_back(scaled64(cdf));
    }
}

int PointSampler::draw(RngStream& rng) const {
    const std::uint64_t u = rng.next_u64();
    const auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), u);
    return static_cast<int>(it - thresholds_.begin());
}

LabelSampler::LabelSampler(const Hypothesis& target)
    : thresholds_(target.n(), 0), always_pos_(target.n(), 0) {
    for (int x = 0; x < target.n(); ++x) always_pos_[x] = target.label(x) == +1;
}

LabelSampler::LabelSampler(const NoiseModel& noise)
    : thresholds_(noise.n(), 0), always_pos_(noise.n(), 0) {
    noise.validate();
    for (int x = 0; x < noise.n(); ++x) {
        if (noise.eta_plus[x] == 1)
            always_pos_[x] = 1;
        else
            thresholds_[x] = scaled64(noise.eta_plus[x]);
    }
}

int LabelSampler::draw(int point, RngStream& rng) const {
    const std::uint64_t u = rng.next_u64(); // always consumed: stream alignment
    if (always_pos_[point]) return +1;
    return u < thresholds_[point] ? +1 : -1;
}

namespace {

template <typename Labeler>
LabeledSample sample_impl(const Distribution& dist, const Labeler& labeler, int m, RngStream& rng) {
    if (m < 0) throw ParameterError("sample_labeled: m must be >= 0");
    const PointSampler points(dist);
    const LabelSampler labels(labeler);
    LabeledSample out;
    out.pairs.reserve(m);
    for (int i = 0; i < m; ++i) {
        const int x = points.draw(rng);
        out.push(x, labels.draw(x, rng));
    }
    return out;
}

} // namespace

LabeledSample sample_labeled(const Distribution& dist, const Hypothesis& target, int m, RngStream& rng) {
    if (dist.n() != target.n()) throw ParameterError("sample_labeled: dist/target size mismatch");
    return sample_impl(dist, target, m, rng);
}

LabeledSample sample_labeled(const Distribution& dist, const NoiseModel& noise, int m, RngStream& rng) {
    if (dist.n() != noise.n()) throw ParameterError("sample_labeled: dist/noise size mismatch");
    return sample_impl(dist, noise, m, rng);
}

} // namespace vslab
