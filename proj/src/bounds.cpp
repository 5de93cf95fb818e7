#include "vslab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "vslab/errors.hpp"

namespace vslab {

namespace {

// §1.1 conventions.
double Log(double x) { return std::log(std::max(x, std::exp(1.0))); }
double Log2(double x) { return std::log2(std::max(x, 2.0)); }

// a·Log(x) under the convention 0·Log(∞) = 0 (x may be IEEE inf from a
// division by zero, per x/0 = ∞).
double mul_log(double a, double x) { return a == 0 ? 0.0 : a * Log(x); }
double mul_log2(double a, double x) { return a == 0 ? 0.0 : a * Log2(x); }

struct Ctx {
    const std::string& name;
    const BoundParams& params;

    const Rational& need(const char* key) const {
        auto it = params.find(key);
        if (it == params.end())
            throw ParameterError(name + ": missing required parameter '" + key + "'");
        return it->second;
    }
    double real(const char* key) const { return to_double(need(key)); }

    double count(const char* key, long long lo) const { // integer >= lo
        const Rational& q = need(key);
        if (boost::multiprecision::denominator(q) != 1 || q < lo)
            throw ParameterError(name + ": parameter '" + key + "' must be an integer >= " +
                                 std::to_string(lo));
        return to_double(q);
    }
    double delta() const {
        const Rational& q = need("delta");
        if (q <= 0 || q >= 1) throw ParameterError(name + ": parameter 'delta' must be in (0,1)");
        return to_double(q);
    }
    double positive(const char* key) const {
        const Rational& q = need(key);
        if (q <= 0) throw ParameterError(name + ": parameter '" + key + "' must be > 0");
        return to_double(q);
    }
    double at_least(const char* key, const Rational& lo) const {
        const Rational& q = need(key);
        if (q < lo)
            throw ParameterError(name + ": parameter '" + key + "' must be >= " + format_rational(lo));
        return to_double(q);
    }
    double alpha() const {
        const Rational& q = need("alpha");
        if (q <= 0 || q > 1) throw ParameterError(name + ": parameter 'alpha' must be in (0,1]");
        return to_double(q);
    }
};

using Eval = std::function<double(const Ctx&)>;

// The Bernstein-form outer shell: constant * (a*(dim_term + Log(1/delta_or_0))/m)^{1/(2-alpha)}.
double bernstein_shell(const Ctx& c, double log_arg, bool expectation) {
    const double a = c.at_least("a", 1), alpha = c.alpha();
    const double dim = c.count("dim", 0), m = c.count("m", 1);
    const double C = c.positive("constant");
    double inner = mul_log(dim, log_arg);
    if (!expectation) inner += Log(1.0 / c.delta());
    return C * std::pow(a * inner / m, 1.0 / (2.0 - alpha));
}

double bernstein_mn_arg(const Ctx& c) {
    const double a = c.at_least("a", 1), alpha = c.alpha();
    const double dim = c.count("dim", 0), m = c.count("m", 1);
    return (1.0 / a) * std::pow(m / (a * dim), alpha / (2.0 - alpha)); // dim=0 -> inf
}

const std::map<std::string, Eval>& registry() {
    static const std::map<std::string, Eval> table = {
        // Theorem monotone-erm, Eq. (monotone-erm-eps-conf).
        {"monotone_vc",
         [](const Ctx& c) {
             return (4.0 / c.count("m", 1)) * (17.0 * c.count("vc", 0) + 4.0 * std::log(4.0 / c.delta()));
         }},
        // Eq. (monotone-erm-expectation).
        {"monotone_vc-expectation",
         [](const Ctx& c) { return 68.0 * (c.count("vc", 0) + 1.0) / c.count("m", 1); }},
        // Lemma classic-erm.
        {"classic_vapnik",
         [](const Ctx& c) {
             const double vc = c.count("vc", 0), m = c.count("m", 1);
             return (2.0 / m) * (mul_log2(vc, 2.0 * std::exp(1.0) * m / vc) + Log2(2.0 / c.delta()));
         }},
        // Lemma classic-compression (requires n < m).
        {"compression_lemma",
         [](const Ctx& c) {
             const double n = c.count("n", 0), m = c.count("m", 1);
             if (n >= m) throw ParameterError("compression_lemma: requires n < m");
             return (1.0 / (m - n)) * (mul_log(n, std::exp(1.0) * m / n) + Log(1.0 / c.delta()));
         }},
        // Theorem monotone-compression, Eq. (monotone-compression-eps-conf).
        {"monotone_compression",
         [](const Ctx& c) {
             return (1.0 / c.count("m", 1)) *
                    (21.0 * c.count("n", 0) + 16.0 * std::log(3.0 / c.delta()));
         }},
        // Eq. (monotone-compression-expectation).
        {"monotone_compression-expectation",
         [](const Ctx& c) { return (21.0 * c.count("n", 0) + 34.0) / c.count("m", 1); }},
        // Theorem int-closed (the Closure algorithm).
        {"closure",
         [](const Ctx& c) {
             return (1.0 / c.count("m", 1)) *
                    (21.0 * c.count("dim", 0) + 16.0 * std::log(3.0 / c.delta()));
         }},
        {"closure-expectation",
         [](const Ctx& c) { return (21.0 * c.count("dim", 0) + 34.0) / c.count("m", 1); }},
        // Theorem PDIS.
        {"pdis_nhat",
         [](const Ctx& c) {
             return (16.0 / c.count("m", 1)) * (2.0 * c.count("nhat", 0) + std::log(3.0 / c.delta()));
         }},
        // Theorem PDIS-star.
        {"pdis_star",
         [](const Ctx& c) {
             return (1.0 / c.count("m", 1)) * (21.0 * c.count("s", 1) + 16.0 * std::log(3.0 / c.delta()));
         }},
        // Theorem vc-erm. The ln argument is 49e·n̂/dim + 37 >= 37 > e, so a
        // plain ln is already the §1.1 Log on its domain; dim=0 uses 0·ln(∞)=0.
        {"erm_nhat",
         [](const Ctx& c) {
             const double dim = c.count("dim", 0), nhat = c.count("nhat", 0), m = c.count("m", 1);
             const double arg = 49.0 * std::exp(1.0) * nhat / dim + 37.0;
             const double dim_term = dim == 0 ? 0.0 : dim * std::log(arg);
             return (8.0 / m) * (dim_term + 8.0 * std::log(6.0 / c.delta()));
         }},
        // Corollary erm-star ("≲": constant required).
        {"erm_star",
         [](const Ctx& c) {
             const double dim = c.count("dim", 0), s = c.count("s", 1), m = c.count("m", 1);
             return (c.positive("constant") / m) *
                    (mul_log(dim, std::min(s, m) / dim) + Log(1.0 / c.delta()));
         }},
        {"erm_star-expectation",
         [](const Ctx& c) {
             const double dim = c.count("dim", 0), s = c.count("s", 1), m = c.count("m", 1);
             return c.positive("constant") * mul_log(dim, std::min(s, m) / dim) / m;
         }},
        // Eq. (gk-dist-free): the best distribution-free form of (gk-dc),
        // kept for the erm_star comparison property.
        {"gk_dist_free",
         [](const Ctx& c) {
             const double dim = c.count("dim", 0), s = c.count("s", 1), m = c.count("m", 1);
             return (c.positive("constant") / m) *
                    (mul_log(dim, std::min(dim * s, m) / dim) + Log(1.0 / c.delta()));
         }},
        // Theorem vc-erm-subregion (c = 16 fixed by the theorem): the φ₁₆
        // value is distribution-dependent and passed in (>= 1 by definition).
        {"erm_subregion",
         [](const Ctx& c) {
             const double dim = c.count("dim", 0), m = c.count("m", 1);
             const double pc = c.at_least("phi_c", 1);
             const double dim_term = dim == 0 ? 0.0 : dim * std::log(83.0 * pc);
             return (21.0 / m) * (dim_term + 3.0 * std::log(4.0 / c.delta()));
         }},
        // Theorem CAL-label-complexity: sufficient number of label requests
        // (not an error rate).
        {"cal_labels",
         [](const Ctx& c) {
             const double nt = c.count("ntilde", 0), M = c.count("M", 1);
             return c.positive("constant") * (nt + Log(Log(M) / c.delta())) * Log(M);
         }},
        // Eq. (mn-bernstein).
        {"bernstein_erm_mn", [](const Ctx& c) { return bernstein_shell(c, bernstein_mn_arg(c), false); }},
        // Eq. (gk-bernstein): θ evaluated by the caller at a(a·dim/m)^{α/(2-α)}.
        {"bernstein_erm_gk",
         [](const Ctx& c) { return bernstein_shell(c, c.at_least("theta", 1), false); }},
        // Eq. (star-bernstein).
        {"bernstein_erm_star",
         [](const Ctx& c) {
             return bernstein_shell(c, std::min(c.count("s", 1), bernstein_mn_arg(c)), false);
         }},
        // Eq. (star-bernstein-expectation).
        {"bernstein_erm_star-expectation",
         [](const Ctx& c) {
             return bernstein_shell(c, std::min(c.count("s", 1), bernstein_mn_arg(c)), true);
         }},
        // Theorem zc-noise: φ̂ evaluated by the caller at zc_noise_r0(...).
        {"zc_noise", [](const Ctx& c) { return bernstein_shell(c, c.at_least("phi_hat", 1), false); }},
        // Theorem erm-lb (lower bound; "≳" with ∧1 inside).
        {"erm_lower",
         [](const Ctx& c) {
             const double dim = c.count("dim", 0), s = c.count("s", 1), m = c.count("m", 1);
             const double expr = (dim + Log(std::min(s, m)) + Log(1.0 / c.delta())) / m;
             return c.positive("constant") * std::min(expr, 1.0);
         }},
        {"erm_lower-expectation",
         [](const Ctx& c) {
             const double dim = c.count("dim", 0), s = c.count("s", 1), m = c.count("m", 1);
             return c.positive("constant") * std::min((dim + Log(std::min(s, m))) / m, 1.0);
         }},
        // Theorem bounded-lower-bound (lower bound; ∧(1-2β) inside).
        {"bounded_lower",
         [](const Ctx& c) {
             const double dim = c.count("dim", 0), s = c.count("s", 1), m = c.count("m", 1);
             const Rational& bq = c.need("beta");
             if (bq <= 0 || bq >= Rational(1, 2))
                 throw ParameterError("bounded_lower: parameter 'beta' must be in (0,1/2)");
             const double beta = to_double(bq), gap = 1.0 - 2.0 * beta;
             const double expr =
                 (dim + beta * Log(std::min(s, gap * gap * m)) + Log(1.0 / c.delta())) / (gap * m);
             return c.positive("constant") * std::min(expr, gap);
         }},
        {"bounded_lower-expectation",
         [](const Ctx& c) {
             const double dim = c.count("dim", 0), s = c.count("s", 1), m = c.count("m", 1);
             const Rational& bq = c.need("beta");
             if (bq <= 0 || bq >= Rational(1, 2))
                 throw ParameterError("bounded_lower-expectation: parameter 'beta' must be in (0,1/2)");
             const double beta = to_double(bq), gap = 1.0 - 2.0 * beta;
             const double expr = (dim + beta * Log(std::min(s, gap * gap * m))) / (gap * m);
             return c.positive("constant") * std::min(expr, gap);
         }},
    };
    return table;
}

} // namespace

BoundResult evaluate_bound(const std::string& name, const BoundParams& params) {
    auto it = registry().find(name);
    if (it == registry().end()) {
        std::string msg = "evaluate_bound: unknown bound '" + name + "'; known: ";
        bool first = true;
        for (const auto& [k, v] : registry()) {
            if (!first) msg += ", ";
            msg += k;
            first = false;
        }
        throw ParameterError(msg);
    }
    Ctx ctx{name, params};
    BoundResult res;
    res.name = name;
    res.params = params;
    res.value = it->second(ctx);
    res.clamped = res.value > 1.0;
    return res;
}

std::vector<std::string> bound_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : registry()) names.push_back(k);
    return names;
}

double zc_noise_r0(double a, double alpha, double dim, double m) {
    return a * std::pow(a * dim / m, alpha / (2.0 - alpha));
}

bool log_factors_lemma_check(double a, double b, double c1, double c2) {
    if (a < 1 || b < 1 || c1 < 1 || c2 < 0)
        throw ParameterError("log_factors_lemma_check: requires a,b,c1 >= 1 and c2 >= 0");
    const double lhs = a * std::log(c1 * (c2 + b / a));
    const double rhs = a * std::log(c1 * (c2 + std::exp(1.0))) + b / std::exp(1.0);
    return lhs <= rhs;
}

} // namespace vslab
