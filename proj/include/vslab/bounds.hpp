#pragma once

#include <map>
#include <string>
#include <vector>

#include "vslab/rational.hpp"

namespace vslab {

// ---------------------------------------------------------------------------
// Closed-form evaluators for every bound in the paper. Pure functions of the
// named parameters; distribution-dependent quantities (θ, φ_c, φ̂, n̂, ñ)
// are computed elsewhere and passed in by value. §1.1 conventions are
// honored exactly: Log(x) = ln(x ∨ e), Log₂(x) = log₂(x ∨ 2), x/0 = ∞ and
// 0·Log(∞) = 0. Bounds the paper states with "≲"/"≳" take an explicit
// `constant` parameter — no default is invented silently.
// ---------------------------------------------------------------------------

using BoundParams = std::map<std::string, Rational>;

struct BoundResult {
    std::string name;
    BoundParams params; // echo of all inputs
    double value = 0;
    bool clamped = false; // true iff value > 1 (reported raw, never clamped)
};

// Catalog (append "-expectation" where the paper also states an expectation
// form):
//   monotone_vc            (vc, m, delta)            Theorem monotone-erm
//   classic_vapnik         (vc, m, delta)            Lemma classic-erm
//   compression_lemma      (n, m, delta)             Lemma classic-compression
//   monotone_compression   (n, m, delta)             Theorem monotone-compression
//   closure                (dim, m, delta)           Theorem int-closed
//   pdis_nhat              (nhat, m, delta)          Theorem PDIS
//   pdis_star              (s, m, delta)             Theorem PDIS-star
//   erm_nhat               (dim, nhat, m, delta)     Theorem vc-erm
//   erm_star               (dim, s, m, delta, constant)   Corollary erm-star
//   gk_dist_free           (dim, s, m, delta, constant)   Eq. (gk-dist-free)
//   erm_subregion          (dim, m, delta, phi_c)    Theorem vc-erm-subregion
//   cal_labels             (ntilde, M, delta, constant)   Theorem CAL-label-complexity
//   bernstein_erm_mn       (a, alpha, dim, m, delta, constant)        Eq. (mn-bernstein)
//   bernstein_erm_gk       (a, alpha, dim, m, delta, theta, constant) Eq. (gk-bernstein)
//   bernstein_erm_star     (a, alpha, dim, s, m, delta, constant)     Eq. (star-bernstein)
//   zc_noise               (a, alpha, dim, m, delta, phi_hat, constant)
//                                                    Theorem zc-noise
//   erm_lower              (dim, s, m, delta, constant)   Theorem erm-lb
//   bounded_lower          (dim, beta, s, m, delta, constant) Theorem bounded-lower-bound
BoundResult evaluate_bound(const std::string& name, const BoundParams& params);

std::vector<std::string> bound_names();

// r0 at which Theorem zc-noise evaluates φ̂: a (a·dim/m)^{α/(2-α)}.
double zc_noise_r0(double a, double alpha, double dim, double m);

// Lemma log-factors-abstract: a ln(c1(c2 + b/a)) <= a ln(c1(c2+e)) + b/e,
// for a,b,c1 >= 1 and c2 >= 0. Returns whether the inequality holds at the
// given values (it always must).
bool log_factors_lemma_check(double a, double b, double c1, double c2);

} // namespace vslab
