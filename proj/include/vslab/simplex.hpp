#pragma once

#include <optional>
#include <vector>

#include "vslab/rational.hpp"

namespace vslab {

// Self-contained exact simplex over rationals (no external solver; the
// sandwich/equality acceptance checks require exact optima). Dense two-phase
// tableau with Bland's rule, so termination is guaranteed. Desk-scale only.
//
// Solves: minimize c·x subject to A x = b, x >= 0.
// Callers encode <= rows by appending slack variables themselves.
//
// `basis_hint`, when nonempty, names one basic column per row whose columns
// already form an identity with b >= 0 (e.g. slack/direct bases); phase 1 is
// then skipped. Returns nullopt iff infeasible.

struct SimplexResult {
    Rational value;
    std::vector<Rational> x;
};

std::optional<SimplexResult> simplex_min(std::vector<std::vector<Rational>> A, std::vector<Rational> b,
                                         std::vector<Rational> c, std::vector<int> basis_hint = {});

} // namespace vslab
