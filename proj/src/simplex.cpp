#include "vslab/simplex.hpp"

#include <stdexcept>
#include <utility>

namespace vslab {

namespace {

// Dense tableau state. `T` holds the constraint matrix after row reduction,
// `red` the reduced-cost row for the current phase's objective.
struct Tableau {
    std::vector<std::vector<Rational>> T;
    std::vector<Rational> rhs;
    std::vector<Rational> red;
    std::vector<int> basis;

    int rows() const { return static_cast<int>(T.size()); }
    int cols() const { return rows() ? static_cast<int>(T[0].size()) : 0; }

    void pivot(int pr, int pc) {
        Rational piv = T[pr][pc];
        for (auto& v : T[pr]) v /= piv;
        rhs[pr] /= piv;
        for (int i = 0; i < rows(); ++i) {
            if (i == pr || T[i][pc] == 0) continue;
            Rational f = T[i][pc];
            for (int j = 0; j < cols(); ++j) T[i][j] -= f * T[pr][j];
            T[i][pc] = 0; // kill round-off-free but explicit
            rhs[i] -= f * rhs[pr];
        }
        if (red[pc] != 0) {
            Rational f = red[pc];
            for (int j = 0; j < cols(); ++j) red[j] -= f * T[pr][j];
            red[pc] = 0;
        }
        basis[pr] = pc;
    }

    // Reduced costs for objective `cost` given the current basis (whose
    // columns are an identity by construction/pivoting).
    void reduce_costs(const std::vector<Rational>& cost) {
        red = cost;
        for (int i = 0; i < rows(); ++i) {
            const Rational& cb = cost[basis[i]];
            if (cb == 0) continue;
            for (int j = 0; j < cols(); ++j) red[j] -= cb * T[i][j];
        }
    }

    // Bland's rule: entering = lowest-index negative reduced cost; leaving =
    // lowest basic index among the minimum-ratio rows. Deterministic and
    // cycle-free. Throws on unboundedness (our LPs are all bounded below).
    void optimize() {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < cols(); ++j) {
                if (red[j] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return;
            int leave = -1;
            Rational best;
            for (int i = 0; i < rows(); ++i) {
                if (T[i][enter] <= 0) continue;
                Rational ratio = rhs[i] / T[i][enter];
                if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = std::move(ratio);
                }
            }
            if (leave < 0) throw std::logic_error("simplex_min: objective unbounded below");
            pivot(leave, enter);
        }
    }

    Rational objective(const std::vector<Rational>& cost) const {
        Rational v = 0;
        for (int i = 0; i < rows(); ++i) v += cost[basis[i]] * rhs[i];
        return v;
    }
};

} // namespace

std::optional<SimplexResult> simplex_min(std::vector<std::vector<Rational>> A, std::vector<Rational> b,
                                         std::vector<Rational> c, std::vector<int> basis_hint) {
    const int m = static_cast<int>(A.size());
    const int n = static_cast<int>(c.size());
    for (const auto& row : A)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("simplex_min: ragged matrix");
    if (static_cast<int>(b.size()) != m) throw std::invalid_argument("simplex_min: |b| != rows");
    if (m == 0) {
        for (const auto& v : c)
            if (v < 0) throw std::logic_error("simplex_min: objective unbounded below");
        return SimplexResult{0, std::vector<Rational>(n, 0)};
    }

    Tableau tab;
    tab.T = std::move(A);
    tab.rhs = std::move(b);

    if (!basis_hint.empty()) {
        if (static_cast<int>(basis_hint.size()) != m)
            throw std::invalid_argument("simplex_min: basis hint size mismatch");
        tab.basis = std::move(basis_hint);
    } else {
        // Phase 1: flip rows to b >= 0, append one artificial per row, and
        // minimize their sum.
        for (int i = 0; i < m; ++i) {
            if (tab.rhs[i] < 0) {
                for (auto& v : tab.T[i]) v = -v;
                tab.rhs[i] = -tab.rhs[i];
            }
        }
        for (int i = 0; i < m; ++i) {
            for (int k = 0; k < m; ++k) tab.T[k].push_back(k == i ? 1 : 0);
            tab.basis.push_back(n + i);
        }
        std::vector<Rational> art_cost(n + m, 0);
        for (int i = 0; i < m; ++i) art_cost[n + i] = 1;
        tab.reduce_costs(art_cost);
        tab.optimize();
        if (tab.objective(art_cost) != 0) return std::nullopt;

        // Drive leftover zero-valued artificials out of the basis; rows that
        // have no original-column pivot are redundant (0 = 0) and get dropped.
        for (int i = tab.rows() - 1; i >= 0; --i) {
            if (tab.basis[i] < n) continue;
            int pc = -1;
            for (int j = 0; j < n; ++j) {
                if (tab.T[i][j] != 0) {
                    pc = j;
                    break;
                }
            }
            if (pc >= 0) {
                tab.red.assign(tab.cols(), 0); // pivot() touches red; content irrelevant here
                tab.pivot(i, pc);
            } else {
                tab.T.erase(tab.T.begin() + i);
                tab.rhs.erase(tab.rhs.begin() + i);
                tab.basis.erase(tab.basis.begin() + i);
            }
        }
        for (auto& row : tab.T) row.resize(n);
    }

    tab.reduce_costs(c);
    tab.optimize();

    SimplexResult res;
    res.x.assign(n, 0);
    for (int i = 0; i < tab.rows(); ++i) res.x[tab.basis[i]] = tab.rhs[i];
    res.value = tab.objective(c);
    return res;
}

} // namespace vslab
