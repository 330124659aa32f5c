#include "memsched/lp.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace memsched::lp {

namespace {

class Simplex {
public:
    Simplex(const std::vector<double>& objective, const std::vector<Constraint>& cons,
            double tol)
        : tol_(tol), n_vars_(objective.size()), m_(cons.size()) {
        // columns: original vars | slack/surplus | artificials
        n_slack_ = 0;
        for (const auto& c : cons)
            if (c.rel != Relation::Eq) ++n_slack_;

        // count artificials: every Eq row and every Ge row gets one; Le rows
        // with nonnegative rhs start with their slack basic
        std::size_t n_art = 0;
        for (const auto& c : cons) {
            const bool flip = c.rhs < 0.0;
            Relation rel = c.rel;
            if (flip) rel = rel == Relation::Le ? Relation::Ge : (rel == Relation::Ge ? Relation::Le : Relation::Eq);
            if (rel != Relation::Le) ++n_art;
        }
        n_cols_ = n_vars_ + n_slack_ + n_art;

        tableau_.assign(m_, std::vector<double>(n_cols_ + 1, 0.0));
        basis_.assign(m_, 0);
        artificial_.assign(n_cols_, false);

        std::size_t slack_at = n_vars_;
        std::size_t art_at = n_vars_ + n_slack_;
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& c = cons[i];
            if (c.coeffs.size() != n_vars_)
                throw std::invalid_argument("lp: constraint dimension mismatch");
            const bool flip = c.rhs < 0.0;
            const double sign = flip ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_vars_; ++j) tableau_[i][j] = sign * c.coeffs[j];
            tableau_[i][n_cols_] = sign * c.rhs;
            Relation rel = c.rel;
            if (flip) rel = rel == Relation::Le ? Relation::Ge : (rel == Relation::Ge ? Relation::Le : Relation::Eq);

            if (rel == Relation::Le) {
                tableau_[i][slack_at] = 1.0;
                basis_[i] = slack_at++;
            } else if (rel == Relation::Ge) {
                tableau_[i][slack_at] = -1.0; // surplus
                ++slack_at;
                tableau_[i][art_at] = 1.0;
                artificial_[art_at] = true;
                basis_[i] = art_at++;
            } else {
                tableau_[i][art_at] = 1.0;
                artificial_[art_at] = true;
                basis_[i] = art_at++;
            }
        }

        objective_ = objective;
    }

    Solution run() {
        Solution sol;

        // phase 1: maximize -sum(artificials)
        std::vector<double> phase1(n_cols_, 0.0);
        for (std::size_t j = 0; j < n_cols_; ++j)
            if (artificial_[j]) phase1[j] = -1.0;
        price_out(phase1);
        if (!iterate(/*allow_artificials=*/true)) return sol; // cannot happen: phase 1 is bounded
        if (z_[n_cols_] < -tol_) return sol;                  // infeasible
        evict_artificials();

        // phase 2
        std::vector<double> phase2(n_cols_, 0.0);
        for (std::size_t j = 0; j < n_vars_; ++j) phase2[j] = objective_[j];
        price_out(phase2);
        sol.feasible = true;
        if (!iterate(/*allow_artificials=*/false)) {
            sol.bounded = false;
            return sol;
        }
        sol.objective = z_[n_cols_];
        sol.x.assign(n_vars_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_vars_) sol.x[basis_[i]] = tableau_[i][n_cols_];
        return sol;
    }

private:
    // build the z-row for cost vector c: z[j] = c_B B^-1 A_j - c_j
    void price_out(const std::vector<double>& cost) {
        z_.assign(n_cols_ + 1, 0.0);
        for (std::size_t j = 0; j < n_cols_; ++j) z_[j] = -cost[j];
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= n_cols_; ++j) z_[j] += cb * tableau_[i][j];
        }
    }

    // Bland's rule; returns false on unboundedness
    bool iterate(bool allow_artificials) {
        for (;;) {
            std::size_t enter = n_cols_;
            for (std::size_t j = 0; j < n_cols_; ++j) {
                if (!allow_artificials && artificial_[j]) continue;
                if (z_[j] < -tol_) { enter = j; break; }
            }
            if (enter == n_cols_) return true; // optimal

            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (tableau_[i][enter] > tol_) {
                    const double ratio = tableau_[i][n_cols_] / tableau_[i][enter];
                    if (ratio < best_ratio - tol_ ||
                        (ratio < best_ratio + tol_ && (leave == m_ || basis_[i] < basis_[leave]))) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == m_) return false; // unbounded
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        const double p = tableau_[row][col];
        for (std::size_t j = 0; j <= n_cols_; ++j) tableau_[row][j] /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            const double f = tableau_[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_cols_; ++j) tableau_[i][j] -= f * tableau_[row][j];
        }
        const double fz = z_[col];
        if (fz != 0.0)
            for (std::size_t j = 0; j <= n_cols_; ++j) z_[j] -= fz * tableau_[row][j];
        basis_[row] = col;
    }

    // pivot basic artificials (all at value ~0 after phase 1) out of the basis
    void evict_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (!artificial_[basis_[i]]) continue;
            std::size_t col = n_cols_;
            for (std::size_t j = 0; j < n_cols_; ++j) {
                if (!artificial_[j] && std::abs(tableau_[i][j]) > tol_) { col = j; break; }
            }
            if (col != n_cols_) pivot(i, col);
            // else: redundant row; harmless to keep the zero-valued artificial
        }
    }

    double tol_;
    std::size_t n_vars_, m_, n_slack_ = 0, n_cols_ = 0;
    std::vector<std::vector<double>> tableau_;
    std::vector<std::size_t> basis_;
    std::vector<bool> artificial_;
    std::vector<double> objective_, z_;
};

} // namespace

Solution solve(const std::vector<double>& objective, const std::vector<Constraint>& constraints,
               double pivot_tol) {
    return Simplex(objective, constraints, pivot_tol).run();
}

bool feasible(const std::vector<Constraint>& constraints, double pivot_tol) {
    if (constraints.empty()) return true;
    std::vector<double> zero(constraints.front().coeffs.size(), 0.0);
    return solve(zero, constraints, pivot_tol).feasible;
}

} // namespace memsched::lp
