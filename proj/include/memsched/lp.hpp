#pragma once

#include <vector>

namespace memsched::lp {

enum class Relation { Le, Eq, Ge };

struct Constraint {
    std::vector<double> coeffs;
    Relation rel;
    double rhs;
};

struct Solution {
    bool feasible = false;
    bool bounded = true;
    double objective = 0.0;
    std::vector<double> x;
};

// maximize objective . x  subject to the constraints and x >= 0.
// Dense two-phase tableau simplex with Bland's rule; `pivot_tol` guards both
// pivot selection and the phase-1 feasibility verdict.
Solution solve(const std::vector<double>& objective,
               const std::vector<Constraint>& constraints,
               double pivot_tol = 1e-9);

// feasibility of { constraints, x >= 0 } alone (phase 1 only)
bool feasible(const std::vector<Constraint>& constraints, double pivot_tol = 1e-9);

} // namespace memsched::lp
