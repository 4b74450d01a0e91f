#pragma once

#include <numbers>
#include <vector>

#include "biconserve/params.hpp"
#include "biconserve/polyq.hpp"
#include "biconserve/quad.hpp"

namespace biconserve {

// Winding/lobe pair (l, r): the closed curve winds l times around the
// parametrization pole and has r curvature lobes.
struct ClosureTarget {
    int l = 0;
    int r = 0;
    double angle() const { return 2.0 * std::numbers::pi * l / r; }
};

// gcd(l, r) = 1 and r < 2l < sqrt(2) r, checked in integer arithmetic
// ((2l)^2 < 2 r^2). Equivalent to angle in (pi, sqrt(2) pi).
bool admissible_target(int l, int r);

// All admissible pairs with r <= max_r, sorted by r then l. No pair with
// l = 1 can satisfy the inequality, so simple closed curves never appear.
std::vector<ClosureTarget> enumerate_targets(int max_r);

struct SolverConfig {
    double i_tol = 1e-10;   // tolerance on the closure angle, not on d
    int max_exponent = 10;  // sample up to d = d_star (1 + 10^max_exponent)
    QuadratureConfig quad;
};

struct ClosureSolution {
    ClosureTarget target;
    ModelParams params;   // with d = d_solved
    QAnalysis analysis;   // at d_solved
    double d_solved = 0.0;
    double i_value = 0.0;
    double period = 0.0;  // curvature period at d_solved
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

// Solve I(d) = 2 pi l / r. Samples I on the log grid
// d = d_star (1 + 10^k), k = -6..max_exponent, takes the first sign
// change from the d_star side and bisects until |I(d) - angle| <= i_tol.
// Throws BracketError when no sign change is found.
ClosureSolution solve_level(const ClosureTarget& target, int n, double rho,
                            const SolverConfig& cfg = {});

}  // namespace biconserve
