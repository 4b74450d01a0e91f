#include "biconserve/closure.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "biconserve/errors.hpp"

namespace biconserve {

bool admissible_target(int l, int r) {
    if (l < 1 || r < 1) return false;
    if (std::gcd(l, r) != 1) return false;
    const long ll = 2L * l;
    return r < ll && ll * ll < 2L * static_cast<long>(r) * r;
}

std::vector<ClosureTarget> enumerate_targets(int max_r) {
    if (max_r < 1) throw std::invalid_argument("enumerate_targets: max_r must be >= 1");
    std::vector<ClosureTarget> out;
    for (int r = 1; r <= max_r; ++r) {
        for (int l = r / 2 + 1; 4L * l * l < 2L * r * r; ++l) {
            if (admissible_target(l, r)) out.push_back({l, r});
        }
    }
    return out;
}

ClosureSolution solve_level(const ClosureTarget& target, int n, double rho,
                            const SolverConfig& cfg) {
    if (!admissible_target(target.l, target.r)) {
        throw std::invalid_argument("solve_level: pair (" + std::to_string(target.l) + "," +
                                    std::to_string(target.r) + ") is not admissible");
    }
    if (!(rho > 0.0)) throw std::domain_error("solve_level: requires rho > 0");

    const Rational p = exponent_for_dimension(n);
    const double d_star = critical_level(p, rho);
    const double angle = target.angle();

    const auto eval_i = [&](double d) {
        const ModelParams mp = ModelParams::make(n, rho, d);
        const QAnalysis qa = analyze(mp);
        return closure_integral(mp, qa, cfg.quad);
    };

    // Log-spaced sampling from the d_star side; first sign change wins.
    double lo = d_star * (1.0 + 1e-6);
    double f_lo = eval_i(lo) - angle;
    double hi = 0.0;
    bool bracketed = false;
    std::ostringstream sampled;
    sampled << "I(" << lo << ")=" << f_lo + angle;
    for (int k = -5; k <= cfg.max_exponent; ++k) {
        const double d = d_star * (1.0 + std::pow(10.0, k));
        const double f = eval_i(d) - angle;
        sampled << ", I(" << d << ")=" << f + angle;
        if ((f_lo <= 0.0) != (f <= 0.0)) {
            hi = d;
            bracketed = true;
            break;
        }
        lo = d;
        f_lo = f;
    }
    if (!bracketed) {
        throw BracketError("solve_level: no sign change of I(d) - 2*pi*l/r up to d_star*10^" +
                           std::to_string(cfg.max_exponent) + "; sampled: " + sampled.str());
    }

    const double b_lo = lo, b_hi = hi;
    double d_mid = lo, f_mid = f_lo;
    for (int it = 0; it < 200; ++it) {
        d_mid = 0.5 * (lo + hi);
        f_mid = eval_i(d_mid) - angle;
        if (std::abs(f_mid) <= cfg.i_tol) break;
        if ((f_mid <= 0.0) == (f_lo <= 0.0)) {
            lo = d_mid;
            f_lo = f_mid;
        } else {
            hi = d_mid;
        }
        if (hi - lo <= 1e-16 * hi) break;
    }
    if (std::abs(f_mid) > cfg.i_tol) {
        throw ClosureError("solve_level: bisection stalled at |I - angle| = " +
                           std::to_string(std::abs(f_mid)));
    }

    ClosureSolution sol;
    sol.target = target;
    sol.params = ModelParams::make(n, rho, d_mid);
    sol.analysis = analyze(sol.params);
    sol.d_solved = d_mid;
    sol.i_value = f_mid + angle;
    sol.period = period(sol.params, sol.analysis, cfg.quad);
    sol.bracket_lo = b_lo;
    sol.bracket_hi = b_hi;
    return sol;
}

}  // namespace biconserve
