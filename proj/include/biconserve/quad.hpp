#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "biconserve/errors.hpp"
#include "biconserve/params.hpp"
#include "biconserve/polyq.hpp"

namespace biconserve {

struct QuadratureConfig {
    int initial_nodes = 64;
    long max_nodes = 1L << 20;
    double rel_tol = 1e-11;
};

inline void validate(const QuadratureConfig& cfg) {
    if (cfg.initial_nodes < 8) {
        throw std::invalid_argument("QuadratureConfig: initial_nodes must be >= 8");
    }
    if (!(cfg.rel_tol > 10.0 * std::numeric_limits<double>::epsilon())) {
        throw std::invalid_argument("QuadratureConfig: rel_tol too small");
    }
}

// Integral of f(u)/sqrt(Q(u)) over (beta, alpha). The substitution
// u(theta) = (alpha+beta)/2 + ((alpha-beta)/2) cos(theta) absorbs the
// square-root endpoint singularity: sqrt((u-beta)(alpha-u)) cancels and
// the integrand becomes f(u(theta))/sqrt(G(u(theta))) on [0, pi], which is
// smooth and even at both ends. The midpoint rule on that periodic
// structure converges spectrally; nodes double until two successive
// estimates agree to rel_tol.
template <class F>
double singular_integral(F&& f, const QAnalysis& qa, const QuadratureConfig& cfg = {}) {
    validate(cfg);
    if (qa.factor_g.coeff.empty()) {
        throw std::invalid_argument("singular_integral: analysis lacks deflated factor G");
    }
    const double mid = 0.5 * (qa.alpha + qa.beta);
    const double half = 0.5 * (qa.alpha - qa.beta);

    const auto estimate = [&](long nodes) {
        const double step = std::numbers::pi / static_cast<double>(nodes);
        double acc = 0.0;
        for (long j = 0; j < nodes; ++j) {
            const double theta = (static_cast<double>(j) + 0.5) * step;
            const double u = mid + half * std::cos(theta);
            const double g = qa.factor_g(u);
            if (!(g > 0.0)) {
                throw QuadratureError("singular_integral: deflated factor G not positive at u=" +
                                          std::to_string(u),
                                      0.0, 0.0);
            }
            acc += f(u) / std::sqrt(g);
        }
        return acc * step;
    };

    double prev = estimate(cfg.initial_nodes);
    for (long nodes = 2L * cfg.initial_nodes; nodes <= cfg.max_nodes; nodes *= 2) {
        const double cur = estimate(nodes);
        if (std::abs(cur - prev) <= cfg.rel_tol * std::max(std::abs(cur), 1e-300)) return cur;
        prev = cur;
    }
    throw QuadratureError("singular_integral: no convergence at max_nodes", prev,
                          std::numeric_limits<double>::quiet_NaN());
}

// d u^3 - rho p^2, evaluated directly so the pole condition stays explicit.
inline double pole_factor(const ModelParams& params, double u) {
    const double p = params.pval();
    return params.d * u * u * u - params.rho * p * p;
}

// Curvature period: rho_period = 3p * integral of du / (u sqrt(Q)),
// twice the beta -> alpha transit time.
double period(const ModelParams& params, const QAnalysis& qa, const QuadratureConfig& cfg = {});

// Closure integral I(d) = 3p(1-p) sqrt(rho d) *
// integral of u^((n+2)/2) / ((d u^3 - rho p^2) sqrt(Q)) du.
// The real pole at u = (rho p^2 / d)^(1/3) crowds beta from below as d grows,
// so it is subtracted analytically (closed-form Poisson-kernel integral) and
// only the smooth remainder goes through the cosine-substitution rule.
double closure_integral(const ModelParams& params, const QAnalysis& qa,
                        const QuadratureConfig& cfg = {});

// Amplitude small enough that tracing is dominated by round-off; sweeps
// label such levels and traces refuse them.
bool limit_regime(const QAnalysis& qa, const DerivedConstants& dc);

}  // namespace biconserve
