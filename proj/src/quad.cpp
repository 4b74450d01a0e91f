#include "biconserve/quad.hpp"

#include <numbers>

namespace biconserve {

double period(const ModelParams& params, const QAnalysis& qa, const QuadratureConfig& cfg) {
    const double p = params.pval();
    return singular_integral([&](double u) { return 3.0 * p / u; }, qa, cfg);
}

double closure_integral(const ModelParams& params, const QAnalysis& qa,
                        const QuadratureConfig& cfg) {
    validate(cfg);
    if (!(params.rho > 0.0)) {
        throw std::domain_error("closure_integral: requires rho > 0");
    }
    if (qa.factor_g.coeff.empty()) {
        throw std::invalid_argument("closure_integral: analysis lacks deflated factor G");
    }

    const double p = params.pval();
    const double omp = params.one_minus_p();
    const double pref = 3.0 * p * omp * std::sqrt(params.rho * params.d);
    const double expo = 0.5 * (params.n + 2);
    const double w = std::cbrt(params.rho * p * p / params.d);  // real pole of the integrand
    const double mid = 0.5 * (qa.alpha + qa.beta);
    const double half = 0.5 * (qa.alpha - qa.beta);

    // Factor the pole: d u^3 - rho p^2 = d (u - w)(u^2 + u w + w^2), so the
    // integrand is Phi(u)/(u - w) with Phi analytic across [beta, alpha].
    const auto phi = [&](double u) {
        const double g = qa.factor_g(u);
        if (!(g > 0.0)) {
            throw QuadratureError("closure_integral: deflated factor G not positive at u=" +
                                      std::to_string(u),
                                  0.0, 0.0);
        }
        return std::pow(u, expo) / (params.d * (u * u + u * w + w * w) * std::sqrt(g));
    };
    const double phi_w = phi(w);

    // As d grows, w approaches beta like d^(-5/3) relative to it, so the pole
    // sits ever closer below the integration interval and plain quadrature in
    // theta stalls. Subtract the pole analytically instead:
    //   int Phi/(u-w) dtheta = int (Phi(u)-Phi(w))/(u-w) dtheta
    //                          + Phi(w) * pi / sqrt((beta-w)(alpha-w)),
    // using the closed form int_0^pi dtheta/(A + B cos) = pi/sqrt(A^2-B^2).
    // beta - w itself must come from Q(beta) = 0, i.e.
    // d(beta^3 - w^3) = (1-p)^2 beta^(n+1); direct subtraction cancels
    // catastrophically once the gap is ~1e-9 relative or below.
    const double beta_minus_w = omp * omp * std::pow(qa.beta, params.n + 1) /
                                (params.d * (qa.beta * qa.beta + qa.beta * w + w * w));
    const double alpha_minus_w = 2.0 * half + beta_minus_w;
    const double pole_term =
        phi_w * std::numbers::pi / std::sqrt(beta_minus_w * alpha_minus_w);

    const auto estimate = [&](long nodes) {
        const double step = std::numbers::pi / static_cast<double>(nodes);
        double acc = 0.0;
        for (long j = 0; j < nodes; ++j) {
            const double theta = (static_cast<double>(j) + 0.5) * step;
            const double u = mid + half * std::cos(theta);
            // u - w = half (1 + cos) + (beta - w), with 1 + cos = 2 cos^2(t/2)
            // kept in product form so the near-beta nodes stay exact.
            const double c = std::cos(0.5 * theta);
            const double u_minus_w = 2.0 * half * c * c + beta_minus_w;
            acc += (phi(u) - phi_w) / u_minus_w;
        }
        return acc * step;
    };

    double prev = estimate(cfg.initial_nodes);
    for (long nodes = 2L * cfg.initial_nodes; nodes <= cfg.max_nodes; nodes *= 2) {
        const double cur = estimate(nodes);
        const double full = std::abs(cur + pole_term);
        if (std::abs(cur - prev) <= cfg.rel_tol * std::max(full, 1e-300)) {
            return pref * (cur + pole_term);
        }
        prev = cur;
    }
    throw QuadratureError("closure_integral: no convergence at max_nodes",
                          pref * (prev + pole_term),
                          std::numeric_limits<double>::quiet_NaN());
}

bool limit_regime(const QAnalysis& qa, const DerivedConstants& dc) {
    return (qa.alpha - qa.beta) / dc.u_star < 1e-6;
}

}  // namespace biconserve
