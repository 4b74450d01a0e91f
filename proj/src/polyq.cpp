#include "biconserve/polyq.hpp"

#include <cmath>
#include <stdexcept>

#include "biconserve/errors.hpp"

namespace biconserve {

QAnalysis build_q(const ModelParams& params) {
    QAnalysis qa;
    qa.q.coeff.assign(params.n + 2, 0.0);
    const double p = params.pval();
    const double omp = params.one_minus_p();
    qa.q.coeff[0] = -params.rho * p * p;
    qa.q.coeff[3] = params.d;
    qa.q.coeff[params.n + 1] = -omp * omp;
    return qa;
}

int count_positive_roots(const QAnalysis& qa, const ModelParams& params) {
    if (qa.q.coeff.empty()) {
        throw std::invalid_argument("count_positive_roots: coefficients not built");
    }
    if (params.rho <= 0.0) return 1;  // single sign change
    const double d_star = critical_level(params.p, params.rho);
    if (params.d < d_star) return 0;
    if (params.d > d_star) return 2;
    return 1;  // double root at u_star
}

namespace {

// Bisection on a monotone sign change; assumes f(lo) and f(hi) differ in sign.
double bisect(const Poly& q, double lo, double hi, double flo) {
    for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = q(mid);
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double polish(const Poly& q, const Poly& qp, double u, double q_tol) {
    double best = u;
    double best_abs = std::abs(q(u));
    for (int it = 0; it < 50 && best_abs > q_tol; ++it) {
        const double der = qp(u);
        if (der == 0.0) break;
        u -= q(u) / der;
        const double cur = std::abs(q(u));
        if (cur < best_abs) {
            best = u;
            best_abs = cur;
        } else {
            break;
        }
    }
    return best;
}

}  // namespace

std::pair<double, double> isolate_roots(QAnalysis& qa, const ModelParams& params,
                                        const DerivedConstants& dc) {
    const Poly& q = qa.q;
    // Q(0) = -rho p^2 exactly; evaluating Q at u_pole instead would hit the
    // cancellation d u^3 - rho p^2 ~ 0 and give a round-off-random sign once
    // the true value -(1-p)^2 u_pole^(n+1) drops below machine noise.
    const double f_zero = q.coeff[0];
    const double f_star = q(dc.u_star);
    if (!(f_zero < 0.0) || !(f_star > 0.0)) {
        throw BracketError("isolate_roots: bracket signs inconsistent; level d <= d_star?");
    }
    const Poly qp = q.derivative();

    double beta = bisect(q, 0.0, dc.u_star, f_zero);
    double u_hi = 2.0 * dc.u_star;
    while (q(u_hi) > 0.0) {
        u_hi *= 2.0;
        if (!std::isfinite(u_hi)) throw BracketError("isolate_roots: no upper sign change found");
    }
    double alpha = bisect(q, dc.u_star, u_hi, f_star);

    const auto q_tol = [&](double u) { return 1e-13 * std::abs(params.d * u * u * u); };
    beta = polish(q, qp, beta, q_tol(beta));
    alpha = polish(q, qp, alpha, q_tol(alpha));
    if (std::abs(q(beta)) > q_tol(beta) || std::abs(q(alpha)) > q_tol(alpha)) {
        throw BracketError("isolate_roots: root polish did not reach tolerance");
    }

    qa.beta = beta;
    qa.alpha = alpha;
    qa.positive_root_count = 2;
    return {beta, alpha};
}

Poly deflate(QAnalysis& qa) {
    if (!(qa.alpha > qa.beta) || qa.positive_root_count != 2) {
        throw std::invalid_argument("deflate: roots not isolated");
    }
    const auto& c = qa.q.coeff;
    const int m = qa.q.degree();

    std::vector<double> b(m);  // quotient of Q by (u - beta)
    double acc = c[m];
    for (int k = m - 1; k >= 0; --k) {
        b[k] = acc;
        acc = c[k] + qa.beta * acc;
    }
    const double rem1 = acc;

    // Quotient of the above by (u - alpha).  Forward synthetic division is
    // stable only while powers of alpha stay bounded; for alpha > 1 the error
    // in each step is amplified by alpha and the low-order coefficients (which
    // are tiny when alpha is huge) come out as pure noise.  Running the
    // recurrence backward from the constant term instead divides the error by
    // alpha at each step, so use it whenever alpha > 1.
    std::vector<double> g(m - 1);
    double rem2;
    if (qa.alpha > 1.0) {
        g[0] = -b[0] / qa.alpha;
        for (int k = 1; k <= m - 2; ++k) g[k] = (g[k - 1] - b[k]) / qa.alpha;
        rem2 = g[m - 2] - b[m - 1];
    } else {
        acc = b[m - 1];
        for (int k = m - 2; k >= 0; --k) {
            g[k] = acc;
            acc = b[k] + qa.alpha * acc;
        }
        rem2 = acc;
    }

    const double lead = std::abs(c[m]);
    const double scale = lead * std::pow(std::max(1.0, qa.alpha), m);
    const double bound2 = qa.alpha > 1.0 ? 1e-9 * lead : 1e-9 * scale;
    if (std::abs(rem1) > 1e-9 * scale || std::abs(rem2) > bound2) {
        throw DeflationError("deflate: remainder exceeds bound (|r1|=" + std::to_string(rem1) +
                             ", |r2|=" + std::to_string(rem2) + ")");
    }

    // Q = (u - beta)(u - alpha) g, so negate for Q = (u - beta)(alpha - u) G.
    for (double& gk : g) gk = -gk;
    qa.factor_g.coeff = std::move(g);
    return qa.factor_g;
}

QAnalysis analyze(const ModelParams& params) {
    const DerivedConstants dc = DerivedConstants::from(params);
    QAnalysis qa = build_q(params);
    qa.positive_root_count = count_positive_roots(qa, params);
    if (qa.positive_root_count != 2) {
        throw std::domain_error("analyze: level d <= d_star has no periodic orbit (d_star = " +
                                std::to_string(dc.d_star) + ")");
    }
    isolate_roots(qa, params, dc);
    deflate(qa);
    return qa;
}

}  // namespace biconserve
