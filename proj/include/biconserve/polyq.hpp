#pragma once

#include <utility>
#include <vector>

#include "biconserve/params.hpp"

namespace biconserve {

// Dense polynomial, coeff[k] multiplies u^k.
struct Poly {
    std::vector<double> coeff;

    double operator()(double u) const {
        double acc = 0.0;
        for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * u + *it;
        return acc;
    }
    Poly derivative() const {
        Poly d;
        if (coeff.size() > 1) {
            d.coeff.resize(coeff.size() - 1);
            for (std::size_t k = 1; k < coeff.size(); ++k) d.coeff[k - 1] = k * coeff[k];
        }
        return d;
    }
    int degree() const { return static_cast<int>(coeff.size()) - 1; }
};

// Phase polynomial Q(u) = -(1-p)^2 u^(n+1) + d u^3 - rho p^2 and its
// positive-root data. The periodic curvature oscillates between the two
// positive roots beta < alpha.
struct QAnalysis {
    Poly q;
    int positive_root_count = -1;
    double beta = 0.0;
    double alpha = 0.0;
    Poly factor_g;  // Q(u) = (u - beta)(alpha - u) G(u)
};

// Coefficients only; three nonzero entries at degrees 0, 3 and n+1.
QAnalysis build_q(const ModelParams& params);

// Exact positive-root count (0, 1 or 2) from the sign classification:
// rho <= 0 gives one sign change, rho > 0 splits on d vs d_star.
int count_positive_roots(const QAnalysis& qa, const ModelParams& params);

// Bracket beta in (u_pole, u_star) and alpha above u_star, refine by
// bisection plus Newton polish. Requires d > d_star and rho > 0.
std::pair<double, double> isolate_roots(QAnalysis& qa, const ModelParams& params,
                                        const DerivedConstants& dc);

// Two-pass synthetic division by (u - beta) and (u - alpha), negated so
// that G > 0 on [beta, alpha]. Fills qa.factor_g and returns it.
Poly deflate(QAnalysis& qa);

// build_q + count + isolate + deflate for a synthesis-ready level.
QAnalysis analyze(const ModelParams& params);

}  // namespace biconserve
