#include "biconserve/params.hpp"

#include <cmath>
#include <stdexcept>

namespace biconserve {

Rational exponent_for_dimension(int n) {
    if (n < 3) {
        throw std::invalid_argument("exponent_for_dimension: dimension must satisfy n >= 3, got " +
                                    std::to_string(n));
    }
    return Rational{n - 2, n + 1}.reduced();
}

double critical_level(const Rational& p, double rho) {
    const double pv = p.value();
    if (!(pv > 0.0 && pv < 1.0)) {
        throw std::invalid_argument("critical_level: exponent must satisfy 0 < p < 1");
    }
    if (!(rho > 0.0)) {
        throw std::domain_error("critical_level: d_star is only defined on the sphere (rho > 0)");
    }
    const double omp = p.complement().value();
    return std::pow(rho, pv) * std::pow(pv, pv) * std::pow(omp, omp);
}

ModelParams ModelParams::make(int n, double rho, double d) {
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw std::invalid_argument("ModelParams: level d must be positive and finite");
    }
    if (!std::isfinite(rho)) {
        throw std::invalid_argument("ModelParams: rho must be finite");
    }
    ModelParams mp;
    mp.n = n;
    mp.rho = rho;
    mp.d = d;
    mp.p = exponent_for_dimension(n);  // validates n
    return mp;
}

DerivedConstants DerivedConstants::from(const ModelParams& params) {
    if (!(params.rho > 0.0)) {
        throw std::domain_error("DerivedConstants: requires rho > 0");
    }
    DerivedConstants dc;
    dc.d_star = critical_level(params.p, params.rho);
    // Q'(u_*) = 0 reduces to u_*^(n-2) = d/(1-p) = d (n+1)/3.
    dc.u_star = std::pow(params.d * (params.n + 1) / 3.0, 1.0 / (params.n - 2));
    const double p = params.pval();
    dc.u_pole = std::cbrt(params.rho * p * p / params.d);
    dc.kappa_exponent = 0.5 * (params.n + 1);
    return dc;
}

}  // namespace biconserve
