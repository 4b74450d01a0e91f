#pragma once

#include <numeric>
#include <string>

namespace biconserve {

// Exact rational exponent p = (n-2)/(n+1), stored reduced.
struct Rational {
    long num = 0;
    long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    // 1 - p, again exact.
    Rational complement() const { return Rational{den - num, den}.reduced(); }
    Rational reduced() const {
        long g = std::gcd(num, den);
        return g > 1 ? Rational{num / g, den / g} : *this;
    }
    bool operator==(const Rational&) const = default;
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

// p = (n-2)/(n+1). Throws std::invalid_argument for n < 3.
Rational exponent_for_dimension(int n);

// Critical level d_* = rho^p p^p (1-p)^(1-p); below it the phase polynomial
// has no positive root pair and no periodic curvature exists. Only defined
// on the sphere: throws std::domain_error for rho <= 0.
double critical_level(const Rational& p, double rho);

struct ModelParams {
    int n = 0;        // ambient dimension, n >= 3
    double rho = 1.0; // sectional curvature of the ambient space form
    double d = 1.0;   // first-integral level, > 0
    Rational p;       // (n-2)/(n+1)

    static ModelParams make(int n, double rho, double d);

    double pval() const { return p.value(); }
    double one_minus_p() const { return p.complement().value(); }
    int q_degree() const { return n + 1; }
};

struct DerivedConstants {
    double d_star = 0.0;         // critical level
    double u_star = 0.0;         // location of Q's unique positive maximum
    double u_pole = 0.0;         // real root of d u^3 - rho p^2
    double kappa_exponent = 0.0; // kappa = u^((n+1)/2)

    // Requires rho > 0; throws std::domain_error otherwise.
    static DerivedConstants from(const ModelParams& params);
};

}  // namespace biconserve
