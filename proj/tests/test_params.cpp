#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "biconserve/params.hpp"
#include "biconserve/polyq.hpp"

using namespace biconserve;

TEST_CASE("exponent p = (n-2)/(n+1)") {
    CHECK(exponent_for_dimension(3) == Rational{1, 4});
    CHECK(exponent_for_dimension(5) == Rational{1, 2});
    CHECK(exponent_for_dimension(7) == Rational{5, 8});
    CHECK(exponent_for_dimension(11) == Rational{3, 4});

    double prev = 0.0;
    for (int n = 3; n <= 50; ++n) {
        const double p = exponent_for_dimension(n).value();
        CHECK(p > prev);
        CHECK(p < 1.0);
        prev = p;
    }
    CHECK_THROWS_AS(exponent_for_dimension(2), std::invalid_argument);
    CHECK_THROWS_AS(exponent_for_dimension(0), std::invalid_argument);
}

TEST_CASE("Rational complement is exact") {
    const Rational p = exponent_for_dimension(7);  // 5/8
    CHECK(p.complement() == Rational{3, 8});
    CHECK(exponent_for_dimension(5).complement() == Rational{1, 2});
    CHECK(exponent_for_dimension(3).str() == "1/4");
}

TEST_CASE("critical level d_star") {
    CHECK(critical_level(Rational{1, 2}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    // High-precision oracle for p = 1/4: (1/4)^(1/4) (3/4)^(3/4).
    CHECK(critical_level(Rational{1, 4}, 1.0) ==
          doctest::Approx(0.569876764238694).epsilon(1e-12));
    CHECK(critical_level(Rational{1, 2}, 4.0) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(critical_level(Rational{1, 2}, 0.0), std::domain_error);
    CHECK_THROWS_AS(critical_level(Rational{1, 2}, -1.0), std::domain_error);
}

TEST_CASE("d_star scaling law: d_star(rho) = rho^p d_star(1)") {
    for (const Rational& p : {Rational{1, 4}, Rational{1, 2}, Rational{5, 8}, Rational{3, 4}}) {
        for (double rho : {0.25, 0.5, 1.0, 2.0, 4.0, 9.0}) {
            const double lhs = critical_level(p, rho);
            const double rhs = std::pow(rho, p.value()) * critical_level(p, 1.0);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
        }
    }
}

TEST_CASE("ModelParams validation") {
    CHECK_THROWS_AS(ModelParams::make(2, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams::make(5, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ModelParams::make(5, 1.0, -1.0), std::invalid_argument);
    const ModelParams mp = ModelParams::make(5, 1.0, 1.0);
    CHECK(mp.pval() == 0.5);
    CHECK(mp.one_minus_p() == 0.5);
    CHECK(mp.q_degree() == 6);
    // rho <= 0 is a valid model (nonexistence regime), just not traceable.
    CHECK_NOTHROW(ModelParams::make(5, -1.0, 1.0));
}

TEST_CASE("u_star is the critical point of Q") {
    for (int n : {3, 4, 5, 8, 10}) {
        for (double d : {0.7, 1.0, 3.0}) {
            for (double rho : {0.5, 1.0, 2.0}) {
                const ModelParams mp = ModelParams::make(n, rho, d);
                const DerivedConstants dc = DerivedConstants::from(mp);
                const QAnalysis qa = build_q(mp);
                const Poly qp = qa.q.derivative();
                // Relative to the scale of Q' terms at u_star.
                const double scale = 3.0 * d * dc.u_star * dc.u_star;
                CHECK(std::abs(qp(dc.u_star)) <= 1e-12 * scale);
            }
        }
    }
    CHECK_THROWS_AS(DerivedConstants::from(ModelParams::make(5, -1.0, 1.0)), std::domain_error);
}
