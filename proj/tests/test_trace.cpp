#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "biconserve/dop853.hpp"
#include "biconserve/errors.hpp"
#include "biconserve/quad.hpp"
#include "biconserve/trace.hpp"

using namespace biconserve;

namespace {

struct ExpRhs {
    void operator()(double, const std::array<double, 1>& y, std::array<double, 1>& dy) const {
        dy[0] = y[0];
    }
};

struct OscRhs {
    void operator()(double, const std::array<double, 2>& y, std::array<double, 2>& dy) const {
        dy[0] = y[1];
        dy[1] = -y[0];
    }
};

}  // namespace

TEST_CASE("dop853 integrates y' = y with dense output") {
    Dop853<1, ExpRhs> solver{ExpRhs{}};
    double worst = 0.0;
    const auto y_end = solver.integrate(0.0, {1.0}, 1.0,
                                        [&](const DenseStep<1>& ds, const std::array<double, 1>&) {
                                            for (int j = 1; j < 8; ++j) {
                                                const double t = ds.t0 + ds.span() * j / 8.0;
                                                const double err =
                                                    std::abs(ds.eval(t)[0] - std::exp(t));
                                                worst = std::max(worst, err);
                                            }
                                            return true;
                                        });
    CHECK(std::abs(y_end[0] - std::numbers::e) <= 1e-12);
    CHECK(worst <= 1e-11);
}

TEST_CASE("dop853 harmonic oscillator round trip") {
    Dop853<2, OscRhs> solver{OscRhs{}};
    double worst = 0.0;
    const double t1 = 4.0 * std::numbers::pi;
    const auto y = solver.integrate(0.0, {1.0, 0.0}, t1,
                                    [&](const DenseStep<2>& ds, const std::array<double, 2>&) {
                                        for (int j = 1; j < 6; ++j) {
                                            const double t = ds.t0 + ds.span() * j / 6.0;
                                            const auto v = ds.eval(t);
                                            worst = std::max(
                                                {worst, std::abs(v[0] - std::cos(t)),
                                                 std::abs(v[1] + std::sin(t))});
                                        }
                                        return true;
                                    });
    CHECK(std::abs(y[0] - 1.0) <= 1e-11);
    CHECK(std::abs(y[1]) <= 1e-11);
    CHECK(worst <= 1e-10);
}

TEST_CASE("phase orbit returns to (alpha, 0) after one quadrature period") {
    const ModelParams mp = ModelParams::make(5, 1.0, 1.0);
    const QAnalysis qa = analyze(mp);
    const double rho_period = period(mp, qa);

    TraceConfig cfg;
    cfg.points = 2049;  // odd, so the grid is symmetric about the half period
    const PhasePath path = integrate_phase(mp, qa, rho_period, cfg);
    REQUIRE(path.samples.size() == 2049);

    CHECK(std::abs(path.samples.back().u - qa.alpha) <= 1e-8);
    CHECK(std::abs(path.samples.back().du) <= 1e-8);
    CHECK(path.max_first_integral_residual <= 1e-10);

    // Motion starts inward from the maximum.
    CHECK(phase_acceleration(mp, qa, qa.alpha) < 0.0);
    CHECK(path.samples[1].u < qa.alpha);

    // Reversal symmetry u(period - s) = u(s).
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
        const auto& mirror = path.samples[path.samples.size() - 1 - i];
        CHECK(std::abs(path.samples[i].u - mirror.u) <= 1e-8);
    }

    // The orbit stays inside [beta, alpha].
    for (const auto& ps : path.samples) {
        CHECK(ps.u >= qa.beta - 1e-9);
        CHECK(ps.u <= qa.alpha + 1e-9);
    }
}

TEST_CASE("tightening the ODE tolerance reduces first-integral drift") {
    const ModelParams mp = ModelParams::make(4, 1.0, 1.5);
    const QAnalysis qa = analyze(mp);
    const double duration = 2.0 * period(mp, qa);

    TraceConfig loose;
    loose.ode_tol = 1e-8;
    loose.ode_atol = 1e-10;
    loose.drift_tol = 1e-2;
    TraceConfig tight;

    const double drift_loose = integrate_phase(mp, qa, duration, loose).max_first_integral_residual;
    const double drift_tight = integrate_phase(mp, qa, duration, tight).max_first_integral_residual;
    CHECK(drift_tight <= drift_loose);
    CHECK(drift_loose > 0.0);
}

TEST_CASE("ODE return period matches the quadrature period") {
    for (int n : {3, 5, 8}) {
        for (double d_mult : {1.5, 4.0}) {
            const double d_star = critical_level(exponent_for_dimension(n), 1.0);
            const ModelParams mp = ModelParams::make(n, 1.0, d_star * d_mult);
            const QAnalysis qa = analyze(mp);
            const double quad_period = period(mp, qa);
            const double ode_period = ode_return_period(mp, qa);
            CHECK(std::abs(ode_period - quad_period) <= 1e-8 * quad_period);
        }
    }
}

TEST_CASE("synthesized curve: sphere identity, unit speed, parallel bounds") {
    const ModelParams mp = ModelParams::make(3, 2.0, 2.0);
    const QAnalysis qa = analyze(mp);
    TraceConfig cfg;
    cfg.points = 4096;
    const double rho_period = period(mp, qa);
    const CurveTrace trace = synthesize_curve(integrate_phase(mp, qa, rho_period, cfg), mp);

    const double p = mp.pval();
    const double x1_min = p / (std::sqrt(mp.d) * std::pow(qa.alpha, 1.5));
    const double x1_max = p / (std::sqrt(mp.d) * std::pow(qa.beta, 1.5));
    for (const auto& cs : trace.samples) {
        const double norm2 = cs.x[0] * cs.x[0] + cs.x[1] * cs.x[1] + cs.x[2] * cs.x[2];
        CHECK(std::abs(mp.rho * norm2 - 1.0) <= 1e-14);
        CHECK(cs.x[0] >= x1_min - 1e-10);
        CHECK(cs.x[0] <= x1_max + 1e-10);
        // Pole-avoidance invariant: d u^3 - rho p^2 bounded below by its
        // value at u = beta, which equals (1-p)^2 beta^(n+1) since Q(beta)=0.
        const double floor = mp.one_minus_p() * mp.one_minus_p() *
                             std::pow(qa.beta, mp.n + 1) * (1.0 - 1e-6);
        CHECK(pole_factor(mp, cs.u) >= floor);
    }

    // Unit speed by 5-point central differences on the uniform s-grid.
    const double h = trace.samples[1].s - trace.samples[0].s;
    for (std::size_t i = 2; i + 2 < trace.samples.size(); i += 7) {
        double speed2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double der = (trace.samples[i - 2].x[c] - 8.0 * trace.samples[i - 1].x[c] +
                                8.0 * trace.samples[i + 1].x[c] - trace.samples[i + 2].x[c]) /
                               (12.0 * h);
            speed2 += der * der;
        }
        CHECK(std::abs(std::sqrt(speed2) - 1.0) <= 1e-8);
    }

    // x1'(s) = 0 exactly where u' = 0: endpoints are curvature maxima.
    CHECK(std::abs(trace.samples.front().du) <= 1e-12);
}

TEST_CASE("limit-regime levels are refused") {
    const ModelParams mp = ModelParams::make(5, 1.0, 1.0);
    const DerivedConstants dc = DerivedConstants::from(mp);
    QAnalysis qa = analyze(mp);
    qa.beta = dc.u_star * (1.0 - 1e-8);
    qa.alpha = dc.u_star * (1.0 + 1e-8);
    CHECK_THROWS_AS(integrate_phase(mp, qa, 1.0, {}), NumericalError);
}

TEST_CASE("assemble_closed: winding angle and monotone psi") {
    const ClosureSolution sol = solve_level({2, 3}, 5, 1.0);
    const CurveTrace trace = assemble_closed(sol);
    REQUIRE(trace.target.has_value());
    CHECK(trace.closure_gap <= 1e-6);
    CHECK(std::abs(trace.samples.back().psi - 4.0 * std::numbers::pi) <= 1e-6);
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        CHECK(trace.samples[i].psi > trace.samples[i - 1].psi);
    }
}

TEST_CASE("argument validation") {
    const ModelParams mp = ModelParams::make(5, 1.0, 1.0);
    const QAnalysis qa = analyze(mp);
    TraceConfig cfg;
    cfg.points = 8;
    CHECK_THROWS_AS(integrate_phase(mp, qa, 1.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(integrate_phase(mp, qa, -1.0, {}), std::invalid_argument);
}
