#pragma once

#include <array>
#include <optional>
#include <vector>

#include "biconserve/closure.hpp"
#include "biconserve/params.hpp"
#include "biconserve/polyq.hpp"

namespace biconserve {

struct TraceConfig {
    double ode_tol = 1e-12;    // relative local tolerance
    double ode_atol = 1e-14;
    double drift_tol = 1e-8;   // first-integral conservation bound (relative)
    double closure_tol = 1e-6; // closure-gap bound, scaled by 1/sqrt(rho)
    int points = 2048;         // output samples, >= 16
};

struct PhasePoint {
    double s = 0.0;
    double u = 0.0;
    double du = 0.0;
    double psi = 0.0;
};

struct PhasePath {
    std::vector<PhasePoint> samples;
    double max_first_integral_residual = 0.0;  // of u'^2 - (4u^2/9p^2) Q(u)
};

// Right-hand sides of the phase dynamics. u'' is the derivative of the
// first-integral relation, polynomial in u and regular at the turning
// points; psi' is the angular speed of the parametrization.
double phase_acceleration(const ModelParams& params, const QAnalysis& qa, double u);
double psi_rate(const ModelParams& params, double u);

// Integrate (u, u', psi) from u(0) = alpha, u'(0) = 0, psi(0) = 0 over
// [0, duration], resampled to cfg.points uniform s-values by dense-output
// interpolation. The first integral is monitored, not enforced; drift
// beyond cfg.drift_tol raises DriftError. Levels with
// (alpha-beta)/u_star < 1e-6 are refused (NumericalError).
PhasePath integrate_phase(const ModelParams& params, const QAnalysis& qa, double duration,
                          const TraceConfig& cfg = {});

// Return time of the phase orbit to u = alpha, u' = 0, located from the
// second transversal zero of u' via dense-output bisection. Independent
// cross-check of the quadrature period.
double ode_return_period(const ModelParams& params, const QAnalysis& qa,
                         const TraceConfig& cfg = {});

struct CurveSample {
    double s = 0.0;
    double u = 0.0;
    double du = 0.0;
    double kappa = 0.0;
    double psi = 0.0;
    std::array<double, 3> x{};  // point on the sphere of radius 1/sqrt(rho)
};

struct CurveTrace {
    ModelParams params;
    std::optional<ClosureTarget> target;
    double period = 0.0;            // curvature period
    double closure_integral = 0.0;  // I(d)
    double closure_gap = 0.0;       // |x(end) - x(0)|
    std::vector<CurveSample> samples;
};

// Map phase samples onto the sphere:
// x = (1/sqrt(rho d u^3)) (sqrt(rho) p, w sin psi, w cos psi) with
// w = sqrt(d u^3 - rho p^2), and kappa = u^((n+1)/2).
CurveTrace synthesize_curve(const PhasePath& path, const ModelParams& params);

// Closed curve over r curvature periods at the solved level. Throws
// ClosureError when the endpoint gap exceeds cfg.closure_tol / sqrt(rho).
CurveTrace assemble_closed(const ClosureSolution& solution, const TraceConfig& cfg = {});

// Open sub-trace over a single curvature period at an explicit level d.
CurveTrace trace_one_period(const ModelParams& params, const TraceConfig& cfg = {});

}  // namespace biconserve
