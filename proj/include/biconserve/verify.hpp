#pragma once

#include <array>
#include <map>
#include <span>
#include <string>

#include "biconserve/trace.hpp"

namespace biconserve {

struct VerifyTolerances {
    double sphere = 1e-8;
    double speed = 1e-8;
    double el = 1e-7;                 // Euler-Lagrange residual, normalized
    double first_integral_rel = 1e-8; // relative to the level d
    double biconservative = 1e-6;     // |3 mu + (n-2) lambda| / (|mu| + |lambda|)
    double kappa_consistency = 1e-12;
    double closure_gap = 1e-6;        // scaled by 1/sqrt(rho)
    double winding_angle = 1e-6;      // |psi(end) - 2 pi l|
    double pole_margin = 1e-6;        // min pole factor vs (1-p)^2 beta^(n+1)
    double tangential_dedup = 1e-9;   // near-parallel crossing threshold
};

struct VerificationReport {
    double sphere_residual = 0.0;
    double speed_residual = 0.0;
    double el_residual = 0.0;
    double first_integral_residual = 0.0;  // absolute, compare against rel * d
    double kappa_residual = 0.0;
    double biconservative_residual = 0.0;
    double mean_curvature_min = 0.0;
    double mean_curvature_max = 0.0;
    double scalar_curvature_relspread = 0.0;
    double closure_gap = 0.0;
    double winding_angle_error = 0.0;
    double pole_margin = 0.0;
    int winding = 0;
    int lobes = 0;
    int self_intersections = 0;
    bool opposite_principal_signs = false;

    std::map<std::string, bool> passed;
    bool all_passed() const;
};

// Curve-level certificates: sphere constraint, unit speed, Euler-Lagrange
// residual and first-integral residual, all from analytic u-derivatives
// (u'' via the phase ODE). Requires >= 1000 samples.
void check_curve(const CurveTrace& trace, const VerifyTolerances& tol, VerificationReport& report);

// Hypersurface-level certificates: principal curvatures mu, lambda from
// the profile height x1 and its analytic derivatives, the biconservative
// relation 3 mu + (n-2) lambda = 0, the mean-curvature range and the
// scalar-curvature spread.
void check_hypersurface(const CurveTrace& trace, int n, const VerifyTolerances& tol,
                        VerificationReport& report);

// Closure gap, winding and lobe counts, and the self-intersection count of
// the projection to the (x2, x3) plane (a bijection on the open
// half-sphere x1 > 0, so projected crossings are curve crossings).
void check_closure_and_topology(const CurveTrace& trace, const VerifyTolerances& tol,
                                VerificationReport& report);

// Full certification; topology checks run only when the trace carries a
// closure target.
VerificationReport verify_trace(const CurveTrace& trace, const VerifyTolerances& tol = {});

// Nonexistence on flat and hyperbolic backgrounds: for rho <= 0 the phase
// polynomial has a single positive root, so no periodic curvature orbit.
bool no_periodic_orbit(int n, double d, double rho);

// Proper self-intersection count of a polyline via segment-pair sweep with
// filtered orientation predicates. When closed, the last point connects
// back to the first.
int count_self_intersections(std::span<const std::array<double, 2>> pts, bool closed,
                             double tangential_threshold = 1e-9);

}  // namespace biconserve
