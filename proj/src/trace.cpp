#include "biconserve/trace.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "biconserve/dop853.hpp"
#include "biconserve/errors.hpp"
#include "biconserve/quad.hpp"

namespace biconserve {

double phase_acceleration(const ModelParams& params, const QAnalysis& qa, double u) {
    const double p = params.pval();
    // u'' = (2u/(9p^2)) (2Q(u) + u Q'(u))
    const Poly qp = qa.q.derivative();
    return 2.0 * u / (9.0 * p * p) * (2.0 * qa.q(u) + u * qp(u));
}

double psi_rate(const ModelParams& params, double u) {
    const double expo = 0.5 * (params.n + 4);
    return params.one_minus_p() * std::sqrt(params.rho * params.d) * std::pow(u, expo) /
           pole_factor(params, u);
}

namespace {

struct PhaseRhs {
    const ModelParams* params;
    const Poly* q;
    const Poly* qp;
    double inv9p2;

    void operator()(double /*s*/, const std::array<double, 3>& y,
                    std::array<double, 3>& dy) const {
        const double u = y[0];
        dy[0] = y[1];
        dy[1] = 2.0 * u * inv9p2 * (2.0 * (*q)(u) + u * (*qp)(u));
        dy[2] = psi_rate(*params, u);
    }
};

PhaseRhs make_rhs(const ModelParams& params, const Poly& q, const Poly& qp) {
    const double p = params.pval();
    return PhaseRhs{&params, &q, &qp, 1.0 / (9.0 * p * p)};
}

// Scale of u'^2 on the orbit, for relative drift monitoring.
double first_integral_scale(const ModelParams& params, const QAnalysis& qa,
                            const DerivedConstants& dc) {
    const double p = params.pval();
    const double v2 = 4.0 * dc.u_star * dc.u_star / (9.0 * p * p) * qa.q(dc.u_star);
    return std::max(v2, 1e-30);
}

double first_integral_residual(const ModelParams& params, const QAnalysis& qa, double u,
                               double du) {
    const double p = params.pval();
    return du * du - 4.0 * u * u / (9.0 * p * p) * qa.q(u);
}

void check_traceable(const ModelParams& /*params*/, const QAnalysis& qa,
                     const DerivedConstants& dc) {
    if (qa.positive_root_count != 2 || !(qa.alpha > qa.beta)) {
        throw std::invalid_argument("trace: analysis has no isolated root pair");
    }
    if (limit_regime(qa, dc)) {
        throw NumericalError(
            "trace: level too close to d_star ((alpha-beta)/u_star < 1e-6); the "
            "small-amplitude orbit is dominated by round-off");
    }
}

}  // namespace

PhasePath integrate_phase(const ModelParams& params, const QAnalysis& qa, double duration,
                          const TraceConfig& cfg) {
    if (cfg.points < 16) throw std::invalid_argument("integrate_phase: points must be >= 16");
    if (!(duration > 0.0)) throw std::invalid_argument("integrate_phase: duration must be > 0");
    const DerivedConstants dc = DerivedConstants::from(params);
    check_traceable(params, qa, dc);

    const Poly qp = qa.q.derivative();
    auto rhs = make_rhs(params, qa.q, qp);
    Dop853<3, PhaseRhs> solver(rhs, {cfg.ode_tol, cfg.ode_atol});

    const double fi_scale = first_integral_scale(params, qa, dc);
    PhasePath path;
    path.samples.reserve(cfg.points);
    const double ds_out = duration / (cfg.points - 1);
    int next = 0;

    const std::array<double, 3> y0{qa.alpha, 0.0, 0.0};
    path.samples.push_back({0.0, qa.alpha, 0.0, 0.0});
    ++next;

    solver.integrate(0.0, y0, duration, [&](const DenseStep<3>& step,
                                            const std::array<double, 3>& y_end) {
        const double fi = std::abs(first_integral_residual(params, qa, y_end[0], y_end[1]));
        path.max_first_integral_residual = std::max(path.max_first_integral_residual, fi);
        if (fi > cfg.drift_tol * fi_scale) {
            throw DriftError("integrate_phase: first-integral drift " + std::to_string(fi) +
                             " exceeds bound at s=" + std::to_string(step.t1));
        }
        while (next < cfg.points) {
            const double s = (next == cfg.points - 1) ? duration : next * ds_out;
            if (s > step.t1 + 1e-12 * duration) break;
            const auto y = step.eval(std::min(s, step.t1));
            path.samples.push_back({s, y[0], y[1], y[2]});
            ++next;
        }
        return true;
    });

    if (next != cfg.points) {
        throw IntegrationError("integrate_phase: resampling incomplete (" + std::to_string(next) +
                               " of " + std::to_string(cfg.points) + ")");
    }
    return path;
}

double ode_return_period(const ModelParams& params, const QAnalysis& qa, const TraceConfig& cfg) {
    const DerivedConstants dc = DerivedConstants::from(params);
    check_traceable(params, qa, dc);

    const Poly qp = qa.q.derivative();
    auto rhs = make_rhs(params, qa.q, qp);
    Dop853<3, PhaseRhs> solver(rhs, {cfg.ode_tol, cfg.ode_atol});

    // Upper bound for the search window only; the zero itself is located
    // from the ODE path.
    const double horizon = 3.0 * period(params, qa);

    int crossings = 0;
    double found = -1.0;
    double prev_sign = -1.0;  // motion starts inward from the maximum
    solver.integrate(0.0, {qa.alpha, 0.0, 0.0}, horizon,
                     [&](const DenseStep<3>& step, const std::array<double, 3>& y_end) {
                         const double sign = y_end[1] < 0.0 ? -1.0 : 1.0;
                         if (step.t0 > 0.0 && sign != prev_sign) {
                             double lo = step.t0, hi = step.t1;
                             for (int it = 0; it < 120; ++it) {
                                 const double mid = 0.5 * (lo + hi);
                                 const double v = step.eval(mid)[1];
                                 if ((v < 0.0 ? -1.0 : 1.0) == prev_sign) {
                                     lo = mid;
                                 } else {
                                     hi = mid;
                                 }
                             }
                             ++crossings;
                             if (crossings == 2) {
                                 found = 0.5 * (lo + hi);
                                 return false;
                             }
                         }
                         prev_sign = sign;
                         return true;
                     });
    if (found < 0.0) {
        throw IntegrationError("ode_return_period: orbit did not return within the horizon");
    }
    return found;
}

CurveTrace synthesize_curve(const PhasePath& path, const ModelParams& params) {
    const double p = params.pval();
    const double sqrt_d = std::sqrt(params.d);
    const double kexp = 0.5 * (params.n + 1);

    CurveTrace trace;
    trace.params = params;
    trace.samples.reserve(path.samples.size());
    for (const auto& ps : path.samples) {
        const double w2 = pole_factor(params, ps.u);
        if (!(w2 > 0.0)) {
            throw GeometryError("synthesize_curve: pole condition d u^3 - rho p^2 > 0 violated "
                                "at s=" + std::to_string(ps.s));
        }
        const double inv_norm = 1.0 / std::sqrt(params.rho * params.d * ps.u * ps.u * ps.u);
        const double w = std::sqrt(w2);
        CurveSample cs;
        cs.s = ps.s;
        cs.u = ps.u;
        cs.du = ps.du;
        cs.psi = ps.psi;
        cs.kappa = std::pow(ps.u, kexp);
        cs.x = {p / (sqrt_d * ps.u * std::sqrt(ps.u)),
                inv_norm * w * std::sin(ps.psi),
                inv_norm * w * std::cos(ps.psi)};
        trace.samples.push_back(cs);
    }
    return trace;
}

namespace {

double endpoint_gap(const CurveTrace& trace) {
    const auto& a = trace.samples.front().x;
    const auto& b = trace.samples.back().x;
    return std::sqrt((b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]) +
                     (b[2] - a[2]) * (b[2] - a[2]));
}

}  // namespace

CurveTrace assemble_closed(const ClosureSolution& solution, const TraceConfig& cfg) {
    const double duration = solution.target.r * solution.period;
    const PhasePath path = integrate_phase(solution.params, solution.analysis, duration, cfg);
    CurveTrace trace = synthesize_curve(path, solution.params);
    trace.target = solution.target;
    trace.period = solution.period;
    trace.closure_integral = solution.i_value;
    trace.closure_gap = endpoint_gap(trace);

    const double gap_bound = cfg.closure_tol / std::sqrt(solution.params.rho);
    if (trace.closure_gap > gap_bound) {
        throw ClosureError("assemble_closed: closure gap " + std::to_string(trace.closure_gap) +
                           " exceeds " + std::to_string(gap_bound) + " (psi(end)=" +
                           std::to_string(trace.samples.back().psi) + ", target " +
                           std::to_string(2.0 * std::numbers::pi * solution.target.l) + ")");
    }
    return trace;
}

CurveTrace trace_one_period(const ModelParams& params, const TraceConfig& cfg) {
    const QAnalysis qa = analyze(params);
    const double rho_period = period(params, qa);
    const PhasePath path = integrate_phase(params, qa, rho_period, cfg);
    CurveTrace trace = synthesize_curve(path, params);
    trace.period = rho_period;
    trace.closure_integral = closure_integral(params, qa);
    trace.closure_gap = endpoint_gap(trace);
    return trace;
}

}  // namespace biconserve
