#include "biconserve/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "biconserve/errors.hpp"
#include "biconserve/quad.hpp"

namespace biconserve {

bool VerificationReport::all_passed() const {
    for (const auto& [name, ok] : passed) {
        if (!ok) return false;
    }
    return !passed.empty();
}

namespace {

constexpr std::size_t kMinSamples = 1000;

void require_samples(const CurveTrace& trace) {
    if (trace.samples.size() < kMinSamples) {
        throw std::invalid_argument("verify: need at least 1000 samples, got " +
                                    std::to_string(trace.samples.size()));
    }
}

// u'' from the phase ODE; the verifier never differentiates sampled data.
double accel(const ModelParams& params, const Poly& q, const Poly& qp, double u) {
    const double p = params.pval();
    return 2.0 * u / (9.0 * p * p) * (2.0 * q(u) + u * qp(u));
}

}  // namespace

void check_curve(const CurveTrace& trace, const VerifyTolerances& tol,
                 VerificationReport& report) {
    require_samples(trace);
    const ModelParams& mp = trace.params;
    const QAnalysis qa = analyze(mp);
    const Poly qp = qa.q.derivative();
    const double p = mp.pval();
    const double omp = mp.one_minus_p();
    const double sqrt_d = std::sqrt(mp.d);
    const double kexp = 0.5 * (mp.n + 1);

    double max_sphere = 0.0, max_speed = 0.0, max_el = 0.0, max_fi = 0.0, max_kappa = 0.0;
    double max_kp = 0.0;
    double min_pole = std::numeric_limits<double>::infinity();

    for (const auto& cs : trace.samples) {
        const double u = cs.u, du = cs.du;

        const double kappa = std::pow(u, kexp);
        max_kappa = std::max(max_kappa,
                             std::abs(kappa - cs.kappa) / std::max(1.0, std::abs(kappa)));

        const double norm2 = cs.x[0] * cs.x[0] + cs.x[1] * cs.x[1] + cs.x[2] * cs.x[2];
        max_sphere = std::max(max_sphere, std::abs(mp.rho * norm2 - 1.0));

        // Unit speed from the analytic tangent: x1' and the rotation part.
        const double x1 = p / (sqrt_d * u * std::sqrt(u));
        const double x1p = -1.5 * p * du / (sqrt_d * u * u * std::sqrt(u));
        const double b2 = 1.0 / mp.rho - x1 * x1;
        if (!(b2 > 0.0)) {
            throw GeometryError("check_curve: parallel radius vanished at s=" +
                                std::to_string(cs.s));
        }
        const double bp = -x1 * x1p / std::sqrt(b2);
        const double psi_p = psi_rate(mp, u);
        const double speed2 = x1p * x1p + bp * bp + b2 * psi_p * psi_p;
        max_speed = std::max(max_speed, std::abs(std::sqrt(speed2) - 1.0));

        // Euler-Lagrange residual with P = kappa^p; in the u variable
        // Pdot = p u^(-3/2), kappa P = u^((2n-1)/2).
        const double upp = accel(mp, qa.q, qp, u);
        const double pdot = p / (u * std::sqrt(u));
        const double pdot_s = -1.5 * p * du / (u * u * std::sqrt(u));
        const double pdot_ss =
            -1.5 * p * (upp - 2.5 * du * du / u) / (u * u * std::sqrt(u));
        const double kappa2 = std::pow(u, mp.n + 1);
        const double kp = std::pow(u, 0.5 * (2 * mp.n - 1));
        const double el = pdot_ss + pdot * (kappa2 + mp.rho) - kp;
        max_el = std::max(max_el, std::abs(el));
        max_kp = std::max(max_kp, kp);

        // First integral of the Euler-Lagrange equation.
        const double kpd_m_p = -omp * std::pow(u, 0.5 * (mp.n - 2));  // kappa Pdot - P
        const double fi = pdot_s * pdot_s + kpd_m_p * kpd_m_p + mp.rho * pdot * pdot - mp.d;
        max_fi = std::max(max_fi, std::abs(fi));

        min_pole = std::min(min_pole, pole_factor(mp, u));
    }

    report.kappa_residual = max_kappa;
    report.sphere_residual = max_sphere;
    report.speed_residual = max_speed;
    report.el_residual = max_el / std::max(1.0, max_kp);
    report.first_integral_residual = max_fi;
    report.pole_margin = min_pole;

    const double pole_bound =
        omp * omp * std::pow(qa.beta, mp.n + 1) * (1.0 - tol.pole_margin);
    report.passed["kappa_consistency"] = max_kappa <= tol.kappa_consistency;
    report.passed["sphere"] = max_sphere <= tol.sphere;
    report.passed["speed"] = report.speed_residual <= tol.speed;
    report.passed["euler_lagrange"] = report.el_residual <= tol.el;
    report.passed["first_integral"] = max_fi <= tol.first_integral_rel * mp.d;
    report.passed["pole_margin"] = min_pole >= pole_bound;
}

void check_hypersurface(const CurveTrace& trace, int n, const VerifyTolerances& tol,
                        VerificationReport& report) {
    require_samples(trace);
    const ModelParams& mp = trace.params;
    if (n != mp.n) {
        throw std::invalid_argument("check_hypersurface: dimension mismatch");
    }
    const QAnalysis qa = analyze(mp);
    const Poly qp = qa.q.derivative();
    const double p = mp.pval();
    const double sqrt_d = std::sqrt(mp.d);

    double max_bc = 0.0;
    bool signs_ok = true;
    double h_min = std::numeric_limits<double>::infinity(), h_max = -h_min;
    double r_min = h_min, r_max = -h_min, r_sum = 0.0;

    for (const auto& cs : trace.samples) {
        const double u = cs.u, du = cs.du;
        const double upp = accel(mp, qa.q, qp, u);
        const double su = std::sqrt(u);
        const double x1 = p / (sqrt_d * u * su);
        const double x1p = -1.5 * p * du / (sqrt_d * u * u * su);
        const double x1pp = -1.5 * p * (upp - 2.5 * du * du / u) / (sqrt_d * u * u * su);

        const double s2 = 1.0 - mp.rho * x1 * x1 - x1p * x1p;
        if (!(s2 > 0.0)) {
            throw GeometryError("check_hypersurface: 1 - rho x1^2 - x1'^2 <= 0 at s=" +
                                std::to_string(cs.s));
        }
        const double root = std::sqrt(s2);
        const double mu = (x1pp + mp.rho * x1) / root;
        const double lambda = -root / x1;

        max_bc = std::max(max_bc, std::abs(3.0 * mu + (n - 2) * lambda) /
                                      (std::abs(mu) + std::abs(lambda)));
        signs_ok = signs_ok && (mu * lambda < 0.0);

        const double h = -2.0 * mu / (n - 1);
        h_min = std::min(h_min, h);
        h_max = std::max(h_max, h);

        const double r = (n - 1) * (n - 2) * mp.rho + 3.0 * mu * mu - (n - 2) * lambda * lambda;
        r_min = std::min(r_min, r);
        r_max = std::max(r_max, r);
        r_sum += r;
    }

    // Finite-difference cross-check of the analytic x1 derivatives at 32
    // random interior samples, guarding against transcription errors in the
    // closed-form expressions. Non-uniform 3-point stencils so ingested
    // traces with irregular s-grids still work.
    std::mt19937 rng(12345u);
    std::uniform_int_distribution<std::size_t> pick(1, trace.samples.size() - 2);
    bool fd_ok = true;
    const auto height = [&](const CurveSample& cs) {
        return p / (sqrt_d * cs.u * std::sqrt(cs.u));
    };
    for (int k = 0; k < 32; ++k) {
        const std::size_t i = pick(rng);
        const auto& sm = trace.samples[i - 1];
        const auto& s0 = trace.samples[i];
        const auto& sp = trace.samples[i + 1];
        const double h1 = s0.s - sm.s, h2 = sp.s - s0.s;
        if (!(h1 > 0.0) || !(h2 > 0.0)) {
            throw std::invalid_argument("check_hypersurface: s-values not strictly increasing");
        }
        const double fm = height(sm), f0 = height(s0), fp = height(sp);
        const double denom = h1 * h2 * (h1 + h2);
        const double fd1 = (fp * h1 * h1 - fm * h2 * h2 + f0 * (h2 * h2 - h1 * h1)) / denom;
        const double fd2 = 2.0 * (h1 * fp + h2 * fm - (h1 + h2) * f0) / denom;

        const double u = s0.u, du = s0.du;
        const double su = std::sqrt(u);
        const double a1 = -1.5 * p * du / (sqrt_d * u * u * su);
        const double a2 = -1.5 * p * (accel(mp, qa.q, qp, u) - 2.5 * du * du / u) /
                          (sqrt_d * u * u * su);
        fd_ok = fd_ok && std::abs(fd1 - a1) <= 1e-3 * std::max(1.0, std::abs(a1)) &&
                std::abs(fd2 - a2) <= 1e-2 * std::max(1.0, std::abs(a2));
    }

    report.biconservative_residual = max_bc;
    report.opposite_principal_signs = signs_ok;
    report.mean_curvature_min = h_min;
    report.mean_curvature_max = h_max;
    const double r_mean = r_sum / static_cast<double>(trace.samples.size());
    report.scalar_curvature_relspread = (r_max - r_min) / std::abs(r_mean);

    report.passed["biconservative"] = max_bc <= tol.biconservative;
    report.passed["principal_signs"] = signs_ok;
    report.passed["mean_curvature_nonconstant"] =
        (h_max - h_min) > 1e-6 * std::max(std::abs(h_max), std::abs(h_min));
    report.passed["curvature_fd_crosscheck"] = fd_ok;
}

namespace {

double orient2d(const std::array<double, 2>& a, const std::array<double, 2>& b,
                const std::array<double, 2>& c) {
    const double detl = (b[0] - a[0]) * (c[1] - a[1]);
    const double detr = (b[1] - a[1]) * (c[0] - a[0]);
    const double det = detl - detr;
    if (std::abs(det) > 3.331e-16 * (std::abs(detl) + std::abs(detr))) return det;
    const long double l = static_cast<long double>(b[0] - a[0]) * (c[1] - a[1]) -
                          static_cast<long double>(b[1] - a[1]) * (c[0] - a[0]);
    return static_cast<double>(l);
}

}  // namespace

int count_self_intersections(std::span<const std::array<double, 2>> pts, bool closed,
                             double tangential_threshold) {
    const std::size_t npts = pts.size();
    if (npts < 3) return 0;
    const std::size_t nseg = closed ? npts : npts - 1;

    const auto point = [&](std::size_t i) -> const std::array<double, 2>& {
        return pts[i % npts];
    };

    int count = 0;
    for (std::size_t i = 0; i + 1 < nseg; ++i) {
        const auto& a = point(i);
        const auto& b = point(i + 1);
        const double ilox = std::min(a[0], b[0]), ihix = std::max(a[0], b[0]);
        const double iloy = std::min(a[1], b[1]), ihiy = std::max(a[1], b[1]);
        for (std::size_t j = i + 2; j < nseg; ++j) {
            if (closed && i == 0 && j == nseg - 1) continue;  // wrap adjacency
            const auto& c = point(j);
            const auto& d = point(j + 1);
            if (std::max(c[0], d[0]) < ilox || std::min(c[0], d[0]) > ihix ||
                std::max(c[1], d[1]) < iloy || std::min(c[1], d[1]) > ihiy) {
                continue;
            }
            const double o1 = orient2d(a, b, c);
            const double o2 = orient2d(a, b, d);
            const double o3 = orient2d(c, d, a);
            const double o4 = orient2d(c, d, b);
            if (!((o1 > 0.0) != (o2 > 0.0) && (o3 > 0.0) != (o4 > 0.0))) continue;
            if (o1 == 0.0 || o2 == 0.0 || o3 == 0.0 || o4 == 0.0) continue;

            // Deduplicate near-tangential pairs.
            const double e1x = b[0] - a[0], e1y = b[1] - a[1];
            const double e2x = d[0] - c[0], e2y = d[1] - c[1];
            const double cross = e1x * e2y - e1y * e2x;
            const double lens = std::hypot(e1x, e1y) * std::hypot(e2x, e2y);
            if (lens == 0.0 || std::abs(cross) < tangential_threshold * lens) continue;
            ++count;
        }
    }
    return count;
}

void check_closure_and_topology(const CurveTrace& trace, const VerifyTolerances& tol,
                                VerificationReport& report) {
    require_samples(trace);
    const auto& first = trace.samples.front();
    const auto& last = trace.samples.back();
    report.closure_gap = std::sqrt((last.x[0] - first.x[0]) * (last.x[0] - first.x[0]) +
                                   (last.x[1] - first.x[1]) * (last.x[1] - first.x[1]) +
                                   (last.x[2] - first.x[2]) * (last.x[2] - first.x[2]));

    const double dpsi = last.psi - first.psi;
    report.winding = static_cast<int>(std::lround(dpsi / (2.0 * std::numbers::pi)));

    // Curvature maxima: one at s = 0 plus interior sign changes of u'.
    int lobes = 1;
    for (std::size_t i = 1; i + 1 < trace.samples.size(); ++i) {
        if (trace.samples[i - 1].du > 0.0 && trace.samples[i].du <= 0.0) ++lobes;
    }
    report.lobes = lobes;

    std::vector<std::array<double, 2>> proj;
    const bool closed = trace.target.has_value();
    const std::size_t nout = closed ? trace.samples.size() - 1 : trace.samples.size();
    proj.reserve(nout);
    for (std::size_t i = 0; i < nout; ++i) {
        proj.push_back({trace.samples[i].x[1], trace.samples[i].x[2]});
    }
    report.self_intersections = count_self_intersections(proj, closed, tol.tangential_dedup);

    if (trace.target) {
        report.winding_angle_error =
            std::abs(dpsi - 2.0 * std::numbers::pi * trace.target->l);
        report.passed["closure_gap"] =
            report.closure_gap <= tol.closure_gap / std::sqrt(trace.params.rho);
        report.passed["winding"] = report.winding == trace.target->l &&
                                   report.winding_angle_error <= tol.winding_angle;
        report.passed["lobes"] = report.lobes == trace.target->r;
        report.passed["self_intersections"] = report.self_intersections >= 1;
    }
}

VerificationReport verify_trace(const CurveTrace& trace, const VerifyTolerances& tol) {
    VerificationReport report;
    check_curve(trace, tol, report);
    check_hypersurface(trace, trace.params.n, tol, report);
    check_closure_and_topology(trace, tol, report);
    return report;
}

bool no_periodic_orbit(int n, double d, double rho) {
    const ModelParams mp = ModelParams::make(n, rho, d);
    const QAnalysis qa = build_q(mp);
    return count_positive_roots(qa, mp) == 1;
}

}  // namespace biconserve
