// Command-line surface for the biconserve pipeline:
//   enumerate  admissible winding/lobe pairs (l, r)
//   sweep      closure integral I(d) over a level range, as CSV
//   solve      the level d with I(d) = 2 pi l / r
//   trace      integrate the profile curve and write Curve JSON
//   verify     re-derive every certificate from a Curve JSON file
//
// Exit codes: 0 success / all checks passed, 1 verification failure,
// 2 bad arguments or domain errors, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "biconserve/closure.hpp"
#include "biconserve/errors.hpp"
#include "biconserve/io.hpp"
#include "biconserve/quad.hpp"
#include "biconserve/trace.hpp"
#include "biconserve/verify.hpp"

namespace {

using namespace biconserve;

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int cmd_enumerate(int max_r) {
    const auto targets = enumerate_targets(max_r);
    std::cout << "l,r,angle\n";
    for (const auto& t : targets) {
        std::cout << t.l << "," << t.r << "," << g17(t.angle()) << "\n";
    }
    return 0;
}

int cmd_sweep(int n, double rho, double d_min, double d_max, int steps, bool log_grid,
              const std::string& out_path, const ToleranceSettings& tol) {
    if (steps < 2) throw std::invalid_argument("sweep: --steps must be >= 2");
    if (!(d_max > d_min)) throw std::invalid_argument("sweep: need --d-max > --d-min");
    const double d_star = critical_level(exponent_for_dimension(n), rho);
    if (!(d_min > d_star)) {
        throw std::invalid_argument("sweep: --d-min must exceed the critical level d_star = " +
                                    g17(d_star));
    }

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::invalid_argument("cannot open output file: " + out_path);
    }
    std::ostream& out = out_path.empty() ? std::cout : file;

    out << "d,I,period,alpha,beta,regime\n";
    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / (steps - 1);
        const double d = log_grid ? d_min * std::pow(d_max / d_min, t)
                                  : d_min + t * (d_max - d_min);
        const ModelParams mp = ModelParams::make(n, rho, d);
        const QAnalysis qa = analyze(mp);
        const DerivedConstants dc = DerivedConstants::from(mp);
        out << g17(d) << "," << g17(closure_integral(mp, qa, tol.quad)) << ","
            << g17(period(mp, qa, tol.quad)) << "," << g17(qa.alpha) << "," << g17(qa.beta)
            << "," << (limit_regime(qa, dc) ? "limit" : "regular") << "\n";
    }
    return 0;
}

ClosureSolution solve_checked(int n, double rho, int l, int r, const ToleranceSettings& tol) {
    if (!admissible_target(l, r)) {
        throw std::invalid_argument("(l, r) = (" + std::to_string(l) + ", " + std::to_string(r) +
                                    ") is not admissible: need gcd(l,r)=1 and r < 2l < sqrt(2) r");
    }
    return solve_level(ClosureTarget{l, r}, n, rho, tol.solver);
}

int cmd_solve(int n, double rho, int l, int r, const ToleranceSettings& tol) {
    const ClosureSolution sol = solve_checked(n, rho, l, r, tol);
    std::cout << "d = " << g17(sol.d_solved) << "\n"
              << "I = " << g17(sol.i_value) << "\n"
              << "period = " << g17(sol.period) << "\n"
              << "alpha = " << g17(sol.analysis.alpha) << "\n"
              << "beta = " << g17(sol.analysis.beta) << "\n";
    return 0;
}

int cmd_trace(int n, double rho, std::optional<int> l, std::optional<int> r,
              std::optional<double> d, int points, const std::string& out_path,
              const ToleranceSettings& tol) {
    TraceConfig cfg = tol.trace;
    cfg.points = points;
    CurveTrace trace;
    if (d) {
        if (l || r) {
            throw std::invalid_argument("trace: give either --d or --l/--r, not both");
        }
        trace = trace_one_period(ModelParams::make(n, rho, *d), cfg);
    } else {
        if (!l || !r) throw std::invalid_argument("trace: need --l and --r (or an explicit --d)");
        trace = assemble_closed(solve_checked(n, rho, *l, *r, tol), cfg);
    }
    write_curve(out_path, trace);
    std::cout << "wrote " << out_path << " (" << trace.samples.size() << " samples, d = "
              << g17(trace.params.d) << ")\n";
    return 0;
}

int cmd_verify(const std::string& in_path, int n, const std::string& out_path,
               const ToleranceSettings& tol) {
    const CurveTrace trace = read_curve(in_path);
    if (trace.params.n != n) {
        throw std::invalid_argument("verify: file has n = " + std::to_string(trace.params.n) +
                                    ", expected " + std::to_string(n));
    }
    const VerificationReport report = verify_trace(trace, tol.verify);
    if (out_path.empty()) {
        std::cout << report_to_json(report);
    } else {
        write_report(out_path, report);
    }
    for (const auto& [name, ok] : report.passed) {
        std::cerr << (ok ? "pass " : "FAIL ") << name << "\n";
    }
    return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed p-elastic profile curves of biconservative rotational hypersurfaces"};
    app.require_subcommand(1);

    double rho = 1.0;
    app.add_option("--rho", rho, "ambient curvature (sphere radius 1/sqrt(rho))")
        ->capture_default_str();

    int max_r = 0;
    auto* c_enum = app.add_subcommand("enumerate", "list admissible (l, r) pairs");
    c_enum->add_option("--max-r", max_r, "largest lobe count r")->required();

    int n = 0, steps = 50;
    double d_min = 0.0, d_max = 0.0;
    bool log_grid = false;
    std::string out_path, in_path;
    auto* c_sweep = app.add_subcommand("sweep", "tabulate I(d), period, roots over a d-range");
    c_sweep->add_option("--n", n, "ambient dimension, >= 3")->required();
    c_sweep->add_option("--d-min", d_min)->required();
    c_sweep->add_option("--d-max", d_max)->required();
    c_sweep->add_option("--steps", steps)->capture_default_str();
    c_sweep->add_flag("--log", log_grid, "logarithmic grid");
    c_sweep->add_option("--out", out_path, "CSV path (default stdout)");

    int l = 0, r = 0;
    auto* c_solve = app.add_subcommand("solve", "solve I(d) = 2 pi l / r");
    c_solve->add_option("--n", n)->required();
    c_solve->add_option("--l", l)->required();
    c_solve->add_option("--r", r)->required();

    int points = 2048;
    double d_explicit = 0.0;
    auto* c_trace = app.add_subcommand("trace", "integrate the profile curve, write Curve JSON");
    c_trace->add_option("--n", n)->required();
    auto* opt_l = c_trace->add_option("--l", l);
    auto* opt_r = c_trace->add_option("--r", r);
    auto* opt_d = c_trace->add_option("--d", d_explicit, "explicit level (open one-period trace)");
    c_trace->add_option("--points", points, "output samples, >= 16")->capture_default_str();
    c_trace->add_option("--out", out_path, "Curve JSON path")->required();

    auto* c_verify = app.add_subcommand("verify", "certify a Curve JSON file");
    c_verify->add_option("--in", in_path, "Curve JSON path")->required();
    c_verify->add_option("--n", n, "expected ambient dimension")->required();
    c_verify->add_option("--out", out_path, "report JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const ToleranceSettings tol = load_tolerances();
        if (c_enum->parsed()) return cmd_enumerate(max_r);
        if (c_sweep->parsed()) return cmd_sweep(n, rho, d_min, d_max, steps, log_grid, out_path, tol);
        if (c_solve->parsed()) return cmd_solve(n, rho, l, r, tol);
        if (c_trace->parsed()) {
            return cmd_trace(n, rho,
                             opt_l->count() ? std::optional<int>(l) : std::nullopt,
                             opt_r->count() ? std::optional<int>(r) : std::nullopt,
                             opt_d->count() ? std::optional<double>(d_explicit) : std::nullopt,
                             points, out_path, tol);
        }
        if (c_verify->parsed()) return cmd_verify(in_path, n, out_path, tol);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
