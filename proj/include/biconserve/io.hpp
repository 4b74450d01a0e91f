#pragma once

#include <iosfwd>
#include <string>

#include "biconserve/closure.hpp"
#include "biconserve/quad.hpp"
#include "biconserve/trace.hpp"
#include "biconserve/verify.hpp"

namespace biconserve {

inline constexpr const char* kToolVersion = "0.1.0";

// Every tunable tolerance in one place. Defaults match the per-module
// config structs; a file named by the BICONSERVE_CONFIG environment
// variable (simple key=value lines, '#' comments) can override them.
struct ToleranceSettings {
    QuadratureConfig quad;
    SolverConfig solver;
    TraceConfig trace;
    VerifyTolerances verify;
};

// Parse key=value overrides. Unknown keys and non-positive values raise
// std::invalid_argument.
ToleranceSettings parse_tolerance_stream(std::istream& in);
ToleranceSettings parse_tolerance_file(const std::string& path);

// Defaults, overridden by the file named in BICONSERVE_CONFIG when set.
ToleranceSettings load_tolerances();

// Curve file: {"meta": {n, p ("num/den"), rho, d, l, r, period,
// closure_integral, tool_version}, "samples": [{s, u, du, kappa, psi,
// x: [x1, x2, x3]}, ...]}. l and r are null for open one-period traces.
// Floats are written with 17 significant digits, so parsing reproduces
// every double bit-for-bit. Malformed input raises SchemaError.
std::string curve_to_json(const CurveTrace& trace);
CurveTrace curve_from_json(const std::string& text);
void write_curve(const std::string& path, const CurveTrace& trace);
CurveTrace read_curve(const std::string& path);

std::string report_to_json(const VerificationReport& report);
void write_report(const std::string& path, const VerificationReport& report);

}  // namespace biconserve
