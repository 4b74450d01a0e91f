#include "biconserve/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "biconserve/errors.hpp"

namespace biconserve {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ToleranceSettings parse_tolerance_stream(std::istream& in) {
    ToleranceSettings t;
    const std::map<std::string, std::function<void(double)>> setters = {
        {"quad_rel_tol", [&](double v) { t.quad.rel_tol = v; }},
        {"solver_tol", [&](double v) { t.solver.i_tol = v; }},
        {"ode_tol", [&](double v) { t.trace.ode_tol = v; }},
        {"ode_atol", [&](double v) { t.trace.ode_atol = v; }},
        {"drift_tol", [&](double v) { t.trace.drift_tol = v; }},
        {"closure_tol", [&](double v) { t.trace.closure_tol = v; }},
        {"verify_sphere", [&](double v) { t.verify.sphere = v; }},
        {"verify_speed", [&](double v) { t.verify.speed = v; }},
        {"verify_el", [&](double v) { t.verify.el = v; }},
        {"verify_first_integral", [&](double v) { t.verify.first_integral_rel = v; }},
        {"verify_biconservative", [&](double v) { t.verify.biconservative = v; }},
        {"verify_kappa", [&](double v) { t.verify.kappa_consistency = v; }},
        {"verify_closure_gap", [&](double v) { t.verify.closure_gap = v; }},
        {"verify_winding_angle", [&](double v) { t.verify.winding_angle = v; }},
        {"verify_pole_margin", [&](double v) { t.verify.pole_margin = v; }},
        {"verify_tangential_dedup", [&](double v) { t.verify.tangential_dedup = v; }},
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("tolerance file line " + std::to_string(lineno) +
                                        ": expected key=value");
        }
        std::string key = line.substr(first, eq - first);
        key.erase(key.find_last_not_of(" \t") + 1);
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw std::invalid_argument("tolerance file line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        }
        double value = 0.0;
        try {
            value = std::stod(line.substr(eq + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("tolerance file line " + std::to_string(lineno) +
                                        ": bad value for '" + key + "'");
        }
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw std::invalid_argument("tolerance file line " + std::to_string(lineno) +
                                        ": value for '" + key + "' must be positive");
        }
        it->second(value);
    }
    t.solver.quad = t.quad;
    return t;
}

ToleranceSettings parse_tolerance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open tolerance file: " + path);
    return parse_tolerance_stream(in);
}

ToleranceSettings load_tolerances() {
    const char* path = std::getenv("BICONSERVE_CONFIG");
    if (path == nullptr || *path == '\0') return {};
    return parse_tolerance_file(path);
}

std::string curve_to_json(const CurveTrace& trace) {
    std::ostringstream out;
    out << "{\n  \"meta\": {\n";
    out << "    \"n\": " << trace.params.n << ",\n";
    out << "    \"p\": \"" << trace.params.p.str() << "\",\n";
    out << "    \"rho\": " << fmt17(trace.params.rho) << ",\n";
    out << "    \"d\": " << fmt17(trace.params.d) << ",\n";
    if (trace.target) {
        out << "    \"l\": " << trace.target->l << ",\n";
        out << "    \"r\": " << trace.target->r << ",\n";
    } else {
        out << "    \"l\": null,\n    \"r\": null,\n";
    }
    out << "    \"period\": " << fmt17(trace.period) << ",\n";
    out << "    \"closure_integral\": " << fmt17(trace.closure_integral) << ",\n";
    out << "    \"tool_version\": \"" << kToolVersion << "\"\n  },\n";
    out << "  \"samples\": [\n";
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& cs = trace.samples[i];
        out << "    {\"s\": " << fmt17(cs.s) << ", \"u\": " << fmt17(cs.u)
            << ", \"du\": " << fmt17(cs.du) << ", \"kappa\": " << fmt17(cs.kappa)
            << ", \"psi\": " << fmt17(cs.psi) << ", \"x\": [" << fmt17(cs.x[0]) << ", "
            << fmt17(cs.x[1]) << ", " << fmt17(cs.x[2]) << "]}";
        out << (i + 1 < trace.samples.size() ? ",\n" : "\n");
    }
    out << "  ]\n}\n";
    return out.str();
}

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* name) {
    const auto it = obj.find(name);
    if (it == obj.end()) throw SchemaError(std::string("curve file: missing field '") + name + "'");
    return *it;
}

double num_field(const json& obj, const char* name) {
    const json& v = field(obj, name);
    if (!v.is_number()) throw SchemaError(std::string("curve file: '") + name + "' must be a number");
    return v.get<double>();
}

int int_field(const json& obj, const char* name) {
    const json& v = field(obj, name);
    if (!v.is_number_integer()) {
        throw SchemaError(std::string("curve file: '") + name + "' must be an integer");
    }
    return v.get<int>();
}

}  // namespace

CurveTrace curve_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("curve file: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("curve file: top level must be an object");
    const json& meta = field(doc, "meta");
    if (!meta.is_object()) throw SchemaError("curve file: 'meta' must be an object");

    const int n = int_field(meta, "n");
    const double rho = num_field(meta, "rho");
    const double d = num_field(meta, "d");
    CurveTrace trace;
    try {
        trace.params = ModelParams::make(n, rho, d);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("curve file: ") + e.what());
    }
    const json& pfield = field(meta, "p");
    if (!pfield.is_string() || pfield.get<std::string>() != trace.params.p.str()) {
        throw SchemaError("curve file: 'p' must be the string \"" + trace.params.p.str() +
                          "\" for n=" + std::to_string(n));
    }
    if (!field(meta, "tool_version").is_string()) {
        throw SchemaError("curve file: 'tool_version' must be a string");
    }

    const json& l = field(meta, "l");
    const json& r = field(meta, "r");
    if (l.is_null() != r.is_null()) {
        throw SchemaError("curve file: 'l' and 'r' must both be set or both null");
    }
    if (!l.is_null()) {
        if (!l.is_number_integer() || !r.is_number_integer()) {
            throw SchemaError("curve file: 'l' and 'r' must be integers");
        }
        trace.target = ClosureTarget{l.get<int>(), r.get<int>()};
        if (!admissible_target(trace.target->l, trace.target->r)) {
            throw SchemaError("curve file: (l, r) = (" + std::to_string(trace.target->l) + ", " +
                              std::to_string(trace.target->r) + ") is not admissible");
        }
    }
    trace.period = num_field(meta, "period");
    trace.closure_integral = num_field(meta, "closure_integral");

    const json& samples = field(doc, "samples");
    if (!samples.is_array() || samples.empty()) {
        throw SchemaError("curve file: 'samples' must be a non-empty array");
    }
    trace.samples.reserve(samples.size());
    for (const json& s : samples) {
        if (!s.is_object()) throw SchemaError("curve file: each sample must be an object");
        CurveSample cs;
        cs.s = num_field(s, "s");
        cs.u = num_field(s, "u");
        cs.du = num_field(s, "du");
        cs.kappa = num_field(s, "kappa");
        cs.psi = num_field(s, "psi");
        const json& x = field(s, "x");
        if (!x.is_array() || x.size() != 3 || !x[0].is_number() || !x[1].is_number() ||
            !x[2].is_number()) {
            throw SchemaError("curve file: 'x' must be an array of 3 numbers");
        }
        cs.x = {x[0].get<double>(), x[1].get<double>(), x[2].get<double>()};
        if (!(cs.u > 0.0)) throw SchemaError("curve file: sample has u <= 0");
        trace.samples.push_back(cs);
    }

    const auto& a = trace.samples.front().x;
    const auto& b = trace.samples.back().x;
    trace.closure_gap = std::sqrt((b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]) +
                                  (b[2] - a[2]) * (b[2] - a[2]));
    return trace;
}

void write_curve(const std::string& path, const CurveTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << curve_to_json(trace);
    if (!out) throw std::runtime_error("write failed: " + path);
}

CurveTrace read_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open curve file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return curve_from_json(buf.str());
}

std::string report_to_json(const VerificationReport& report) {
    json doc;
    doc["sphere_residual"] = report.sphere_residual;
    doc["speed_residual"] = report.speed_residual;
    doc["el_residual"] = report.el_residual;
    doc["first_integral_residual"] = report.first_integral_residual;
    doc["kappa_residual"] = report.kappa_residual;
    doc["biconservative_residual"] = report.biconservative_residual;
    doc["mean_curvature_range"] = {report.mean_curvature_min, report.mean_curvature_max};
    doc["scalar_curvature_relspread"] = report.scalar_curvature_relspread;
    doc["closure_gap"] = report.closure_gap;
    doc["winding_angle_error"] = report.winding_angle_error;
    doc["pole_margin"] = report.pole_margin;
    doc["winding"] = report.winding;
    doc["lobes"] = report.lobes;
    doc["self_intersections"] = report.self_intersections;
    doc["opposite_principal_signs"] = report.opposite_principal_signs;
    doc["passed"] = report.passed;
    doc["all_passed"] = report.all_passed();
    return doc.dump(2) + "\n";
}

void write_report(const std::string& path, const VerificationReport& report) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << report_to_json(report);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace biconserve
