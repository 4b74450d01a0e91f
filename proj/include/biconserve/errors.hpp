#pragma once

#include <stdexcept>
#include <string>

namespace biconserve {

// Failures of numerical procedures (quadrature, root isolation, ODE
// integration, closure solving). The CLI maps these to exit code 3.
// Argument and domain errors use std::invalid_argument / std::domain_error
// and map to exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& msg, double last, double previous)
        : NumericalError(msg), last_estimate(last), previous_estimate(previous) {}
    double last_estimate;
    double previous_estimate;
};

// Root bracketing or polishing failed; usually signals a misclassified
// level d <= d_star.
class BracketError : public NumericalError {
public:
    explicit BracketError(const std::string& msg) : NumericalError(msg) {}
};

class DeflationError : public NumericalError {
public:
    explicit DeflationError(const std::string& msg) : NumericalError(msg) {}
};

class IntegrationError : public NumericalError {
public:
    explicit IntegrationError(const std::string& msg) : NumericalError(msg) {}
};

// First-integral conservation was violated along an integrated path.
class DriftError : public NumericalError {
public:
    explicit DriftError(const std::string& msg) : NumericalError(msg) {}
};

// A geometric identity that should hold exactly was violated (pole
// condition, principal-curvature square roots).
class GeometryError : public NumericalError {
public:
    explicit GeometryError(const std::string& msg) : NumericalError(msg) {}
};

class ClosureError : public NumericalError {
public:
    explicit ClosureError(const std::string& msg) : NumericalError(msg) {}
};

// Malformed curve file on the ingestion path.
class SchemaError : public std::invalid_argument {
public:
    explicit SchemaError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace biconserve
