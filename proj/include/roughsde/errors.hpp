#pragma once

#include <stdexcept>
#include <string>

namespace roughsde {

// A pairing whose audit could not certify finiteness: one of the two path
// norms came out non-finite. `norm_name` says which one.
class InfeasibleIntegrand : public std::runtime_error {
public:
    InfeasibleIntegrand(std::string norm_name, double theta, double value)
        : std::runtime_error("infeasible integrand: " + norm_name + " at theta=" +
                             std::to_string(theta) + " evaluated to " + std::to_string(value)),
          norm_name(std::move(norm_name)),
          theta(theta),
          value(value) {}

    std::string norm_name;
    double theta;
    double value;
};

// 1/sigma fails to be integrable across a zero of sigma inside the
// requested transform range.
class NonIntegrableCoefficient : public std::runtime_error {
public:
    NonIntegrableCoefficient(double where, std::string detail)
        : std::runtime_error("1/sigma not integrable near x=" + std::to_string(where) +
                             ": " + detail),
          where(where) {}

    double where;
};

// A result left the representable range the caller asked for (e.g. an
// inverse-transform query outside the covered table after extension capped).
class RangeError : public std::range_error {
public:
    explicit RangeError(const std::string& what) : std::range_error(what) {}
};

// An internal consistency check failed (bug trap, not user error).
class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& what)
        : std::runtime_error("internal error: " + what) {}
};

}  // namespace roughsde
