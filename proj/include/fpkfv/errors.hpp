#ifndef FPKFV_ERRORS_HPP
#define FPKFV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fpkfv {

/// Bad inputs, malformed files, violated preconditions. CLI exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solves that ran out of budget. CLI exit code 3.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
    double last_residual;
};

} // namespace fpkfv

#endif
