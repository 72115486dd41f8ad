#include "crsim/errors.hpp"

#include <cstdio>

namespace crsim {

namespace {
std::string with_residual(const std::string& what, double r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (last residual %.6g)", r);
    return what + buf;
}
}  // namespace

ConvergenceError::ConvergenceError(const std::string& what, double last_residual)
    : std::runtime_error(with_residual(what, last_residual)), last_residual_(last_residual) {}

}  // namespace crsim
