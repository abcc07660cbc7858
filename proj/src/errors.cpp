#include "ncs/errors.hpp"

#include <sstream>

namespace ncs {

namespace {

std::string domain_message(double x, double lo, double hi, const std::string& what_fn) {
    std::ostringstream os;
    os.precision(17);
    os << what_fn << ": state " << x << " outside domain [" << lo << ", " << hi << "]";
    return os.str();
}

}  // namespace

DomainError::DomainError(double x, double lo, double hi, const std::string& what_fn)
    : Error(domain_message(x, lo, hi, what_fn)), value_(x), lo_(lo), hi_(hi) {}

IntegrationDomainError::IntegrationDomainError(int stage, const DomainError& cause)
    : DomainError(cause.value(), cause.lo(), cause.hi(),
                  "rk4 stage " + std::to_string(stage)),
      stage_(stage) {}

GammaOutOfRange::GammaOutOfRange(double raw)
    : CalibrationError("calibrated gamma " + std::to_string(raw) +
                       " violates |gamma| < 1"),
      raw_(raw) {}

TraceExhausted::TraceExhausted(std::size_t index, std::size_t length)
    : Error("loss trace exhausted at step " + std::to_string(index) + " (length " +
            std::to_string(length) + ", wrap disabled)") {}

}  // namespace ncs
