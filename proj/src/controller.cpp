#include "ncs/controller.hpp"

#include "ncs/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ncs {

double LyapunovSpec::value(double x) const noexcept {
    const double e = (x - setpoint) / scale;
    return e * e;
}

double LyapunovSpec::gradient(double x) const noexcept {
    return 2.0 * (x - setpoint) / (scale * scale);
}

void ControllerConfig::validate() const {
    if (!(lgv_threshold > 0.0)) throw ConfigError("controller.lgv_threshold must be > 0");
    if (!(u_min < u_max)) throw ConfigError("controller.u_min must be < u_max");
}

LieDerivatives lie_derivatives(const SystemDynamics& dyn, const LyapunovSpec& lyap, double x) {
    const double dv = lyap.gradient(x);
    return {dv * dyn.f(x), dv * dyn.g(x)};
}

double sontag_formula(double lfv, double lgv, double threshold) {
    if (std::abs(lgv) <= threshold) return 0.0;
    const double lgv2 = lgv * lgv;
    const double root = std::sqrt(lfv * lfv + lgv2 * lgv2);
    const double u = -(lfv + root) / lgv;
    if (!std::isfinite(root) || !std::isfinite(u)) {
        throw ControllerOverflow("Sontag formula overflowed (LfV = " + std::to_string(lfv) +
                                 ", LgV = " + std::to_string(lgv) + ")");
    }
    return u;
}

double feedforward_input(const SystemDynamics& dyn, const LyapunovSpec& lyap,
                         const ControllerConfig& cfg) {
    if (!cfg.feedforward) return 0.0;
    const double g = dyn.g(lyap.setpoint);
    if (g == 0.0) throw ConfigError("feedforward needs g(setpoint) != 0");
    return -dyn.f(lyap.setpoint) / g;
}

namespace {

LieDerivatives shifted(const SystemDynamics& dyn, const LyapunovSpec& lyap, double u_ff, double x) {
    const double dv = lyap.gradient(x);
    const double g = dyn.g(x);
    return {dv * (dyn.f(x) + g * u_ff), dv * g};
}

double saturated(const SystemDynamics& dyn, const LyapunovSpec& lyap,
                 const ControllerConfig& cfg, double u_ff, double x) {
    const auto d = shifted(dyn, lyap, u_ff, x);
    const double u = u_ff + sontag_formula(d.lfv, d.lgv, cfg.lgv_threshold);
    return std::clamp(u, cfg.u_min, cfg.u_max);
}

}  // namespace

LieDerivatives effective_lie_derivatives(const SystemDynamics& dyn, const LyapunovSpec& lyap,
                                         const ControllerConfig& cfg, double x) {
    return shifted(dyn, lyap, feedforward_input(dyn, lyap, cfg), x);
}

double sontag_input(const SystemDynamics& dyn, const LyapunovSpec& lyap,
                    const ControllerConfig& cfg, double x) {
    return saturated(dyn, lyap, cfg, feedforward_input(dyn, lyap, cfg), x);
}

double closed_loop_vdot(const SystemDynamics& dyn, const LyapunovSpec& lyap,
                        const ControllerConfig& cfg, double x) {
    const auto d = lie_derivatives(dyn, lyap, x);
    return d.lfv + d.lgv * sontag_input(dyn, lyap, cfg, x);
}

SontagController::SontagController(SystemDynamics dyn, LyapunovSpec lyap, ControllerConfig cfg)
    : dyn_(std::move(dyn)), lyap_(lyap), cfg_(cfg), u_ff_(0.0) {
    cfg_.validate();
    if (!(lyap_.scale > 0.0)) throw ConfigError("controller.lyapunov_scale must be > 0");
    dyn_.require_in_domain(lyap_.setpoint, "controller setpoint");
    u_ff_ = feedforward_input(dyn_, lyap_, cfg_);
}

double SontagController::operator()(double x) const {
    return saturated(dyn_, lyap_, cfg_, u_ff_, x);
}

}  // namespace ncs
