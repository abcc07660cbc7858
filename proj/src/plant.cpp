#include "ncs/plant.hpp"

#include "ncs/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ncs {

SystemDynamics::SystemDynamics(Field drift, Field input_gain, Field uncertainty_gain,
                               StateDomain domain)
    : drift_(std::move(drift)),
      input_gain_(std::move(input_gain)),
      uncertainty_gain_(std::move(uncertainty_gain)),
      domain_(domain) {
    if (!(domain_.lo <= domain_.hi) || !std::isfinite(domain_.lo) || !std::isfinite(domain_.hi)) {
        throw ConfigError("state domain must be a finite interval with lo <= hi");
    }
    if (!drift_ || !input_gain_ || !uncertainty_gain_) {
        throw ConfigError("system dynamics requires f, g and w");
    }
}

void SystemDynamics::require_in_domain(double x, const char* context) const {
    if (!domain_.contains(x)) {
        throw DomainError(x, domain_.lo, domain_.hi, context);
    }
}

double SystemDynamics::evaluate(const Field& fn, double x, const char* name) const {
    require_in_domain(x, name);
    const double v = fn(x);
    if (!std::isfinite(v)) {
        throw NonFiniteError(std::string(name) + " is not finite at x = " + std::to_string(x));
    }
    return v;
}

double SystemDynamics::f(double x) const { return evaluate(drift_, x, "f"); }
double SystemDynamics::g(double x) const { return evaluate(input_gain_, x, "g"); }
double SystemDynamics::w(double x) const { return evaluate(uncertainty_gain_, x, "w"); }

double eval_rhs(const SystemDynamics& dyn, double x, double u, double theta) {
    const double rate = dyn.f(x) + dyn.g(x) * u + dyn.w(x) * theta;
    if (!std::isfinite(rate)) {
        throw NonFiniteError("right-hand side is not finite at x = " + std::to_string(x));
    }
    return rate;
}

void TankParams::validate() const {
    auto fail = [](const char* what) { throw ConfigError(std::string("tank params: ") + what); };
    if (!(p2 >= 0.0)) fail("p2 must be >= 0");
    if (!(p1 > p2)) fail("p1 must exceed p2");
    if (!(vol > 0.0)) fail("vol must be > 0");
    if (!(rho > 0.0)) fail("rho must be > 0");
    if (!(alpha1 > 0.0 && alpha2 > 0.0)) fail("flow coefficients must be > 0");
    if (!(a1 > 0.0 && a2 > 0.0)) fail("valve cross-sections must be > 0");
    if (!(m2 >= 0.0 && m2 <= 1.0)) fail("m2 must lie in [0, 1]");
    if (!(margin >= 0.0 && 2.0 * margin < p1 - p2)) fail("margin must be >= 0 and leave a nonempty domain");
}

namespace {

void require_tank_range(const TankParams& p, double x, const char* name) {
    if (!(x >= p.p2 && x <= p.p1)) {
        throw DomainError(x, p.p2, p.p1, name);
    }
}

}  // namespace

double tank_drift(const TankParams& p, double x) {
    require_tank_range(p, x, "tank f");
    return -(1.0 / p.vol) * p.alpha2 * p.a2 * p.m2 * x * std::sqrt(2.0 * (x - p.p2) / p.rho);
}

double tank_input_gain(const TankParams& p, double x) {
    require_tank_range(p, x, "tank g");
    return (1.0 / p.vol) * p.alpha1 * p.a1 * x * std::sqrt(2.0 * (p.p1 - x) / p.rho);
}

double tank_uncertainty_gain(const TankParams& p, double x) {
    require_tank_range(p, x, "tank w");
    return x / p.vol;
}

SystemDynamics tank_dynamics(const TankParams& params) {
    params.validate();
    return SystemDynamics([params](double x) { return tank_drift(params, x); },
                          [params](double x) { return tank_input_gain(params, x); },
                          [params](double x) { return tank_uncertainty_gain(params, x); },
                          params.state_domain());
}

UncertaintySignal UncertaintySignal::constant(double value) {
    UncertaintySignal s;
    s.points_ = {{-std::numeric_limits<double>::infinity(), value}};
    s.constant_ = true;
    return s;
}

UncertaintySignal UncertaintySignal::schedule(std::vector<Breakpoint> points) {
    for (std::size_t j = 1; j < points.size(); ++j) {
        if (!(points[j].time > points[j - 1].time)) {
            throw ConfigError("theta schedule times must be strictly increasing");
        }
    }
    for (const auto& bp : points) {
        if (!std::isfinite(bp.value)) throw ConfigError("theta schedule values must be finite");
    }
    UncertaintySignal s;
    s.points_ = std::move(points);
    s.constant_ = false;
    return s;
}

double UncertaintySignal::operator()(double t) const noexcept {
    double value = 0.0;
    for (const auto& bp : points_) {
        if (bp.time <= t) {
            value = bp.value;
        } else {
            break;
        }
    }
    return value;
}

}  // namespace ncs
