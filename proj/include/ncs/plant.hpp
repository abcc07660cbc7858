#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace ncs {

/// Closed interval [lo, hi] of admissible states.
struct StateDomain {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Input-affine SISO plant  xdot = f(x) + g(x) u + w(x) theta.
///
/// Evaluations are checked: a state outside the domain raises DomainError and
/// a non-finite value raises NonFiniteError. Instances are immutable and may
/// be shared across threads.
class SystemDynamics {
public:
    using Field = std::function<double(double)>;

    SystemDynamics(Field drift, Field input_gain, Field uncertainty_gain, StateDomain domain);

    double f(double x) const;
    double g(double x) const;
    double w(double x) const;

    const StateDomain& domain() const noexcept { return domain_; }

    /// Throws DomainError when x is outside the domain.
    void require_in_domain(double x, const char* context) const;

private:
    double evaluate(const Field& fn, double x, const char* name) const;

    Field drift_;
    Field input_gain_;
    Field uncertainty_gain_;
    StateDomain domain_;
};

/// f(x) + g(x) u + w(x) theta, with domain and finiteness checks.
double eval_rhs(const SystemDynamics& dyn, double x, double u, double theta);

/// Parameters of the pneumatic tank. Pressures in Pa, volume in m^3.
struct TankParams {
    double alpha1 = 0.631811;
    double alpha2 = 0.631811;
    double a1 = 1.9625e-3;
    double a2 = 1.9625e-3;
    double p1 = 2.0e5;
    double p2 = 1.0e5;
    double rho = 3.49772;
    double vol = 2.0;
    double m2 = 0.5;
    /// Distance kept from both square-root singularities.
    double margin = 1e-3;

    /// Throws ConfigError if any physical constraint is violated.
    void validate() const;

    StateDomain state_domain() const noexcept { return {p2 + margin, p1 - margin}; }
};

// Closed forms of the tank vector fields. Defined on [p2, p1]; these are the
// raw expressions used by tank_dynamics and by the regression tests.
double tank_drift(const TankParams& p, double x);
double tank_input_gain(const TankParams& p, double x);
double tank_uncertainty_gain(const TankParams& p, double x);

SystemDynamics tank_dynamics(const TankParams& params);

/// Piecewise-constant disturbance theta(t).
///
/// theta(t) is the value of the last breakpoint with time <= t, and zero
/// before the first breakpoint. A constant signal is a single breakpoint at
/// t = -inf.
class UncertaintySignal {
public:
    struct Breakpoint {
        double time;
        double value;
    };

    UncertaintySignal() = default;

    static UncertaintySignal constant(double value);
    /// Breakpoint times must be strictly increasing.
    static UncertaintySignal schedule(std::vector<Breakpoint> points);

    double operator()(double t) const noexcept;

    bool is_constant() const noexcept { return constant_; }
    const std::vector<Breakpoint>& breakpoints() const noexcept { return points_; }

private:
    std::vector<Breakpoint> points_;
    bool constant_ = true;
};

}  // namespace ncs
