#pragma once

#include "ncs/plant.hpp"

namespace ncs {

/// Quadratic control Lyapunov function V(x) = ((x - setpoint) / scale)^2.
///
/// scale = 1 gives the plain quadratic form. A larger scale lowers the
/// effective feedback gain of the Sontag law, which matters when the state is
/// expressed in large physical units (Pa).
struct LyapunovSpec {
    double setpoint = 0.0;
    double scale = 1.0;

    double value(double x) const noexcept;
    double gradient(double x) const noexcept;
};

struct ControllerConfig {
    double lgv_threshold = 1e-15;  ///< |LgV| at or below this is treated as zero
    double u_min = 0.0;
    double u_max = 1.0;
    /// Shift the input by the setpoint equilibrium u_eq = -f(x_ref)/g(x_ref)
    /// and apply the Sontag law to the shifted drift f + g u_eq.
    bool feedforward = false;

    void validate() const;
};

struct LieDerivatives {
    double lfv = 0.0;
    double lgv = 0.0;
};

LieDerivatives lie_derivatives(const SystemDynamics& dyn, const LyapunovSpec& lyap, double x);

/// Unsaturated Sontag law for scalar input:
///   u = -(LfV + sqrt(LfV^2 + LgV^4)) / LgV,  and 0 when |LgV| <= threshold.
/// Throws ControllerOverflow on a non-finite intermediate.
double sontag_formula(double lfv, double lgv, double threshold);

/// Equilibrium input at the setpoint; zero unless feedforward is enabled.
double feedforward_input(const SystemDynamics& dyn, const LyapunovSpec& lyap,
                         const ControllerConfig& cfg);

/// Lie derivatives the Sontag law acts on: the plain ones, or with LfV taken
/// along the shifted drift when feedforward is enabled.
LieDerivatives effective_lie_derivatives(const SystemDynamics& dyn, const LyapunovSpec& lyap,
                                         const ControllerConfig& cfg, double x);

/// Saturated Sontag feedback evaluated on the nominal plant.
double sontag_input(const SystemDynamics& dyn, const LyapunovSpec& lyap,
                    const ControllerConfig& cfg, double x);

/// Nominal Vdot = LfV + LgV * u under the saturated feedback.
double closed_loop_vdot(const SystemDynamics& dyn, const LyapunovSpec& lyap,
                        const ControllerConfig& cfg, double x);

/// Value-type state feedback bound to one plant and Lyapunov function.
class SontagController {
public:
    SontagController(SystemDynamics dyn, LyapunovSpec lyap, ControllerConfig cfg);

    double operator()(double x) const;

    const LyapunovSpec& lyapunov() const noexcept { return lyap_; }
    const ControllerConfig& config() const noexcept { return cfg_; }
    double equilibrium_input() const noexcept { return u_ff_; }

private:
    SystemDynamics dyn_;
    LyapunovSpec lyap_;
    ControllerConfig cfg_;
    double u_ff_;
};

}  // namespace ncs
