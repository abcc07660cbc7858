#pragma once

#include "ncs/errors.hpp"
#include "ncs/plant.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ncs {

struct PredictorConfig {
    double delta = 2.0;   ///< RK4 step (s)
    double gamma = 0.0;   ///< multiplicative correction, |gamma| < 1
    int horizon = 10;     ///< N: trajectory length is N + 1

    void validate() const;
};

/// Nominal-model RK4 increment over one step with u held for all four stages.
/// theta is not part of the prediction model.
double rk4_increment(const SystemDynamics& dyn, double x, double u, double delta);

/// xhat_next = (1 + gamma) xhat + rk4_increment(xhat, u).
double predict_step(const PredictorConfig& cfg, const SystemDynamics& dyn, double xhat, double u);

struct ControlTrajectory {
    long origin_step = 0;
    std::vector<double> inputs;
    std::vector<double> predicted_states;

    std::size_t size() const noexcept { return inputs.size(); }
};

using StateFeedback = std::function<double(double)>;

/// Raised when a predicted state leaves the domain before the horizon ends.
/// partial() holds the valid prefix.
class TrajectoryTruncated : public Error {
public:
    TrajectoryTruncated(ControlTrajectory partial, const std::string& cause);

    std::size_t valid_length() const noexcept { return partial_.size(); }
    const ControlTrajectory& partial() const noexcept { return partial_; }

private:
    ControlTrajectory partial_;
};

/// Rolls the predictor forward from x0 under state feedback, producing N + 1
/// inputs u[j] = controller(xhat_j). Each entry advances `substeps`
/// predictor steps with u[j] held.
ControlTrajectory predict_trajectory(const PredictorConfig& cfg, const SystemDynamics& dyn,
                                     double x0, const StateFeedback& controller,
                                     int substeps = 1);

struct SamplePair {
    std::vector<double> predicted;
    std::vector<double> measured;

    void validate() const;
};

/// Everything the calibration procedures compute, before any range check.
struct CalibrationReport {
    std::vector<double> pair_errors;  ///< E_i, one per pair
    double mean_squared_error = 0.0;  ///< E
    double mean_predicted = 0.0;
    double mean_measured = 0.0;
    int zeta = 1;
    double gamma = 0.0;  ///< raw, not range-checked

    bool in_range() const noexcept { return gamma > -1.0 && gamma < 1.0; }
};

CalibrationReport calibration_report_one(std::span<const double> predicted,
                                         std::span<const double> measured);
CalibrationReport calibration_report_two(std::span<const SamplePair> pairs);

/// Throws GammaOutOfRange when |gamma| >= 1.
double calibrate_gamma_one(std::span<const double> predicted, std::span<const double> measured);
double calibrate_gamma_two(std::span<const SamplePair> pairs);

/// Clips into (-1 + 1e-6, 1 - 1e-6).
double clamp_gamma(double gamma) noexcept;

}  // namespace ncs
