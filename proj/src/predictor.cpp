#include "ncs/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncs {

void PredictorConfig::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("predictor.delta must be > 0");
    if (!(gamma > -1.0 && gamma < 1.0)) throw ConfigError("predictor.gamma must satisfy |gamma| < 1");
    if (horizon < 1) throw ConfigError("predictor.horizon must be >= 1");
}

double rk4_increment(const SystemDynamics& dyn, double x, double u, double delta) {
    auto slope = [&](double state, int stage) {
        try {
            return delta * (dyn.f(state) + dyn.g(state) * u);
        } catch (const IntegrationDomainError&) {
            throw;
        } catch (const DomainError& e) {
            throw IntegrationDomainError(stage, e);
        }
    };
    const double k1 = slope(x, 1);
    const double k2 = slope(x + 0.5 * k1, 2);
    const double k3 = slope(x + 0.5 * k2, 3);
    const double k4 = slope(x + k3, 4);
    return (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

double predict_step(const PredictorConfig& cfg, const SystemDynamics& dyn, double xhat, double u) {
    dyn.require_in_domain(xhat, "predict_step");
    const double next = (1.0 + cfg.gamma) * xhat + rk4_increment(dyn, xhat, u, cfg.delta);
    dyn.require_in_domain(next, "predict_step result");
    return next;
}

TrajectoryTruncated::TrajectoryTruncated(ControlTrajectory partial, const std::string& cause)
    : Error("prediction truncated after " + std::to_string(partial.size()) +
            " entries: " + cause),
      partial_(std::move(partial)) {}

ControlTrajectory predict_trajectory(const PredictorConfig& cfg, const SystemDynamics& dyn,
                                     double x0, const StateFeedback& controller, int substeps) {
    if (substeps < 1) throw ConfigError("predictor substeps must be >= 1");
    dyn.require_in_domain(x0, "predict_trajectory");

    ControlTrajectory traj;
    const auto n = static_cast<std::size_t>(cfg.horizon) + 1;
    traj.inputs.reserve(n);
    traj.predicted_states.reserve(n);

    double xhat = x0;
    for (std::size_t j = 0; j < n; ++j) {
        const double u = controller(xhat);
        traj.predicted_states.push_back(xhat);
        traj.inputs.push_back(u);
        if (j + 1 == n) break;
        try {
            for (int s = 0; s < substeps; ++s) xhat = predict_step(cfg, dyn, xhat, u);
        } catch (const DomainError& e) {
            throw TrajectoryTruncated(std::move(traj), e.what());
        } catch (const NonFiniteError& e) {
            throw TrajectoryTruncated(std::move(traj), e.what());
        }
    }
    return traj;
}

void SamplePair::validate() const {
    if (predicted.empty() || predicted.size() != measured.size()) {
        throw CalibrationError("sample pair needs equal nonzero lengths");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(predicted.begin(), predicted.end(), finite) ||
        !std::all_of(measured.begin(), measured.end(), finite)) {
        throw CalibrationError("sample values must be finite");
    }
}

namespace {

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double mean_squared_error(std::span<const double> predicted, std::span<const double> measured) {
    double s = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = measured[i] - predicted[i];
        s += d * d;
    }
    return s / static_cast<double>(predicted.size());
}

void finish_report(CalibrationReport& r) {
    if (r.mean_predicted == 0.0) {
        throw CalibrationError("mean of predicted samples is zero");
    }
    r.zeta = r.mean_predicted <= r.mean_measured ? 1 : -1;
    r.gamma = r.zeta * r.mean_squared_error / r.mean_predicted;
}

}  // namespace

CalibrationReport calibration_report_one(std::span<const double> predicted,
                                         std::span<const double> measured) {
    SamplePair pair{{predicted.begin(), predicted.end()}, {measured.begin(), measured.end()}};
    pair.validate();

    CalibrationReport r;
    r.mean_squared_error = mean_squared_error(predicted, measured);
    r.pair_errors = {r.mean_squared_error};
    r.mean_predicted = mean(predicted);
    r.mean_measured = mean(measured);
    finish_report(r);
    return r;
}

CalibrationReport calibration_report_two(std::span<const SamplePair> pairs) {
    if (pairs.empty()) throw CalibrationError("calibration needs at least one sample pair");

    CalibrationReport r;
    double sum_e = 0.0;
    double sum_pred = 0.0;
    double sum_meas = 0.0;
    for (const auto& p : pairs) {
        p.validate();
        const double e = mean_squared_error(p.predicted, p.measured);
        r.pair_errors.push_back(e);
        sum_e += e;
        sum_pred += mean(p.predicted);
        sum_meas += mean(p.measured);
    }
    const auto m = static_cast<double>(pairs.size());
    r.mean_squared_error = sum_e / m;
    r.mean_predicted = sum_pred / m;
    r.mean_measured = sum_meas / m;
    finish_report(r);
    return r;
}

double calibrate_gamma_one(std::span<const double> predicted, std::span<const double> measured) {
    const auto r = calibration_report_one(predicted, measured);
    if (!r.in_range()) throw GammaOutOfRange(r.gamma);
    return r.gamma;
}

double calibrate_gamma_two(std::span<const SamplePair> pairs) {
    const auto r = calibration_report_two(pairs);
    if (!r.in_range()) throw GammaOutOfRange(r.gamma);
    return r.gamma;
}

double clamp_gamma(double gamma) noexcept {
    constexpr double bound = 1.0 - 1e-6;
    return std::clamp(gamma, -bound, bound);
}

}  // namespace ncs
