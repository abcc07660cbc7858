#pragma once

#include "ncs/controller.hpp"
#include "ncs/loss_channel.hpp"
#include "ncs/plant.hpp"
#include "ncs/predictor.hpp"
#include "ncs/runtime.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ncs {

/// A complete experiment description: plant, predictor, controller, channel,
/// simulation horizon, cost weights and the strategies to compare.
struct Scenario {
    std::string name = "tank-paper";
    TankParams plant;
    PredictorConfig predictor;
    LyapunovSpec lyapunov;
    ControllerConfig controller;
    LossModel loss;
    std::string loss_trace_path;  ///< used when loss.kind == trace and loss.trace is empty
    double x0 = 1.2e5;
    double sample_time = 2.0;
    double duration = 3600.0;
    int truth_substeps = 20;
    UncertaintySignal theta;
    bool step4_literal = false;
    double initial_input = 0.0;
    CostWeights cost;
    std::vector<Strategy> strategies;

    /// Cross-field checks (domain membership, horizon vs duration, ...).
    void validate() const;

    long steps() const;

    /// Materializes the runtime setup; reads the loss trace file if needed.
    ClosedLoopSetup setup() const;
};

/// The pneumatic-tank reference scenario, registered as "tank-paper".
Scenario reference_scenario();

std::vector<std::string> builtin_scenario_names();

nlohmann::json to_json(const Scenario& s);
/// Strict: unknown keys are ConfigError. Missing keys take reference values.
Scenario scenario_from_json(const nlohmann::json& j);

/// Loads a built-in by name, or a JSON file.
Scenario load_scenario(const std::string& name_or_path);

/// Applies "a.b.c=value" to a resolved config tree. The key must exist; the
/// value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& tree, const std::string& assignment);

/// Parses a --loss shorthand: none | bernoulli:P | gilbert-elliott:G2B,B2G[,LOSS] | trace:PATH
void apply_loss_shorthand(nlohmann::json& tree, const std::string& spec);

}  // namespace ncs
