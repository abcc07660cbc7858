#pragma once

#include "ncs/controller.hpp"
#include "ncs/loss_channel.hpp"
#include "ncs/plant.hpp"
#include "ncs/predictor.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ncs {

/// What the actuator does with a sample whose measurement was lost.
enum class Strategy {
    predictive,  ///< replay the trajectory predicted at the last received sample
    hold_last,   ///< reapply the last input
    zero_input,  ///< apply zero
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct SimConfig {
    double x0 = 1.2e5;
    double sample_time = 2.0;  ///< T_s (s)
    long steps = 1800;         ///< control intervals; records cover k = 0..steps
    int truth_substeps = 20;
    UncertaintySignal theta;
    /// Read the stale-buffer index literally as offset 2i + 1 instead of the
    /// time-aligned offset k - origin.
    bool step4_literal = false;
    /// Applied before the first measurement arrives.
    double initial_input = 0.0;

    void validate() const;
};

struct CostWeights {
    double q_c = 1.0;
    double r_c = 1e6;
    long m_steps = 1800;
    /// Weight the raw state instead of its deviation from the setpoint.
    bool raw_state = false;

    void validate() const;
};

struct SimulationRecord {
    long k = 0;
    double t = 0.0;
    double x_true = 0.0;
    std::optional<double> x_pred;
    int s = 1;
    int buffer_age = 0;
    double u = 0.0;
    double running_cost = 0.0;
};

struct SimulationResult {
    std::vector<SimulationRecord> records;
    /// Set when the run stopped early; records hold the valid prefix.
    std::optional<std::string> divergence;

    bool diverged() const noexcept { return divergence.has_value(); }
};

/// Everything a closed-loop run needs besides the strategy.
struct ClosedLoopSetup {
    SystemDynamics plant;
    PredictorConfig predictor;
    SontagController controller;
    LossModel loss;
    SimConfig sim;
    CostWeights cost;
};

/// Predictor steps per control interval; T_s must be an integer multiple of delta.
int predictor_substeps(const PredictorConfig& cfg, double sample_time);

/// One RK4 step of the full dynamics (f + g u + w theta) for the ground truth.
double truth_rk4_step(const SystemDynamics& plant, double x, double u, double theta, double h);

SimulationResult run_closed_loop(const ClosedLoopSetup& setup, Strategy strategy);

/// Per-record stage cost q_c e^2 + r_c u^2, with e the deviation or raw state.
double stage_cost(const SimulationRecord& r, const CostWeights& w, double setpoint) noexcept;

/// Sum of stage costs over records 0..m_steps inclusive.
double evaluate_cost(std::span<const SimulationRecord> records, const CostWeights& weights,
                     double setpoint);

struct ComparisonTable {
    std::vector<std::uint64_t> seeds;
    std::vector<Strategy> strategies;
    /// cost[seed_index][strategy_index]; empty when that run diverged.
    std::vector<std::vector<std::optional<double>>> cost;

    std::optional<double> median(std::size_t strategy_index) const;
    /// Seeds where strategy a has strictly lower cost than b. A finished run
    /// beats a diverged one.
    int wins(std::size_t a, std::size_t b) const;
};

/// Called once per finished cell, possibly from a worker thread.
using CellObserver = std::function<void(std::uint64_t seed, Strategy, const SimulationResult&)>;

/// Runs every strategy on the same loss realizations, one per seed
/// (base_seed + i). Results are ordered by (seed, strategy) regardless of how
/// the work is spread over `jobs` threads.

ComparisonTable compare_strategies(const ClosedLoopSetup& setup, std::span<const Strategy> strategies,
                                   int n_seeds, std::uint64_t base_seed, int jobs = 1,
                                   const CellObserver& observer = {});

}  // namespace ncs
