#include "ncs/runtime.hpp"

#include "ncs/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace ncs {

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::predictive: return "predictive";
        case Strategy::hold_last: return "hold-last";
        case Strategy::zero_input: return "zero-input";
    }
    return "predictive";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "predictive") return Strategy::predictive;
    if (name == "hold-last") return Strategy::hold_last;
    if (name == "zero-input") return Strategy::zero_input;
    throw ConfigError("unknown strategy '" + name + "'");
}

void SimConfig::validate() const {
    if (!(sample_time > 0.0)) throw ConfigError("sim.sample_time must be > 0");
    if (steps < 1) throw ConfigError("sim.duration must cover at least one sample");
    if (truth_substeps < 1) throw ConfigError("sim.truth_substeps must be >= 1");
    if (!std::isfinite(x0)) throw ConfigError("sim.x0 must be finite");
}

void CostWeights::validate() const {
    if (!(q_c >= 0.0) || !(r_c >= 0.0)) throw ConfigError("cost weights must be >= 0");
    if (m_steps < 1) throw ConfigError("cost.m_steps must be >= 1");
}

int predictor_substeps(const PredictorConfig& cfg, double sample_time) {
    const double ratio = sample_time / cfg.delta;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * ratio) {
        throw ConfigError("sample_time must be an integer multiple of predictor.delta");
    }
    return static_cast<int>(n);
}

double truth_rk4_step(const SystemDynamics& plant, double x, double u, double theta, double h) {
    auto slope = [&](double state, int stage) {
        try {
            return h * eval_rhs(plant, state, u, theta);
        } catch (const DomainError& e) {
            throw IntegrationDomainError(stage, e);
        }
    };
    const double k1 = slope(x, 1);
    const double k2 = slope(x + 0.5 * k1, 2);
    const double k3 = slope(x + 0.5 * k2, 3);
    const double k4 = slope(x + k3, 4);
    const double next = x + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    plant.require_in_domain(next, "plant state");
    return next;
}

double stage_cost(const SimulationRecord& r, const CostWeights& w, double setpoint) noexcept {
    const double e = w.raw_state ? r.x_true : r.x_true - setpoint;
    return w.q_c * e * e + w.r_c * r.u * r.u;
}

double evaluate_cost(std::span<const SimulationRecord> records, const CostWeights& weights,
                     double setpoint) {
    weights.validate();
    if (records.empty()) throw Error("evaluate_cost: no records");
    if (static_cast<std::size_t>(weights.m_steps) >= records.size()) {
        throw Error("evaluate_cost: horizon of " + std::to_string(weights.m_steps) +
                    " steps needs " + std::to_string(weights.m_steps + 1) + " records, got " +
                    std::to_string(records.size()));
    }
    double j = 0.0;
    for (long i = 0; i <= weights.m_steps; ++i) {
        j += stage_cost(records[static_cast<std::size_t>(i)], weights, setpoint);
    }
    return j;
}

namespace {

class Actuator {
public:
    Actuator(const ClosedLoopSetup& setup, Strategy strategy)
        : setup_(setup),
          strategy_(strategy),
          horizon_(setup.predictor.horizon),
          substeps_(strategy == Strategy::predictive
                        ? predictor_substeps(setup.predictor, setup.sim.sample_time)
                        : 1),
          last_u_(setup.sim.initial_input) {}

    /// Decides the input for interval k and fills the bookkeeping fields of rec.
    void step(long k, double measurement, int s, SimulationRecord& rec) {
        if (s == 1) {
            age_ = 0;
        } else {
            literal_offset_ = std::min(2 * age_ + 1, horizon_);
            age_ = std::min(age_ + 1, horizon_);
        }
        rec.s = s;
        rec.buffer_age = age_;

        switch (strategy_) {
            case Strategy::predictive:
                predictive(k, measurement, s, rec);
                break;
            case Strategy::hold_last:
                rec.u = s == 1 ? setup_.controller(measurement) : last_u_;
                break;
            case Strategy::zero_input:
                rec.u = s == 1 ? setup_.controller(measurement) : 0.0;
                break;
        }
        last_u_ = rec.u;
    }

private:
    void predictive(long k, double measurement, int s, SimulationRecord& rec) {
        if (s == 1) {
            traj_ = predict_trajectory(setup_.predictor, setup_.plant, measurement,
                                       setup_.controller, substeps_);
            traj_->origin_step = k;
        }
        if (!traj_) {
            rec.u = setup_.sim.initial_input;
            return;
        }
        const long aligned = std::min<long>(k - traj_->origin_step, horizon_);
        const auto offset = static_cast<std::size_t>(
            s == 1 ? 0 : (setup_.sim.step4_literal ? literal_offset_ : aligned));
        rec.u = traj_->inputs[offset];
        rec.x_pred = traj_->predicted_states[offset];
    }

    const ClosedLoopSetup& setup_;
    Strategy strategy_;
    int horizon_;
    int substeps_;
    int age_ = 0;
    int literal_offset_ = 0;
    double last_u_;
    std::optional<ControlTrajectory> traj_;
};

}  // namespace

SimulationResult run_closed_loop(const ClosedLoopSetup& setup, Strategy strategy) {
    setup.sim.validate();
    setup.predictor.validate();
    setup.cost.validate();
    setup.plant.require_in_domain(setup.sim.x0, "sim.x0");

    const auto& sim = setup.sim;
    const double setpoint = setup.controller.lyapunov().setpoint;
    const double h = sim.sample_time / sim.truth_substeps;

    Actuator actuator(setup, strategy);
    LossChannel channel(setup.loss);

    SimulationResult result;
    result.records.reserve(static_cast<std::size_t>(sim.steps) + 1);

    double x = sim.x0;
    double running = 0.0;
    try {
        for (long k = 0; k <= sim.steps; ++k) {
            SimulationRecord rec;
            rec.k = k;
            rec.t = static_cast<double>(k) * sim.sample_time;
            rec.x_true = x;
            actuator.step(k, x, channel.sample(k), rec);
            running += stage_cost(rec, setup.cost, setpoint);
            rec.running_cost = running;
            result.records.push_back(rec);

            if (k == sim.steps) break;
            for (int j = 0; j < sim.truth_substeps; ++j) {
                const double t = rec.t + j * h;
                x = truth_rk4_step(setup.plant, x, rec.u, sim.theta(t), h);
            }
        }
    } catch (const TraceExhausted&) {
        throw;
    } catch (const Error& e) {
        result.divergence = e.what();
    }
    return result;
}

std::optional<double> ComparisonTable::median(std::size_t strategy_index) const {
    std::vector<double> v;
    for (const auto& row : cost) {
        if (row[strategy_index]) v.push_back(*row[strategy_index]);
    }
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int ComparisonTable::wins(std::size_t a, std::size_t b) const {
    int count = 0;
    for (const auto& row : cost) {
        const auto& ca = row[a];
        const auto& cb = row[b];
        if (ca && (!cb || *ca < *cb)) ++count;
    }
    return count;
}

ComparisonTable compare_strategies(const ClosedLoopSetup& setup, std::span<const Strategy> strategies,
                                   int n_seeds, std::uint64_t base_seed, int jobs,
                                   const CellObserver& observer) {
    if (n_seeds < 1) throw ConfigError("compare needs n_seeds >= 1");
    if (strategies.empty()) throw ConfigError("compare needs at least one strategy");

    ComparisonTable table;
    table.strategies.assign(strategies.begin(), strategies.end());
    for (int i = 0; i < n_seeds; ++i) table.seeds.push_back(base_seed + static_cast<std::uint64_t>(i));
    table.cost.assign(table.seeds.size(),
                      std::vector<std::optional<double>>(strategies.size()));

    const std::size_t cells = table.seeds.size() * strategies.size();
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t c = next++; c < cells; c = next++) {
            const std::size_t si = c / strategies.size();
            const std::size_t st = c % strategies.size();
            try {
                ClosedLoopSetup cell = setup;
                cell.loss.seed = table.seeds[si];
                const auto res = run_closed_loop(cell, strategies[st]);
                if (observer) observer(table.seeds[si], strategies[st], res);
                if (!res.diverged()) {
                    table.cost[si][st] = evaluate_cost(res.records, cell.cost,
                                                       cell.controller.lyapunov().setpoint);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = cells;
            }
        }
    };

    {
        const int n_threads = std::clamp(jobs, 1, static_cast<int>(cells));
        std::vector<std::jthread> pool;
        for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);
    return table;
}

}  // namespace ncs
