#include "ncs/scenario.hpp"

#include "ncs/csv_io.hpp"
#include "ncs/errors.hpp"

#include <cmath>
#include <fstream>

namespace ncs {

using nlohmann::json;

Scenario reference_scenario() {
    Scenario s;
    s.name = "tank-paper";
    s.plant = TankParams{};
    s.plant.m2 = 1.0;

    s.predictor = PredictorConfig{2.0, 0.0, 10};

    s.lyapunov = LyapunovSpec{1.45e5, 5.0e4};
    s.controller = ControllerConfig{1e-15, 0.0, 1.0, true};

    s.loss = LossModel::bernoulli(0.3, 42);

    s.x0 = 1.2e5;
    s.sample_time = 2.0;
    s.duration = 3600.0;
    s.truth_substeps = 20;
    s.theta = UncertaintySignal::schedule({{0.0, 0.175}, {1800.0, 0.185}});

    s.cost = CostWeights{1.0, 1e6, 1800, false};
    s.strategies = {Strategy::hold_last, Strategy::predictive};
    return s;
}

std::vector<std::string> builtin_scenario_names() { return {"tank-paper"}; }

long Scenario::steps() const {
    const double ratio = duration / sample_time;
    const double n = std::round(ratio);
    if (!(n >= 1.0) || std::abs(ratio - n) > 1e-9 * ratio) {
        throw ConfigError("sim.duration must be a positive integer multiple of sim.sample_time");
    }
    return static_cast<long>(n);
}

void Scenario::validate() const {
    plant.validate();
    predictor.validate();
    controller.validate();
    if (!(lyapunov.scale > 0.0)) throw ConfigError("controller.lyapunov_scale must be > 0");
    if (loss.kind != LossModel::Kind::trace || loss_trace_path.empty()) loss.validate();

    const auto dom = plant.state_domain();
    if (!dom.contains(x0)) throw ConfigError("sim.x0 lies outside the plant domain");
    if (!(lyapunov.setpoint > dom.lo && lyapunov.setpoint < dom.hi)) {
        throw ConfigError("controller.setpoint must lie inside the plant domain");
    }
    if (!(sample_time > 0.0)) throw ConfigError("sim.sample_time must be > 0");
    if (truth_substeps < 1) throw ConfigError("sim.truth_substeps must be >= 1");
    cost.validate();
    if (cost.m_steps > steps()) throw ConfigError("cost.m_steps exceeds the simulated steps");
    if (strategies.empty()) throw ConfigError("strategies must not be empty");
    predictor_substeps(predictor, sample_time);
}

ClosedLoopSetup Scenario::setup() const {
    validate();
    auto dyn = tank_dynamics(plant);

    LossModel channel = loss;
    if (channel.kind == LossModel::Kind::trace && channel.trace.empty()) {
        if (loss_trace_path.empty()) throw ConfigError("loss.kind = trace needs loss.trace_path");
        channel.trace = read_loss_trace(loss_trace_path);
    }
    channel.validate();

    SimConfig sim;
    sim.x0 = x0;
    sim.sample_time = sample_time;
    sim.steps = steps();
    sim.truth_substeps = truth_substeps;
    sim.theta = theta;
    sim.step4_literal = step4_literal;
    sim.initial_input = initial_input;

    SontagController ctrl(dyn, lyapunov, controller);
    return ClosedLoopSetup{std::move(dyn), predictor, std::move(ctrl), std::move(channel), sim, cost};
}

json to_json(const Scenario& s) {
    json theta;
    if (s.theta.is_constant()) {
        theta = s.theta.breakpoints().empty() ? 0.0 : s.theta.breakpoints().front().value;
    } else {
        theta = json::array();
        for (const auto& bp : s.theta.breakpoints()) theta.push_back({{"t", bp.time}, {"value", bp.value}});
    }
    json strategies = json::array();
    for (auto st : s.strategies) strategies.push_back(to_string(st));

    return json{
        {"name", s.name},
        {"plant",
         {{"alpha1", s.plant.alpha1},
          {"alpha2", s.plant.alpha2},
          {"a1", s.plant.a1},
          {"a2", s.plant.a2},
          {"p1", s.plant.p1},
          {"p2", s.plant.p2},
          {"rho", s.plant.rho},
          {"vol", s.plant.vol},
          {"m2", s.plant.m2},
          {"margin", s.plant.margin}}},
        {"predictor",
         {{"delta", s.predictor.delta}, {"gamma", s.predictor.gamma}, {"horizon", s.predictor.horizon}}},
        {"controller",
         {{"setpoint", s.lyapunov.setpoint},
          {"lyapunov_scale", s.lyapunov.scale},
          {"lgv_threshold", s.controller.lgv_threshold},
          {"u_min", s.controller.u_min},
          {"u_max", s.controller.u_max},
          {"feedforward", s.controller.feedforward}}},
        {"loss",
         {{"kind", to_string(s.loss.kind)},
          {"p", s.loss.p_loss},
          {"p_g2b", s.loss.p_g2b},
          {"p_b2g", s.loss.p_b2g},
          {"loss_in_bad", s.loss.loss_in_bad},
          {"seed", s.loss.seed},
          {"trace", s.loss.trace},
          {"trace_path", s.loss_trace_path},
          {"trace_wrap", s.loss.trace_wrap}}},
        {"sim",
         {{"x0", s.x0},
          {"sample_time", s.sample_time},
          {"duration", s.duration},
          {"truth_substeps", s.truth_substeps},
          {"theta", theta},
          {"step4_literal", s.step4_literal},
          {"initial_input", s.initial_input}}},
        {"cost",
         {{"q_c", s.cost.q_c},
          {"r_c", s.cost.r_c},
          {"m_steps", s.cost.m_steps},
          {"raw_state", s.cost.raw_state}}},
        {"strategies", strategies},
    };
}

namespace {

// Overlays `user` onto `base`, rejecting keys that base does not know.
// Arrays and scalars replace wholesale.
void merge_strict(json& base, const json& user, const std::string& path) {
    if (!user.is_object()) {
        throw ConfigError("'" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
    }
    for (const auto& [key, value] : user.items()) {
        const std::string full = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) throw ConfigError("unknown config key '" + full + "'");
        if (base[key].is_object()) {
            merge_strict(base[key], value, full);
        } else {
            base[key] = value;
        }
    }
}

template <typename T>
T get(const json& j, const char* section, const char* key) {
    try {
        return j.at(section).at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + section + "." + key + "': " + e.what());
    }
}

UncertaintySignal theta_from_json(const json& j) {
    if (j.is_number()) return UncertaintySignal::constant(j.get<double>());
    if (!j.is_array()) throw ConfigError("sim.theta must be a number or a list of {t, value}");
    std::vector<UncertaintySignal::Breakpoint> pts;
    for (const auto& item : j) {
        if (!item.is_object()) throw ConfigError("sim.theta entries must be objects");
        for (const auto& [key, _] : item.items()) {
            if (key != "t" && key != "value") throw ConfigError("unknown config key 'sim.theta[]." + key + "'");
        }
        try {
            pts.push_back({item.at("t").get<double>(), item.at("value").get<double>()});
        } catch (const json::exception& e) {
            throw ConfigError(std::string("sim.theta entry: ") + e.what());
        }
    }
    return UncertaintySignal::schedule(std::move(pts));
}

}  // namespace

Scenario scenario_from_json(const json& user) {
    json tree = to_json(reference_scenario());
    merge_strict(tree, user, "");

    Scenario s;
    try {
        s.name = tree.at("name").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key 'name': ") + e.what());
    }

    s.plant.alpha1 = get<double>(tree, "plant", "alpha1");
    s.plant.alpha2 = get<double>(tree, "plant", "alpha2");
    s.plant.a1 = get<double>(tree, "plant", "a1");
    s.plant.a2 = get<double>(tree, "plant", "a2");
    s.plant.p1 = get<double>(tree, "plant", "p1");
    s.plant.p2 = get<double>(tree, "plant", "p2");
    s.plant.rho = get<double>(tree, "plant", "rho");
    s.plant.vol = get<double>(tree, "plant", "vol");
    s.plant.m2 = get<double>(tree, "plant", "m2");
    s.plant.margin = get<double>(tree, "plant", "margin");

    s.predictor.delta = get<double>(tree, "predictor", "delta");
    s.predictor.gamma = get<double>(tree, "predictor", "gamma");
    s.predictor.horizon = get<int>(tree, "predictor", "horizon");

    s.lyapunov.setpoint = get<double>(tree, "controller", "setpoint");
    s.lyapunov.scale = get<double>(tree, "controller", "lyapunov_scale");
    s.controller.lgv_threshold = get<double>(tree, "controller", "lgv_threshold");
    s.controller.u_min = get<double>(tree, "controller", "u_min");
    s.controller.u_max = get<double>(tree, "controller", "u_max");
    s.controller.feedforward = get<bool>(tree, "controller", "feedforward");

    s.loss.kind = loss_kind_from_string(get<std::string>(tree, "loss", "kind"));
    s.loss.p_loss = get<double>(tree, "loss", "p");
    s.loss.p_g2b = get<double>(tree, "loss", "p_g2b");
    s.loss.p_b2g = get<double>(tree, "loss", "p_b2g");
    s.loss.loss_in_bad = get<double>(tree, "loss", "loss_in_bad");
    s.loss.seed = get<std::uint64_t>(tree, "loss", "seed");
    s.loss.trace = get<std::vector<int>>(tree, "loss", "trace");
    s.loss_trace_path = get<std::string>(tree, "loss", "trace_path");
    s.loss.trace_wrap = get<bool>(tree, "loss", "trace_wrap");

    s.x0 = get<double>(tree, "sim", "x0");
    s.sample_time = get<double>(tree, "sim", "sample_time");
    s.duration = get<double>(tree, "sim", "duration");
    s.truth_substeps = get<int>(tree, "sim", "truth_substeps");
    s.theta = theta_from_json(tree.at("sim").at("theta"));
    s.step4_literal = get<bool>(tree, "sim", "step4_literal");
    s.initial_input = get<double>(tree, "sim", "initial_input");

    s.cost.q_c = get<double>(tree, "cost", "q_c");
    s.cost.r_c = get<double>(tree, "cost", "r_c");
    s.cost.m_steps = get<long>(tree, "cost", "m_steps");
    s.cost.raw_state = get<bool>(tree, "cost", "raw_state");

    const auto& strategies = tree.at("strategies");
    if (!strategies.is_array()) throw ConfigError("strategies must be a list");
    for (const auto& st : strategies) {
        if (!st.is_string()) throw ConfigError("strategies entries must be strings");
        s.strategies.push_back(strategy_from_string(st.get<std::string>()));
    }

    s.validate();
    return s;
}

Scenario load_scenario(const std::string& name_or_path) {
    if (name_or_path == "tank-paper") return reference_scenario();

    std::ifstream in(name_or_path);
    if (!in) throw ConfigError("cannot open scenario '" + name_or_path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("scenario '" + name_or_path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

void apply_override(json& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json* node = &tree;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot - start);
        if (!node->is_object() || !node->contains(part)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (node->is_object()) throw ConfigError("'" + key + "' is a section, not a value");

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    *node = std::move(value);
}

void apply_loss_shorthand(json& tree, const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto& loss = tree.at("loss");

    auto number = [&](const std::string& text) {
        try {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("--loss: bad number '" + text + "' in '" + spec + "'");
        }
    };

    if (kind == "none") {
        loss["kind"] = "none";
    } else if (kind == "bernoulli") {
        loss["kind"] = "bernoulli";
        loss["p"] = number(args);
    } else if (kind == "gilbert-elliott") {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            const auto comma = args.find(',', start);
            parts.push_back(args.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (parts.size() < 2 || parts.size() > 3) {
            throw ConfigError("--loss gilbert-elliott:G2B,B2G[,LOSS_IN_BAD]");
        }
        loss["kind"] = "gilbert-elliott";
        loss["p_g2b"] = number(parts[0]);
        loss["p_b2g"] = number(parts[1]);
        if (parts.size() == 3) loss["loss_in_bad"] = number(parts[2]);
    } else if (kind == "trace") {
        if (args.empty()) throw ConfigError("--loss trace:PATH needs a path");
        loss["kind"] = "trace";
        loss["trace_path"] = args;
    } else {
        throw ConfigError("unknown --loss kind '" + kind + "'");
    }
}

}  // namespace ncs
