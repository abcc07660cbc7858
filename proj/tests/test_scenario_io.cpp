#include "ncs/csv_io.hpp"
#include "ncs/errors.hpp"
#include "ncs/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace ncs;
using nlohmann::json;

TEST_CASE("reference scenario is valid and round-trips through JSON") {
    const auto s = reference_scenario();
    CHECK_NOTHROW(s.validate());
    CHECK(s.steps() == 1800);
    const json j = to_json(s);
    const auto back = scenario_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(s.plant.alpha1 == 0.631811);
    CHECK(s.plant.a1 == 1.9625e-3);
    CHECK(s.plant.p1 == 2e5);
    CHECK(s.plant.rho == 3.49772);
    CHECK(s.plant.vol == 2.0);
    CHECK(s.cost.r_c == 1e6);
    CHECK(s.theta(0.0) == 0.175);
    CHECK(s.theta(1800.0) == 0.185);
}

TEST_CASE("partial configs inherit reference values") {
    const auto s = scenario_from_json(json{{"predictor", {{"gamma", 0.05}}}, {"sim", {{"theta", 0.1}}}});
    CHECK(s.predictor.gamma == 0.05);
    CHECK(s.predictor.horizon == 10);
    CHECK(s.theta.is_constant());
    CHECK(s.theta(123.0) == 0.1);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(scenario_from_json(json{{"predictor", {{"gama", 0.1}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"plants", json::object()}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"sim", {{"theta", json::array({{{"t", 0}, {"v", 1}}})}}}}),
                    ConfigError);
}

TEST_CASE("cross-field validation") {
    CHECK_THROWS_AS(scenario_from_json(json{{"sim", {{"x0", 2.5e5}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"controller", {{"setpoint", 9e4}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"cost", {{"m_steps", 5000}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"predictor", {{"gamma", 1.2}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"predictor", {{"delta", 0.3}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"loss", {{"kind", "bursty"}}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"strategies", {"predictive", "oracle"}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(json{{"plant", {{"p1", "high"}}}}), ConfigError);
}

TEST_CASE("overrides") {
    json tree = to_json(reference_scenario());
    apply_override(tree, "predictor.gamma=0.2");
    apply_override(tree, "loss.kind=none");
    apply_override(tree, "sim.theta=0");
    CHECK(tree["predictor"]["gamma"] == 0.2);
    CHECK(tree["loss"]["kind"] == "none");
    const auto s = scenario_from_json(tree);
    CHECK(s.loss.kind == LossModel::Kind::none);
    CHECK(s.theta(5.0) == 0.0);

    CHECK_THROWS_AS(apply_override(tree, "predictor.gama=0.2"), ConfigError);
    CHECK_THROWS_AS(apply_override(tree, "predictor=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(tree, "novalue"), ConfigError);
}

TEST_CASE("loss shorthand") {
    json tree = to_json(reference_scenario());
    apply_loss_shorthand(tree, "bernoulli:0.25");
    CHECK(tree["loss"]["kind"] == "bernoulli");
    CHECK(tree["loss"]["p"] == 0.25);
    apply_loss_shorthand(tree, "gilbert-elliott:0.1,0.2,0.9");
    CHECK(tree["loss"]["p_g2b"] == 0.1);
    CHECK(tree["loss"]["loss_in_bad"] == 0.9);
    apply_loss_shorthand(tree, "trace:some/file.txt");
    CHECK(tree["loss"]["trace_path"] == "some/file.txt");
    apply_loss_shorthand(tree, "none");
    CHECK(tree["loss"]["kind"] == "none");
    CHECK_THROWS_AS(apply_loss_shorthand(tree, "bernoulli:abc"), ConfigError);
    CHECK_THROWS_AS(apply_loss_shorthand(tree, "gilbert-elliott:0.1"), ConfigError);
    CHECK_THROWS_AS(apply_loss_shorthand(tree, "markov:1"), ConfigError);
}

TEST_CASE("trace loss file is loaded by setup") {
    const auto path = std::filesystem::temp_directory_path() / "ncs_trace_test.txt";
    {
        std::ofstream f(path);
        f << "1\n0\n\n1\n";
    }
    CHECK(read_loss_trace(path.string()) == std::vector<int>{1, 0, 1});
    auto s = reference_scenario();
    s.loss.kind = LossModel::Kind::trace;
    s.loss.trace_wrap = true;
    s.loss_trace_path = path.string();
    const auto setup = s.setup();
    CHECK(setup.loss.trace == std::vector<int>{1, 0, 1});
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_loss_trace(path.string()), ConfigError);
}

TEST_CASE("doubles format with round-trip precision") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-300, 300);
    for (int n = 0; n < 2000; ++n) {
        const double v = std::ldexp(mant(rng), ex(rng));
        REQUIRE(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(145000.0) == "145000");
    CHECK_THROWS(parse_double("1.0x"));
}

TEST_CASE("trace CSV parses back losslessly") {
    auto s = reference_scenario();
    s.duration = 200.0;
    s.cost.m_steps = 100;
    const auto res = run_closed_loop(s.setup(), Strategy::predictive);
    std::stringstream ss;
    write_trace(ss, res.records);
    const std::string text = ss.str();
    CHECK(text.rfind("k,t,x_true,x_pred,s,i,u,J_running\n", 0) == 0);

    const auto back = read_trace(ss);
    REQUIRE(back.size() == res.records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].k == res.records[i].k);
        CHECK(back[i].t == res.records[i].t);
        CHECK(back[i].x_true == res.records[i].x_true);
        CHECK(back[i].x_pred == res.records[i].x_pred);
        CHECK(back[i].s == res.records[i].s);
        CHECK(back[i].buffer_age == res.records[i].buffer_age);
        CHECK(back[i].u == res.records[i].u);
        CHECK(back[i].running_cost == res.records[i].running_cost);
    }
}

TEST_CASE("missing predicted state is an empty field") {
    SimulationRecord r;
    r.k = 3;
    r.t = 6.0;
    r.x_true = 1.5e5;
    r.s = 0;
    r.buffer_age = 2;
    r.u = 0.5;
    r.running_cost = 10.0;
    std::stringstream ss;
    write_trace(ss, {r});
    CHECK(ss.str() == "k,t,x_true,x_pred,s,i,u,J_running\n3,6,150000,,0,2,0.5,10\n");
}

TEST_CASE("comparison CSV layout") {
    ComparisonTable t;
    t.strategies = {Strategy::hold_last, Strategy::predictive};
    t.seeds = {4, 5};
    t.cost = {{1.5, 0.5}, {std::nullopt, 2.0}};
    std::stringstream ss;
    write_comparison(ss, t);
    CHECK(ss.str() == "seed,hold-last,predictive\n4,1.5,0.5\n5,diverged,2\n");
}

TEST_CASE("calibration samples CSV") {
    std::stringstream ss("pair_id,predicted,measured\na,1,1.5\nb,3,3.1\na,1,1.5\nb,3,3.1\n");
    const auto pairs = read_calibration_samples(ss);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].predicted == std::vector<double>{1.0, 1.0});
    CHECK(pairs[1].measured == std::vector<double>{3.1, 3.1});

    std::stringstream bad_header("id,pred,meas\n1,1,1\n");
    CHECK_THROWS_AS(read_calibration_samples(bad_header), CalibrationError);
    std::stringstream bad_row("pair_id,predicted,measured\n1,1\n");
    CHECK_THROWS_AS(read_calibration_samples(bad_row), CalibrationError);
    std::stringstream empty("pair_id,predicted,measured\n");
    CHECK_THROWS_AS(read_calibration_samples(empty), CalibrationError);
}
