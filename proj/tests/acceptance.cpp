// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "cli.hpp"
#include "ncs/controller.hpp"
#include "ncs/csv_io.hpp"
#include "ncs/errors.hpp"
#include "ncs/predictor.hpp"
#include "ncs/runtime.hpp"
#include "ncs/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace ncs;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %d. %s (%.3f s): %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SystemDynamics decay() {
    return SystemDynamics([](double x) { return -x; }, [](double) { return 0.0; },
                          [](double) { return 0.0; }, {-10.0, 10.0});
}

double decay_error(double h) {
    PredictorConfig cfg{h, 0.0, 1};
    const int n = static_cast<int>(std::lround(1.0 / h));
    double x = 1.0;
    for (int i = 0; i < n; ++i) x = predict_step(cfg, decay(), x, 0.0);
    return std::abs(x - std::exp(-1.0));
}

Outcome rk4_correctness() {
    const auto t0 = std::chrono::steady_clock::now();
    const double e1 = decay_error(0.1);
    const double e2 = decay_error(0.05);
    const double ratio = e1 / e2;
    const double secs = elapsed_since(t0);
    const bool pass = e1 < 1e-7 && ratio >= 14.0 && secs < 1.0;
    return {pass, fmt("|x10 - e^-1| = %.3e (limit 1e-7)", e1) + fmt(", halving ratio %.2f (>= 14)", ratio)};
}

Outcome gamma_zero_consistency() {
    auto s = reference_scenario();
    const auto dyn = tank_dynamics(s.plant);
    PredictorConfig cfg = s.predictor;
    cfg.gamma = 0.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> xs(s.plant.state_domain().lo, s.plant.state_domain().hi);
    std::uniform_real_distribution<double> us(0.0, 1.0);
    int mismatches = 0, rejected = 0;
    for (int n = 0; n < 10000;) {
        const double x = xs(rng), u = us(rng);
        double step = 0.0, plain = 0.0;
        try {
            step = predict_step(cfg, dyn, x, u);
            plain = x + rk4_increment(dyn, x, u, cfg.delta);
        } catch (const DomainError&) {
            ++rejected;
            continue;
        }
        if (step != plain) ++mismatches;
        ++n;
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches over 10000 states (" +
                                 std::to_string(rejected) + " draws left the domain and were redrawn)"};
}

Outcome calibration_oracles() {
    const double g = calibrate_gamma_one(std::vector<double>{1, 1}, std::vector<double>{1.5, 1.5});
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> level(1.0, 100.0), noise(-0.5, 0.5);
    std::uniform_int_distribution<int> len(1, 50);
    int sign_violations = 0, method_mismatch = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = len(rng);
        std::vector<double> pred(n), meas(n);
        for (int i = 0; i < n; ++i) {
            pred[i] = level(rng);
            meas[i] = pred[i] + noise(rng);
        }
        const auto one = calibration_report_one(pred, meas);
        if (one.gamma != 0.0 && (one.gamma > 0.0 ? 1 : -1) != one.zeta) ++sign_violations;
        const std::vector<SamplePair> single{{pred, meas}};
        if (calibration_report_two(single).gamma != one.gamma) ++method_mismatch;
    }
    const bool pass = g == 0.25 && sign_violations == 0 && method_mismatch == 0;
    return {pass, "gamma = " + format_double(g) + ", sign violations " + std::to_string(sign_violations) +
                      "/1000, method two (m = 1) mismatches " + std::to_string(method_mismatch) + "/1000"};
}

Outcome clf_negativity() {
    const auto s = reference_scenario();
    const auto dyn = tank_dynamics(s.plant);
    const auto lo = s.plant.state_domain().lo, hi = s.plant.state_domain().hi;
    int checked = 0, bad_identity = 0, non_negative = 0;
    double worst = 0.0;
    for (const bool ff : {s.controller.feedforward, !s.controller.feedforward}) {
        ControllerConfig cfg = s.controller;
        cfg.feedforward = ff;
        const double u_ff = ff ? feedforward_input(dyn, s.lyapunov, cfg) : 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = lo + (hi - lo) * i / 999.0;
            const auto d = effective_lie_derivatives(dyn, s.lyapunov, cfg, x);
            if (std::abs(d.lgv) <= cfg.lgv_threshold) continue;
            const double raw = u_ff + sontag_formula(d.lfv, d.lgv, cfg.lgv_threshold);
            if (raw < cfg.u_min || raw > cfg.u_max) continue;
            const double vdot = closed_loop_vdot(dyn, s.lyapunov, cfg, x);
            const double target = -std::sqrt(d.lfv * d.lfv + std::pow(d.lgv, 4));
            const double rel = std::abs(vdot - target) / std::abs(target);
            worst = std::max(worst, rel);
            if (rel > 1e-9) ++bad_identity;
            if (!(vdot < 0.0)) ++non_negative;
            ++checked;
        }
    }

    const LyapunovSpec origin{0.0, 1.0};
    const auto& p = s.plant;
    double worst_closed = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = lo + (hi - lo) * i / 999.0;
        const auto d = lie_derivatives(dyn, origin, x);
        const double lgv = (2.0 / p.vol) * p.alpha1 * p.a1 * x * x * std::sqrt(2.0 * (p.p1 - x) / p.rho);
        const double lfv = -(2.0 / p.vol) * p.alpha2 * p.a2 * p.m2 * x * x * std::sqrt(2.0 * (x - p.p2) / p.rho);
        if (lgv != 0.0) worst_closed = std::max(worst_closed, std::abs(d.lgv - lgv) / std::abs(lgv));
        if (lfv != 0.0) worst_closed = std::max(worst_closed, std::abs(d.lfv - lfv) / std::abs(lfv));
    }
    const bool pass = checked > 0 && bad_identity == 0 && non_negative == 0 && worst_closed <= 1e-12;
    return {pass, std::to_string(checked) + " unsaturated points, worst identity error " + fmt("%.2e", worst) +
                      ", Vdot >= 0 at " + std::to_string(non_negative) + ", closed-form mismatch " +
                      fmt("%.2e", worst_closed)};
}

Outcome loss_free_regulation() {
    auto s = reference_scenario();
    s.loss = LossModel::none();
    s.theta = UncertaintySignal::constant(0.0);
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_closed_loop(s.setup(), Strategy::predictive);
    const double secs = elapsed_since(t0);
    if (res.diverged()) return {false, "diverged: " + *res.divergence};
    const double sp = s.lyapunov.setpoint;
    const double ratio = std::abs(res.records.back().x_true - sp) / std::abs(s.x0 - sp);
    const bool pass = ratio < 0.01 && secs < 1.0 && res.records.back().t >= 3600.0 - 1e-9;
    return {pass, fmt("terminal/initial deviation %.3e (< 0.01)", ratio) + fmt(", run %.3f s", secs)};
}

Outcome strategy_comparison() {
    auto s = reference_scenario();
    s.loss = LossModel::bernoulli(0.3, s.loss.seed);
    const std::vector<Strategy> strategies{Strategy::hold_last, Strategy::predictive};
    const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const auto t0 = std::chrono::steady_clock::now();
    const auto table = compare_strategies(s.setup(), strategies, 50, s.loss.seed, jobs);
    const double secs = elapsed_since(t0);
    const auto m_hold = table.median(0), m_pred = table.median(1);
    const int wins = table.wins(1, 0);
    const bool pass = m_hold && m_pred && *m_pred < *m_hold && wins >= 30 && secs < 60.0;
    std::string detail = "median J predictive " + (m_pred ? fmt("%.6g", *m_pred) : std::string("n/a")) +
                         " vs hold-last " + (m_hold ? fmt("%.6g", *m_hold) : std::string("n/a")) +
                         ", predictive wins " + std::to_string(wins) + "/50 (>= 30)" + fmt(", %.2f s", secs);
    return {pass, detail};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    return ncs::cli::run(args, out, err);
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "ncs_acceptance_determinism";
    fs::remove_all(dir);
    const auto d = [&](const std::string& leaf) { return (dir / leaf).string(); };
    int bad_exit = 0;
    for (const char* sub : {"run_a", "run_b"})
        bad_exit += cli({"run", "--seed", "42", "--loss", "bernoulli:0.3", "--out", d(sub)}) != 0;
    bad_exit += cli({"compare", "--seeds", "6", "--jobs", "1", "--traces", "--out", d("cmp_serial")}) != 0;
    bad_exit += cli({"compare", "--seeds", "6", "--jobs", "4", "--traces", "--out", d("cmp_parallel")}) != 0;

    const std::string run_a = slurp(dir / "run_a/trace.csv");
    bool same = !run_a.empty() && run_a == slurp(dir / "run_b/trace.csv");
    same = same && slurp(dir / "cmp_serial/comparison.csv") == slurp(dir / "cmp_parallel/comparison.csv");
    int cells = 0;
    for (const auto& entry : fs::directory_iterator(dir / "cmp_serial/traces")) {
        const auto other = dir / "cmp_parallel/traces" / entry.path().filename();
        same = same && slurp(entry.path()) == slurp(other);
        ++cells;
    }
    // the fan-out cell for seed 42 must equal the stand-alone run
    same = same && slurp(dir / "cmp_serial/traces/seed_42_predictive.csv") == run_a;
    fs::remove_all(dir);
    const bool pass = bad_exit == 0 && same && cells == 12;
    return {pass, std::string(same ? "identical" : "differing") + " CSVs over 2 runs and " + std::to_string(cells) +
                      " compare cells (serial vs 4 threads)"};
}

Outcome buffer_age_law() {
    auto s = reference_scenario();
    s.duration = 400.0;
    s.cost.m_steps = 100;
    const long steps = s.steps();
    const int horizon = s.predictor.horizon;

    std::vector<std::vector<int>> patterns;
    patterns.push_back(std::vector<int>(steps + 1, 0));
    patterns.push_back(std::vector<int>(steps + 1, 1));
    {
        std::vector<int> first_only(steps + 1, 0);
        first_only[0] = 1;
        patterns.push_back(first_only);
    }
    for (int burst : {1, 5, 10, 11, 25}) {
        std::vector<int> p(steps + 1, 1);
        for (long k = 0; k <= steps; ++k) p[k] = (k % (burst + 1)) == 0 ? 1 : 0;
        patterns.push_back(p);
    }
    std::mt19937_64 rng(404);
    for (int n = 0; n < 20; ++n) {
        std::bernoulli_distribution keep(0.05 + 0.045 * n);
        std::vector<int> p(steps + 1);
        for (auto& b : p) b = keep(rng) ? 1 : 0;
        patterns.push_back(p);
    }

    long rows = 0;
    int violations = 0, max_age = 0, runs = 0;
    for (const auto& p : patterns) {
        for (bool literal : {false, true}) {
            for (Strategy st : {Strategy::predictive, Strategy::hold_last, Strategy::zero_input}) {
                auto sc = s;
                sc.loss = LossModel::from_trace(p, false);
                sc.step4_literal = literal;
                const auto res = run_closed_loop(sc.setup(), st);
                ++runs;
                for (const auto& r : res.records) {
                    ++rows;
                    max_age = std::max(max_age, r.buffer_age);
                    if (r.s == 1 && r.buffer_age != 0) ++violations;
                    if (r.buffer_age > horizon || r.buffer_age < 0) ++violations;
                }
            }
        }
    }
    return {violations == 0, std::to_string(runs) + " traces, " + std::to_string(rows) + " rows, max i = " +
                                 std::to_string(max_age) + " (N = " + std::to_string(horizon) + "), " +
                                 std::to_string(violations) + " violations"};
}

}  // namespace

int main() {
    report(1, "RK4 correctness", rk4_correctness);
    report(2, "predict_step with gamma = 0 equals the uncorrected update", gamma_zero_consistency);
    report(3, "calibration oracles", calibration_oracles);
    report(4, "CLF negativity", clf_negativity);
    report(5, "loss-free regulation", loss_free_regulation);
    report(6, "predictive vs hold-last under Bernoulli loss", strategy_comparison);
    report(7, "determinism", determinism);
    report(8, "buffer-age law", buffer_age_law);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
