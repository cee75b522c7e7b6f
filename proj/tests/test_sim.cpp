#include <cmath>
#include <vector>

#include <doctest.h>

#include "extruder/errors.hpp"
#include "extruder/sim.hpp"

using namespace extruder;
using doctest::Approx;

namespace {

ScenarioConfig scenario(Mode mode, double horizon, Perturbation pert = {0.1, 3.5})
{
    ScenarioConfig cfg = default_scenario();
    cfg.mode = mode;
    cfg.horizon = horizon;
    cfg.pert = pert;
    return cfg;
}

bool bit_identical(const TimeSeries& a, const TimeSeries& b)
{
    if (a.rows.size() != b.rows.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        const auto& r = a.rows[k];
        const auto& s = b.rows[k];
        if (r.t != s.t || r.x != s.x || r.U != s.U || r.U_eff != s.U_eff || r.P != s.P || r.sigma != s.sigma ||
            r.D != s.D || r.dDdt != s.dDdt || r.flow != s.flow || r.F != s.F || r.e != s.e) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("mode names")
{
    for (Mode m : {Mode::open_loop, Mode::uncompensated, Mode::compensated_full, Mode::compensated_state_only,
                   Mode::compensated_estimated, Mode::delay_free}) {
        CHECK(mode_from_string(to_string(m)) == m);
    }
    CHECK(to_string(Mode::compensated_full) == "compensated-full");
    CHECK_THROWS_AS(mode_from_string("compensated"), ConfigError);
}

TEST_CASE("default scenario")
{
    auto cfg = default_scenario();
    CHECK(cfg.mode == Mode::compensated_full);
    CHECK(cfg.setpoint.x_star == 0.16);
    CHECK(cfg.setpoint.v_max == 0.9);
    CHECK(cfg.setpoint.S == Approx(36.3195).epsilon(1e-4));
    CHECK(cfg.x0 == 0.1);
    CHECK(cfg.tau == 1e-4);
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.x0 = 0.2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.tau = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.horizon = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.setpoint.S = 6.0;
    CHECK_THROWS_AS(bad.validate(), NoPositiveRootError);
}

TEST_CASE("delay-free run settles quickly")
{
    auto ts = run_scenario(scenario(Mode::delay_free, 1.5, {0.0, 0.0}));
    bool monotone = true;
    for (std::size_t k = 1; k < ts.rows.size(); ++k) {
        monotone = monotone && std::abs(ts.rows[k].e) <= std::abs(ts.rows[k - 1].e) + 4e-16;
    }
    CHECK(monotone);
    const auto at_one = static_cast<std::size_t>(std::llround(1.0 / ts.tau));
    CHECK(std::abs(ts.rows[at_one].e) < 1e-4);
    CHECK(ts.rows[at_one].D == 0.0);
}

TEST_CASE("compensated run converges with the delay rate below one")
{
    auto ts = run_scenario(scenario(Mode::compensated_full, 5.0));
    auto m = run_metrics(ts);
    REQUIRE(m.settling_time);
    CHECK(tail_error(ts) < 1e-3);
    CHECK(ts.monitors.max_F < 1.0);
    CHECK(ts.monitors.min_denominator > 0.0);
    CHECK(ts.monitors.max_dDdt < 1.0);
    CHECK(ts.monitors.max_delay <= ts.monitors.delay_bound);
    REQUIRE(ts.monitors.backstepping_residual);
    CHECK(*ts.monitors.backstepping_residual < 1e-12);
}

TEST_CASE("uncompensated run does not settle")
{
    auto ts = run_scenario(scenario(Mode::uncompensated, 5.0));
    CHECK_FALSE(run_metrics(ts).settling_time);
    CHECK(tail_error(ts) > 5e-3);
}

TEST_CASE("time series invariants")
{
    for (Mode m : {Mode::open_loop, Mode::uncompensated, Mode::compensated_full, Mode::compensated_state_only,
                   Mode::compensated_estimated, Mode::delay_free}) {
        auto cfg = scenario(m, 0.5);
        auto ts = run_scenario(cfg);
        CAPTURE(to_string(m));
        REQUIRE(ts.rows.size() == 5001);
        bool ok = true;
        for (std::size_t k = 0; k < ts.rows.size(); ++k) {
            const auto& r = ts.rows[k];
            ok = ok && r.t == Approx(static_cast<double>(k) * cfg.tau).epsilon(1e-12);
            ok = ok && r.x >= 0.0 && r.x <= 0.2;
            ok = ok && r.U >= 0.0 && r.U <= cfg.setpoint.v_max;
            ok = ok && r.e == r.x - cfg.setpoint.x_star;
            if (k > 0) {
                ok = ok && r.t > ts.rows[k - 1].t;
            }
        }
        CHECK(ok);
        CHECK(ts.rows.front().x == cfg.x0);
    }
}

TEST_CASE("state-only mode runs the unperturbed plant")
{
    auto ts = run_scenario(scenario(Mode::compensated_state_only, 0.5));
    for (std::size_t k = 0; k < ts.rows.size(); k += 97) {
        CHECK(ts.rows[k].D == Approx((0.2 - ts.rows[k].x) / 0.9).epsilon(1e-12));
    }
}

TEST_CASE("determinism")
{
    auto cfg = scenario(Mode::compensated_full, 0.5);
    CHECK(bit_identical(run_scenario(cfg), run_scenario(cfg)));
}

TEST_CASE("halving the step changes the trajectory at first order")
{
    auto final_x = [](Mode mode, double tau) {
        auto cfg = scenario(mode, 0.3);
        cfg.tau = tau;
        return run_scenario(cfg).rows.back().x;
    };
    // Compensated run: smooth in tau, successive differences halve.
    const double a = final_x(Mode::compensated_full, 2e-4);
    const double b = final_x(Mode::compensated_full, 1e-4);
    const double c = final_x(Mode::compensated_full, 5e-5);
    CAPTURE(a - b);
    CAPTURE(b - c);
    CHECK(std::abs(a - b) / std::abs(b - c) == Approx(2.0).epsilon(0.25));

    // Open loop: the input step at t = 0 reaches the interface at an off-grid time, so the
    // error depends on where it falls between samples; it stays inside an O(tau) envelope.
    const double fine = final_x(Mode::open_loop, 2.5e-5);
    for (double tau : {4e-4, 2e-4, 1e-4}) {
        CHECK(std::abs(final_x(Mode::open_loop, tau) - fine) < 0.05 * tau);
    }
}

TEST_CASE("run comparison")
{
    auto full = run_scenario(scenario(Mode::compensated_full, 5.0, {0.4, 0.4}));
    auto same = compare_runs(full, full);
    CHECK(same.max_abs_error_diff == 0.0);
    CHECK(same.effort_diff == 0.0);
    REQUIRE(same.settling_diff);
    CHECK(*same.settling_diff == 0.0);

    auto est = run_scenario(scenario(Mode::compensated_estimated, 5.0, {0.4, 0.4}));
    auto c = compare_runs(full, est);
    REQUIRE(c.a.settling_time);
    REQUIRE(c.b.settling_time);
    CHECK(*c.b.settling_time >= *c.a.settling_time);

    auto unc = run_scenario(scenario(Mode::uncompensated, 5.0, {0.4, 0.4}));
    auto d = compare_runs(full, unc);
    CHECK_FALSE(d.b.settling_time);
    CHECK_FALSE(d.settling_diff);

    auto shorter = run_scenario(scenario(Mode::compensated_full, 1.0, {0.4, 0.4}));
    CHECK_THROWS_AS(compare_runs(full, shorter), ConfigError);
}

TEST_CASE("metrics")
{
    TimeSeries ts;
    ts.tau = 0.5;
    ts.v_star = 0.2;
    for (int k = 0; k < 5; ++k) {
        TimeSeriesRow r;
        r.t = 0.5 * k;
        r.e = k < 2 ? 0.01 : 0.0;
        r.U = 0.3;
        ts.rows.push_back(r);
    }
    auto m = run_metrics(ts);
    REQUIRE(m.settling_time);
    CHECK(*m.settling_time == 1.0);
    CHECK(m.max_abs_error == 0.01);
    CHECK(m.effort == Approx(0.1 * 0.5 * 5).epsilon(0.25));
}

TEST_CASE("batch runs keep order and map failures to exit codes")
{
    std::vector<ScenarioConfig> configs;
    configs.push_back(scenario(Mode::compensated_full, 0.2));
    configs.push_back(scenario(Mode::compensated_full, 0.2, {0.9, 60.0}));
    configs.push_back(scenario(Mode::delay_free, 0.2));
    configs.push_back(scenario(Mode::open_loop, 0.2));
    auto results = run_batch(configs, 3);
    REQUIRE(results.size() == 4);
    CHECK(results[0].series);
    CHECK(results[0].exit_code == 0);
    CHECK_FALSE(results[1].series);
    CHECK(results[1].exit_code == 2);
    CHECK_FALSE(results[1].error.empty());
    CHECK(results[2].series);
    CHECK(results[3].series);
    CHECK(bit_identical(*results[0].series, run_scenario(configs[0])));
}

TEST_CASE("exit codes")
{
    CHECK(exit_code_for(ConfigError("x")) == 1);
    CHECK(exit_code_for(ParameterError("x")) == 1);
    CHECK(exit_code_for(FeasibilityError("x")) == 2);
    CHECK(exit_code_for(SingularityError("x")) == 3);
    CHECK(exit_code_for(DomainError("x")) == 3);
    CHECK(exit_code_for(SolverError("x")) == 3);
}
