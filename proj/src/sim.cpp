#include "extruder/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "extruder/errors.hpp"
#include "extruder/history.hpp"
#include "extruder/predictor.hpp"

namespace extruder {

namespace {

struct ModeName {
    Mode mode;
    std::string_view name;
};

constexpr ModeName kModeNames[] = {
    {Mode::open_loop, "open-loop"},
    {Mode::uncompensated, "uncompensated"},
    {Mode::compensated_full, "compensated-full"},
    {Mode::compensated_state_only, "compensated-state-only"},
    {Mode::compensated_estimated, "compensated-estimated"},
    {Mode::delay_free, "delay-free"},
};

bool uses_predictor(Mode m)
{
    return m == Mode::compensated_full || m == Mode::compensated_state_only || m == Mode::compensated_estimated;
}

}  // namespace

std::string_view to_string(Mode m)
{
    for (const auto& entry : kModeNames) {
        if (entry.mode == m) {
            return entry.name;
        }
    }
    return "unknown";
}

Mode mode_from_string(std::string_view name)
{
    for (const auto& entry : kModeNames) {
        if (entry.name == name) {
            return entry.mode;
        }
    }
    throw ConfigError(fmt::format("unknown mode '{}'", name));
}

void ScenarioConfig::validate() const
{
    params.validate();
    pert.validate();
    auto coeffs = derive_coefficients(params);
    validate_setpoint(coeffs, setpoint);
    if (!(x0 >= 0.0 && x0 < params.L)) {
        throw ConfigError(fmt::format("initial interface x0 = {} outside [0, {})", x0, params.L));
    }
    if (!(u_history0 >= 0.0 && u_history0 < 1.0)) {
        throw ConfigError(fmt::format("initial actuator state {} outside [0, 1)", u_history0));
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw ConfigError(fmt::format("step tau = {} must be positive", tau));
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ConfigError(fmt::format("horizon = {} must be positive", horizon));
    }
}

ScenarioConfig default_scenario()
{
    ScenarioConfig cfg;
    auto coeffs = derive_coefficients(cfg.params);
    cfg.setpoint.S = s_min(coeffs, cfg.setpoint.x_star, cfg.setpoint.v_max) + kDefaultSlopeOffset;
    return cfg;
}

TimeSeries run_scenario(const ScenarioConfig& config)
{
    config.validate();
    const Coefficients coeffs = derive_coefficients(config.params);
    const Perturbation plant =
        config.mode == Mode::compensated_state_only ? Perturbation{} : config.pert;
    const BangBangController law(coeffs, config.setpoint);
    const double tau = config.tau;
    const double x_star = config.setpoint.x_star;
    const auto steps = static_cast<std::int64_t>(std::llround(config.horizon / tau));
    const bool delayed = config.mode != Mode::delay_free;

    const double window = std::max(max_delay(coeffs, plant), coeffs.length / coeffs.theta1);
    const auto capacity = ActuatorHistory::window_capacity(tau, window) + 2;
    ActuatorHistory history = ActuatorHistory::constant(tau, config.u_history0,
                                                        -static_cast<std::int64_t>(capacity), 0, capacity);

    TimeSeries ts;
    ts.tau = tau;
    ts.x_star = x_star;
    ts.v_star = law.equilibrium_input();
    ts.rows.reserve(static_cast<std::size_t>(steps + 1));
    RunMonitors& mon = ts.monitors;
    mon.delay_bound = max_delay(coeffs, plant);
    mon.max_F = -std::numeric_limits<double>::infinity();
    mon.min_denominator = std::numeric_limits<double>::infinity();
    if (uses_predictor(config.mode)) {
        mon.backstepping_residual = 0.0;
    }

    double x = config.x0;
    for (std::int64_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * tau;
        TimeSeriesRow row;
        row.t = t;
        row.x = x;
        row.e = x - x_star;
        row.D = delayed ? delay(coeffs, plant, t, x) : 0.0;
        row.flow = coeffs.theta2 * x / (1.0 + coeffs.theta2 * x);
        row.P = x;
        row.sigma = t;

        std::optional<PredictorOutput> pred;
        switch (config.mode) {
        case Mode::open_loop:
        case Mode::uncompensated:
            // the exact predictor is only a monitor here
            pred = predict(coeffs, plant, x, t, history, Trace::none);
            row.U = config.mode == Mode::open_loop ? law.equilibrium_input() : law(x);
            break;
        case Mode::compensated_full:
            pred = predict(coeffs, plant, x, t, history, Trace::none);
            break;
        case Mode::compensated_state_only:
            pred = predict_state_only(coeffs, x, t, history, Trace::none);
            break;
        case Mode::compensated_estimated:
            pred = predict_estimated(coeffs, x, t, history, Trace::none);
            break;
        case Mode::delay_free:
            row.U = law(x);
            break;
        }
        if (pred) {
            row.P = pred->P;
            row.sigma = pred->sigma;
            if (uses_predictor(config.mode)) {
                row.U = law(pred->P);
            }
            row.F = pred->samples > 0 ? pred->max_F : compute_F(coeffs, plant, t, x, row.U);
            mon.min_denominator = std::min(mon.min_denominator, pred->min_denominator);
        }
        mon.max_F = std::max(mon.max_F, row.F);

        if (delayed) {
            history.push(row.U);
            if (mon.backstepping_residual) {
                // W(t) = U(t) - v(P(t)) read back from the actuator state
                *mon.backstepping_residual =
                    std::max(*mon.backstepping_residual, std::abs(history.at(i) - law(row.P)));
            }
            row.U_eff = history.value_at(t - row.D);
        } else {
            row.U_eff = row.U;
        }
        mon.max_delay = std::max(mon.max_delay, row.D);
        ts.rows.push_back(row);

        if (i < steps) {
            x += tau * vector_field(coeffs, plant, t, x, row.U_eff);
            if (!(x >= 0.0 && x <= coeffs.length)) {
                throw DomainError(fmt::format("interface left [0, {}]: x = {} at t = {} ({} mode)", coeffs.length,
                                              x, t + tau, to_string(config.mode)));
            }
        }
    }

    for (std::size_t i = 1; i < ts.rows.size(); ++i) {
        ts.rows[i].dDdt = (ts.rows[i].D - ts.rows[i - 1].D) / tau;
    }
    if (ts.rows.size() > 1) {
        ts.rows[0].dDdt = ts.rows[1].dDdt;
    }
    mon.max_dDdt = -std::numeric_limits<double>::infinity();
    for (const auto& r : ts.rows) {
        mon.max_dDdt = std::max(mon.max_dDdt, r.dDdt);
    }
    if (!std::isfinite(mon.min_denominator)) {
        mon.min_denominator = 1.0;
    }
    return ts;
}

RunMetrics run_metrics(const TimeSeries& ts, double threshold)
{
    RunMetrics m;
    std::optional<double> settle;
    for (std::size_t i = 0; i < ts.rows.size(); ++i) {
        const auto& r = ts.rows[i];
        double err = std::abs(r.e);
        m.max_abs_error = std::max(m.max_abs_error, err);
        if (err >= threshold) {
            settle.reset();
        } else if (!settle) {
            settle = r.t;
        }
        if (i + 1 < ts.rows.size()) {
            m.effort += std::abs(r.U - ts.v_star) * ts.tau;
        }
    }
    m.settling_time = settle;
    return m;
}

RunComparison compare_runs(const TimeSeries& a, const TimeSeries& b, double threshold)
{
    if (a.tau != b.tau || a.rows.size() != b.rows.size()) {
        throw ConfigError(fmt::format("runs are on different grids: {} rows at tau = {} vs {} rows at tau = {}",
                                      a.rows.size(), a.tau, b.rows.size(), b.tau));
    }
    RunComparison c;
    c.a = run_metrics(a, threshold);
    c.b = run_metrics(b, threshold);
    c.max_abs_error_diff = c.b.max_abs_error - c.a.max_abs_error;
    c.effort_diff = c.b.effort - c.a.effort;
    if (c.a.settling_time && c.b.settling_time) {
        c.settling_diff = *c.b.settling_time - *c.a.settling_time;
    }
    return c;
}

double tail_error(const TimeSeries& ts)
{
    if (ts.rows.empty()) {
        return 0.0;
    }
    const double start = 0.75 * ts.rows.back().t;
    double worst = 0.0;
    for (const auto& r : ts.rows) {
        if (r.t >= start) {
            worst = std::max(worst, std::abs(r.e));
        }
    }
    return worst;
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
        dynamic_cast<const NoPositiveRootError*>(&e)) {
        return 1;
    }
    if (dynamic_cast<const FeasibilityError*>(&e)) {
        return 2;
    }
    return 3;
}

std::vector<BatchResult> run_batch(std::span<const ScenarioConfig> configs, unsigned workers)
{
    std::vector<BatchResult> results(configs.size());
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(configs.size(), 1)));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < configs.size(); k = next++) {
            try {
                results[k].series = run_scenario(configs[k]);
            } catch (const std::exception& e) {
                results[k].error = e.what();
                results[k].exit_code = exit_code_for(e);
            }
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    return results;
}

}  // namespace extruder
