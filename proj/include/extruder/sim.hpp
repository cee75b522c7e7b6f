#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "extruder/bangbang.hpp"
#include "extruder/model.hpp"

namespace extruder {

enum class Mode {
    open_loop,               ///< constant input v(x*)
    uncompensated,           ///< U(t) = v(x(t)), delay ignored
    compensated_full,        ///< U(t) = v(P(t)), time- and state-dependent predictor
    compensated_state_only,  ///< nominal predictor on the isothermal plant (eps forced to 0)
    compensated_estimated,   ///< nominal predictor on the perturbed plant
    delay_free,              ///< no transport delay, U(t) = v(x(t))
};

std::string_view to_string(Mode m);
/// Throws ConfigError on an unknown name.
Mode mode_from_string(std::string_view name);

struct ScenarioConfig {
    Mode mode = Mode::compensated_full;
    ExtruderParams params;
    Perturbation pert{0.1, 3.5};
    SetpointConfig setpoint;  ///< S resolved (default S_min + 30)
    double x0 = 0.1;          ///< initial interface (m)
    double u_history0 = 0.0;  ///< constant actuator state before t = 0
    double tau = 1e-4;        ///< step (min)
    double horizon = 5.0;     ///< end time (min)
    std::uint64_t seed = 0;   ///< reserved

    /// Throws ParameterError / DomainError / NoPositiveRootError / ConfigError.
    void validate() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Scenario with the default machine, x* = 0.16, x0 = 0.1, S = S_min + 30, v_max = 0.9.
ScenarioConfig default_scenario();

/// Default slope offset above S_min.
inline constexpr double kDefaultSlopeOffset = 30.0;

struct TimeSeriesRow {
    double t = 0.0;
    double x = 0.0;
    double U = 0.0;      ///< input applied at t
    double U_eff = 0.0;  ///< input reaching the interface at t, U(t - D)
    double P = 0.0;      ///< predicted state (x when no predictor runs)
    double sigma = 0.0;  ///< prediction time (t when no predictor runs)
    double D = 0.0;      ///< D(t, x(t)) of the plant
    double dDdt = 0.0;   ///< backward difference of D
    double flow = 0.0;   ///< normalized nozzle flow
    double F = 0.0;      ///< max delay-rate bound F over the predictor window
    double e = 0.0;      ///< x - x*
};

struct RunMonitors {
    double max_dDdt = 0.0;
    double max_delay = 0.0;
    double delay_bound = 0.0;  ///< L / (theta1 (1 - eps)) of the plant
    double max_F = 0.0;
    double min_denominator = 1.0;
    /// max |U - v(P)| over t >= 0; only meaningful for predictor modes.
    std::optional<double> backstepping_residual;
};

struct TimeSeries {
    double tau = 0.0;
    double x_star = 0.0;
    double v_star = 0.0;  ///< equilibrium input v(x*)
    std::vector<TimeSeriesRow> rows;
    RunMonitors monitors;
};

/// Integrates the plant with explicit Euler at tau. Throws FeasibilityError, DomainError or
/// SingularityError with the time of the violation.
TimeSeries run_scenario(const ScenarioConfig& config);

struct RunMetrics {
    std::optional<double> settling_time;  ///< first t after which |e| stays below the threshold
    double max_abs_error = 0.0;
    double effort = 0.0;  ///< integral of |U - v(x*)|
};

RunMetrics run_metrics(const TimeSeries& ts, double threshold = 1e-3);

struct RunComparison {
    RunMetrics a;
    RunMetrics b;
    double max_abs_error_diff = 0.0;  ///< b - a
    double effort_diff = 0.0;         ///< b - a
    /// b - a when both settle
    std::optional<double> settling_diff;
};

/// Metrics of two runs on the same grid; ConfigError when tau or length differ.
RunComparison compare_runs(const TimeSeries& a, const TimeSeries& b, double threshold = 1e-3);

/// Sup of |e| over the last quarter of the horizon.
double tail_error(const TimeSeries& ts);

struct BatchResult {
    std::optional<TimeSeries> series;
    std::string error;
    int exit_code = 0;
};

/// Runs independent scenarios on a bounded worker pool; results keep the input order.
std::vector<BatchResult> run_batch(std::span<const ScenarioConfig> configs, unsigned workers = 0);

/// Exit code of the CLI for an exception: 1 configuration, 2 runtime feasibility, 3 numerical.
int exit_code_for(const std::exception& e);

}  // namespace extruder
