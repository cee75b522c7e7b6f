#include "extruder/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "extruder/errors.hpp"

namespace extruder {

namespace {

std::int64_t step_index(double t, double tau)
{
    double pos = t / tau;
    double rounded = std::round(pos);
    if (std::abs(pos - rounded) > 1e-6) {
        throw DomainError(fmt::format("time {} is not on the sampling grid of step {}", t, tau));
    }
    return static_cast<std::int64_t>(rounded);
}

// Time- and state-dependent delay model.
struct FullModel {
    const Coefficients& c;
    const Perturbation& p;

    double delay(double t, double x) const { return extruder::delay(c, p, t, x); }
    double speed(double s) const { return c.theta1 * (1.0 + p.eps * std::cos(p.omega * s)); }
    // f and F share c(sigma) and Gamma
    void eval(double sigma, double P, double U, double& f, double& F) const
    {
        double cs = speed(sigma);
        double g = detail::gamma_unchecked(c.theta2, P, U);
        f = -cs * g;
        F = c.theta1 * p.eps * p.omega * std::sin(p.omega * sigma) * (c.length - P) / (cs * cs) + g;
    }
};

// Delay (L - x)/theta1 with the nominal field; the time partial vanishes.
struct NominalModel {
    const Coefficients& c;

    double delay(double, double x) const
    {
        if (!(x >= 0.0 && x <= c.length)) {
            throw DomainError(fmt::format("interface position {} outside [0, {}]", x, c.length));
        }
        return (c.length - x) / c.theta1;
    }
    void eval(double, double P, double U, double& f, double& F) const
    {
        double g = detail::gamma_unchecked(c.theta2, P, U);
        f = -c.theta1 * g;
        F = g;
    }
};

template <class Model>
PredictorOutput integrate_window(const Model& model, double x, double t, const ActuatorHistory& history,
                                 Trace trace, const char* guard_name)
{
    const double tau = history.tau();
    const std::int64_t i = step_index(t, tau);

    PredictorOutput out;
    out.delay = model.delay(t, x);
    out.samples = static_cast<std::int64_t>(std::floor(out.delay / tau));
    out.first_index = i - out.samples;
    if (out.samples > 0 && !(history.contains(out.first_index) && history.contains(i - 1))) {
        throw DomainError(fmt::format("history [{}, {}) does not cover the prediction window [{}, {})",
                                      history.first_index(), history.next_index(), out.first_index, i));
    }
    if (trace == Trace::full) {
        out.P_trace.reserve(static_cast<std::size_t>(out.samples));
        out.sigma_trace.reserve(static_cast<std::size_t>(out.samples));
        out.F_trace.reserve(static_cast<std::size_t>(out.samples));
    }

    double P = x;
    double sigma = t;
    double min_den = std::numeric_limits<double>::infinity();
    double max_F = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = out.first_index; k < i; ++k) {
        double U = history.at(k);
        double f = 0.0;
        double F = 0.0;
        model.eval(sigma, P, U, f, F);
        double den = 1.0 - F;
        if (!(den > kFeasibilityMargin)) {
            throw FeasibilityError(fmt::format(
                "{} violated at t = {}: F = {} at window sample {} (P = {}, sigma = {}, U = {})", guard_name, t, F,
                k, P, sigma, U));
        }
        if (trace == Trace::full) {
            out.P_trace.push_back(P);
            out.sigma_trace.push_back(sigma);
            out.F_trace.push_back(F);
        }
        min_den = std::min(min_den, den);
        max_F = std::max(max_F, F);
        P += tau * f / den;
        sigma += tau / den;
    }
    out.P = P;
    out.sigma = sigma;
    if (out.samples > 0) {
        out.min_denominator = min_den;
        out.max_F = max_F;
    }
    return out;
}

}  // namespace

double compute_F(const Coefficients& coeffs, const Perturbation& pert, double sigma, double P, double U)
{
    return delay_time_partial(coeffs, pert, sigma, P) + gamma(coeffs, P, U);
}

PredictorOutput predict(const Coefficients& coeffs, const Perturbation& pert, double x, double t,
                        const ActuatorHistory& history, Trace trace)
{
    return integrate_window(FullModel{coeffs, pert}, x, t, history, trace, "feasibility condition");
}

PredictorOutput predict_state_only(const Coefficients& coeffs, double x, double t, const ActuatorHistory& history,
                                   Trace trace)
{
    return integrate_window(NominalModel{coeffs}, x, t, history, trace, "feasibility condition");
}

PredictorOutput predict_estimated(const Coefficients& coeffs, double x, double t, const ActuatorHistory& history,
                                  Trace trace)
{
    return integrate_window(NominalModel{coeffs}, x, t, history, trace, "estimated-predictor boundedness guard");
}

ControlDecision predictor_control(const Coefficients& coeffs, const Perturbation& pert, double x, double t,
                                  const ActuatorHistory& history, const BangBangController& law, Trace trace)
{
    ControlDecision d;
    d.prediction = predict(coeffs, pert, x, t, history, trace);
    d.U = law(d.prediction.P);
    return d;
}

std::vector<PredictionSample> window_samples(const PredictorOutput& out)
{
    std::vector<PredictionSample> samples;
    samples.reserve(out.P_trace.size());
    for (std::size_t j = 0; j < out.P_trace.size(); ++j) {
        samples.push_back({out.first_index + static_cast<std::int64_t>(j), out.P_trace[j]});
    }
    return samples;
}

double backstepping_residual(const ActuatorHistory& history, std::span<const PredictionSample> trace,
                             const BangBangController& law, std::int64_t first_index)
{
    double worst = 0.0;
    for (const auto& s : trace) {
        if (s.index < first_index) {
            continue;
        }
        worst = std::max(worst, std::abs(history.at(s.index) - law(s.P)));
    }
    return worst;
}

}  // namespace extruder
