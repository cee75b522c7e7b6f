#include "extruder/pde.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "extruder/errors.hpp"

namespace extruder {

namespace {

constexpr double kSingularMargin = 1e-9;
constexpr double kSnap = 1e-9;

std::size_t grid_points(double L, double dz)
{
    return static_cast<std::size_t>(std::ceil(L / dz - kSnap)) + 1;
}

// Interpolate the profile at fractional grid position q (q = 0 at the inlet).
double sample(const std::vector<double>& u, double q)
{
    const double last = static_cast<double>(u.size() - 1);
    q = std::clamp(q, 0.0, last);
    double k = std::floor(q);
    double frac = q - k;
    auto idx = static_cast<std::size_t>(k);
    if (frac < kSnap || idx + 1 >= u.size()) {
        return u[idx];
    }
    if (frac > 1.0 - kSnap) {
        return u[idx + 1];
    }
    return u[idx] + frac * (u[idx + 1] - u[idx]);
}

}  // namespace

double filling_at(const BiZoneState& state, double z)
{
    return sample(state.u, (state.length - z) / state.dz);
}

double interface_filling(const BiZoneState& state)
{
    return filling_at(state, state.x);
}

BiZoneState initial_bizone_state(const Coefficients& coeffs, const Perturbation& pert, double x0, double t0,
                                 const ActuatorHistory& history, double dz)
{
    if (!(dz > 0.0)) {
        throw ConfigError(fmt::format("grid spacing dz = {} must be positive", dz));
    }
    if (!(x0 >= 0.0 && x0 <= coeffs.length)) {
        throw DomainError(fmt::format("initial interface {} outside [0, {}]", x0, coeffs.length));
    }
    if (history.empty()) {
        throw ConfigError("initial profile needs a non-empty input history");
    }
    BiZoneState s;
    s.t = t0;
    s.x = x0;
    s.length = coeffs.length;
    s.dz = dz;
    s.u.resize(grid_points(coeffs.length, dz));
    const double c0 = transport_speed(coeffs, pert, t0);
    const double newest = history.time_of(history.next_index() - 1);
    const double oldest = history.time_of(history.first_index());
    for (std::size_t j = 0; j < s.u.size(); ++j) {
        double depth = std::min(static_cast<double>(j) * dz, coeffs.length);
        double when = std::clamp(t0 - depth / c0, oldest, newest);
        s.u[j] = history.value_at(when);
    }
    return s;
}

double max_pde_step(const Coefficients& coeffs, const Perturbation& pert, double dz)
{
    return dz / (coeffs.theta1 * (1.0 + pert.eps));
}

void advance(BiZoneState& state, const Coefficients& coeffs, const Perturbation& pert, double U_boundary,
             double dt)
{
    if (dt > max_pde_step(coeffs, pert, state.dz) * (1.0 + 1e-9)) {
        throw ConfigError(fmt::format("step dt = {} violates the CFL limit {}", dt,
                                      max_pde_step(coeffs, pert, state.dz)));
    }
    if (!(U_boundary >= 0.0 && U_boundary < 1.0)) {
        throw DomainError(fmt::format("boundary filling ratio {} outside [0, 1)", U_boundary));
    }

    const double u_x = interface_filling(state);
    if (u_x >= 1.0 - kSingularMargin) {
        throw SingularityError(
            fmt::format("partially filled zone saturated at the interface (u = {}) at t = {}", u_x, state.t));
    }

    const double shift = transport_distance(coeffs, pert, state.t, state.t + dt) / state.dz;
    std::vector<double> next(state.u.size());
    for (std::size_t j = 0; j < next.size(); ++j) {
        double from = static_cast<double>(j) - shift;
        next[j] = from <= kSnap ? U_boundary : sample(state.u, from);
    }

    const double dxdt = -transport_speed(coeffs, pert, state.t) * gamma(coeffs, state.x, u_x);
    const double x_next = state.x + dt * dxdt;
    if (!(x_next >= 0.0 && x_next <= coeffs.length)) {
        throw DomainError(fmt::format("interface left [0, {}]: x = {} at t = {}", coeffs.length, x_next,
                                      state.t + dt));
    }
    state.u = std::move(next);
    state.x = x_next;
    state.t += dt;
}

BiZoneState step_pde(BiZoneState state, const Coefficients& coeffs, const Perturbation& pert, double U_boundary,
                     double dt)
{
    advance(state, coeffs, pert, U_boundary, dt);
    return state;
}

namespace {

ActuatorHistory constant_history(const Coefficients& coeffs, const Perturbation& pert, double u0, double tau,
                                 std::size_t extra)
{
    auto window = static_cast<std::int64_t>(ActuatorHistory::window_capacity(tau, max_delay(coeffs, pert)));
    return ActuatorHistory::constant(tau, u0, -window, 0, static_cast<std::size_t>(window) + extra + 1);
}

}  // namespace

InterfaceTrace simulate_pde_trace(const Coefficients& coeffs, const Perturbation& pert, double x0, double u0,
                                  std::span<const double> inputs, double tau, double dz)
{
    auto history = constant_history(coeffs, pert, u0, tau, 0);
    BiZoneState state = initial_bizone_state(coeffs, pert, x0, 0.0, history, dz);
    InterfaceTrace trace{tau, {}};
    trace.x.reserve(inputs.size() + 1);
    trace.x.push_back(state.x);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        advance(state, coeffs, pert, inputs[k], tau);
        state.t = static_cast<double>(k + 1) * tau;
        trace.x.push_back(state.x);
    }
    return trace;
}

InterfaceTrace simulate_delay_trace(const Coefficients& coeffs, const Perturbation& pert, double x0, double u0,
                                    std::span<const double> inputs, double tau)
{
    auto history = constant_history(coeffs, pert, u0, tau, inputs.size());
    InterfaceTrace trace{tau, {}};
    trace.x.reserve(inputs.size() + 1);
    double x = x0;
    trace.x.push_back(x);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const double t = static_cast<double>(k) * tau;
        history.push(inputs[k]);
        const double U_eff = history.value_at(t - delay(coeffs, pert, t, x));
        x += tau * vector_field(coeffs, pert, t, x, U_eff);
        if (!(x >= 0.0 && x <= coeffs.length)) {
            throw DomainError(fmt::format("interface left [0, {}]: x = {} at t = {}", coeffs.length, x, t + tau));
        }
        trace.x.push_back(x);
    }
    return trace;
}

double trace_equivalence(const InterfaceTrace& pde_run, const InterfaceTrace& delay_run)
{
    if (pde_run.x.size() != delay_run.x.size() || pde_run.tau != delay_run.tau) {
        throw ConfigError(fmt::format("trace grids differ: {} samples at tau = {} vs {} samples at tau = {}",
                                      pde_run.x.size(), pde_run.tau, delay_run.x.size(), delay_run.tau));
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < pde_run.x.size(); ++k) {
        worst = std::max(worst, std::abs(pde_run.x[k] - delay_run.x[k]));
    }
    return worst;
}

EquivalenceStudy equivalence_study(const Coefficients& coeffs, const Perturbation& pert, double x0, double u0,
                                   std::span<const double> inputs, double tau, double dz)
{
    EquivalenceStudy study;
    study.dz = dz > 0.0 ? dz : coeffs.theta1 * (1.0 + pert.eps) * tau;
    study.deviation = trace_equivalence(simulate_pde_trace(coeffs, pert, x0, u0, inputs, tau, study.dz),
                                        simulate_delay_trace(coeffs, pert, x0, u0, inputs, tau));

    std::vector<double> fine;
    fine.reserve(2 * inputs.size());
    for (double U : inputs) {
        fine.push_back(U);
        fine.push_back(U);
    }
    const double half = 0.5 * tau;
    auto pde_fine = simulate_pde_trace(coeffs, pert, x0, u0, fine, half, 0.5 * study.dz);
    auto delay_fine = simulate_delay_trace(coeffs, pert, x0, u0, fine, half);
    study.refined_deviation = trace_equivalence(pde_fine, delay_fine);
    return study;
}

}  // namespace extruder
