#include "extruder/model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "extruder/errors.hpp"

namespace extruder {

namespace {

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ParameterError(fmt::format("{} must be positive and finite, got {}", name, value));
    }
}

void require_interface(const Coefficients& coeffs, double x)
{
    if (!(x >= 0.0 && x <= coeffs.length)) {
        throw DomainError(fmt::format("interface position {} outside [0, {}]", x, coeffs.length));
    }
}

void require_input(double U)
{
    if (!(U >= 0.0 && U < 1.0)) {
        throw DomainError(fmt::format("filling ratio {} outside [0, 1)", U));
    }
}

}  // namespace

void ExtruderParams::validate() const
{
    require_positive(L, "L");
    require_positive(N0, "N0");
    require_positive(xi, "xi");
    require_positive(B, "B");
    require_positive(Kd, "Kd");
    require_positive(rho0, "rho0");
    if (S_eff) {
        require_positive(*S_eff, "S_eff");
    }
    if (eta) {
        require_positive(*eta, "eta");
    }
}

std::optional<double> ExtruderParams::effective_volume() const
{
    if (!S_eff) {
        return std::nullopt;
    }
    return xi * *S_eff;
}

void Perturbation::validate() const
{
    if (!(eps >= 0.0 && eps < 1.0)) {
        throw ParameterError(fmt::format("perturbation amplitude eps = {} outside [0, 1)", eps));
    }
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
        throw ParameterError(fmt::format("perturbation frequency omega = {} must be >= 0", omega));
    }
}

Coefficients derive_coefficients(const ExtruderParams& params)
{
    params.validate();
    Coefficients c;
    c.theta1 = params.xi * params.N0;
    c.theta2 = params.Kd / (params.B * params.rho0);
    c.length = params.L;
    c.open_loop_warning = c.theta2L() >= 1.0;
    return c;
}

double transport_speed(const Coefficients& coeffs, const Perturbation& pert, double t)
{
    return coeffs.theta1 * (1.0 + pert.eps * std::cos(pert.omega * t));
}

double transport_distance(const Coefficients& coeffs, const Perturbation& pert, double t0, double t1)
{
    double span = t1 - t0;
    if (pert.eps != 0.0 && pert.omega != 0.0) {
        // sin(w t1) - sin(w t0) = 2 cos(w (t0+t1)/2) sin(w (t1-t0)/2), stable for short steps
        double half = 0.5 * pert.omega * (t1 - t0);
        double mid = 0.5 * pert.omega * (t0 + t1);
        span += pert.eps * 2.0 * std::cos(mid) * std::sin(half) / pert.omega;
    } else {
        span *= 1.0 + pert.eps;
    }
    return coeffs.theta1 * span;
}

double delay(const Coefficients& coeffs, const Perturbation& pert, double t, double x)
{
    require_interface(coeffs, x);
    return (coeffs.length - x) / transport_speed(coeffs, pert, t);
}

double delay_time_partial(const Coefficients& coeffs, const Perturbation& pert, double t, double x)
{
    require_interface(coeffs, x);
    double c = transport_speed(coeffs, pert, t);
    return coeffs.theta1 * pert.eps * pert.omega * std::sin(pert.omega * t) * (coeffs.length - x) / (c * c);
}

double max_delay(const Coefficients& coeffs, const Perturbation& pert)
{
    return coeffs.length / (coeffs.theta1 * (1.0 - pert.eps));
}

double gamma(const Coefficients& coeffs, double x, double U)
{
    if (!(x >= 0.0)) {
        throw DomainError(fmt::format("interface position {} is negative", x));
    }
    require_input(U);
    return detail::gamma_unchecked(coeffs.theta2, x, U);
}

double gamma_input_gradient(const Coefficients& coeffs, double x, double U)
{
    require_input(U);
    double r = 1.0 - U;
    return -1.0 / ((1.0 + coeffs.theta2 * x) * r * r);
}

double vector_field(const Coefficients& coeffs, const Perturbation& pert, double t, double x, double U)
{
    require_interface(coeffs, x);
    return -transport_speed(coeffs, pert, t) * gamma(coeffs, x, U);
}

NozzleFlow nozzle_flow(const ExtruderParams& params, const Coefficients& coeffs, double x)
{
    require_interface(coeffs, x);
    NozzleFlow flow;
    flow.normalized = coeffs.theta2 * x / (1.0 + coeffs.theta2 * x);
    if (auto v_eff = params.effective_volume()) {
        flow.absolute = params.rho0 * *v_eff * params.N0 * flow.normalized;
    }
    return flow;
}

double absolute_nozzle_flow(const ExtruderParams& params, const Coefficients& coeffs, double x)
{
    auto flow = nozzle_flow(params, coeffs, x);
    if (!flow.absolute) {
        throw ConfigError("absolute nozzle flow needs the effective section S_eff");
    }
    return *flow.absolute;
}

double open_loop_input(const Coefficients& coeffs, double x_star)
{
    if (!(x_star >= 0.0 && x_star < coeffs.length)) {
        throw DomainError(fmt::format("setpoint {} outside [0, {})", x_star, coeffs.length));
    }
    return coeffs.theta2 * x_star / (1.0 + coeffs.theta2 * x_star);
}

}  // namespace extruder
