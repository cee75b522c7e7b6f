#pragma once

#include "extruder/model.hpp"

namespace extruder {

struct SetpointConfig {
    double x_star = 0.16;  ///< interface setpoint (m)
    double S = 0.0;        ///< slope magnitude of the control law at x_star (1/m)
    double v_max = 0.9;    ///< maximal inlet filling ratio

    bool operator==(const SetpointConfig&) const = default;
};

struct ControllerGains {
    double a_l = 0.0;  ///< left exponential gain (1/m)
    double a_r = 0.0;  ///< right exponential gain (1/m)
    double residual_l = 0.0;
    double residual_r = 0.0;
};

/// Smallest setpoint slope for which both gain equations have a positive root:
/// max{(v_max - v(x*)) / x*, v(x*) / (L - x*)}.
double s_min(const Coefficients& coeffs, double x_star, double v_max);

/// Left gain equation a (v_max - v*) - S (1 - exp(-a x*)).
double left_gain_residual(const Coefficients& coeffs, const SetpointConfig& setpoint, double a);
/// Right gain equation a v* - S (1 - exp(-a (L - x*))).
double right_gain_residual(const Coefficients& coeffs, const SetpointConfig& setpoint, double a);

/// Checks 0 < x* < L, v(x*) < v_max < 1 and S > S_min.
void validate_setpoint(const Coefficients& coeffs, const SetpointConfig& setpoint);

/// Positive roots of both gain equations by doubling bracket + bisection, then one Newton polish.
ControllerGains solve_gains(const SetpointConfig& setpoint, const Coefficients& coeffs);

/// Piecewise exponential law: v_max at x = 0, v(x*) at x*, 0 at x = L.
double control(const Coefficients& coeffs, const SetpointConfig& setpoint, const ControllerGains& gains,
               double x);

/// The solved law bundled with its data.
class BangBangController {
public:
    BangBangController(const Coefficients& coeffs, const SetpointConfig& setpoint);

    double operator()(double x) const { return control(coeffs_, setpoint_, gains_, x); }

    const Coefficients& coefficients() const { return coeffs_; }
    const SetpointConfig& setpoint() const { return setpoint_; }
    const ControllerGains& gains() const { return gains_; }
    double equilibrium_input() const { return v_star_; }

private:
    Coefficients coeffs_;
    SetpointConfig setpoint_;
    ControllerGains gains_;
    double v_star_;
};

}  // namespace extruder
