#pragma once

#include <optional>

namespace extruder {

/// Physical constants of the machine and the melt. Times are in minutes.
struct ExtruderParams {
    double L = 0.2;          ///< extruder length (m)
    double N0 = 90.0;        ///< screw speed (rev/min)
    double xi = 0.01;        ///< screw pitch (m/rev)
    double B = 9.3450e-9;    ///< pressure-flow geometric coefficient (m^4)
    double Kd = 2.45e-5;     ///< nozzle conductance (m^3)
    double rho0 = 1240.0;    ///< melt density (kg/m^3)
    std::optional<double> S_eff;  ///< effective section (m^2)
    std::optional<double> eta;    ///< melt viscosity; documentation only, cancels out of the flow law

    /// Throws ParameterError on a non-positive constant.
    void validate() const;

    /// V_eff = xi * S_eff, when S_eff is known.
    std::optional<double> effective_volume() const;

    bool operator==(const ExtruderParams&) const = default;
};

/// Derived model constants.
struct Coefficients {
    double theta1 = 0.0;  ///< nominal transport speed xi*N0 (m/min)
    double theta2 = 0.0;  ///< pressure/rotation flow ratio Kd/(B rho0) (1/m)
    double length = 0.0;  ///< extruder length L (m)
    bool open_loop_warning = false;  ///< theta2*L >= 1: the constant open-loop input is not stabilizing

    double theta2L() const { return theta2 * length; }
};

/// Periodic fluctuation of the transport speed, c(t) = theta1 (1 + eps cos(omega t)).
struct Perturbation {
    double eps = 0.0;    ///< amplitude, 0 <= eps < 1
    double omega = 0.0;  ///< angular frequency (rad/min)

    void validate() const;

    bool operator==(const Perturbation&) const = default;
};

Coefficients derive_coefficients(const ExtruderParams& params);

double transport_speed(const Coefficients& coeffs, const Perturbation& pert, double t);

/// Distance travelled by the material between t0 and t1: the exact integral of c.
double transport_distance(const Coefficients& coeffs, const Perturbation& pert, double t0, double t1);

/// Transport delay D(t, x) = (L - x) / c(t).
double delay(const Coefficients& coeffs, const Perturbation& pert, double t, double x);

/// dD/dt at fixed x.
double delay_time_partial(const Coefficients& coeffs, const Perturbation& pert, double t, double x);

/// Hard upper bound of the delay over all t and x: L / (theta1 (1 - eps)).
double max_delay(const Coefficients& coeffs, const Perturbation& pert);

/// Drift factor Gamma(x, U); the vector field is -c(t) * Gamma.
double gamma(const Coefficients& coeffs, double x, double U);

/// dGamma/dU, always negative.
double gamma_input_gradient(const Coefficients& coeffs, double x, double U);

/// Interface velocity dx/dt (m/min) under input U reaching the interface.
double vector_field(const Coefficients& coeffs, const Perturbation& pert, double t, double x, double U);

struct NozzleFlow {
    double normalized = 0.0;          ///< F_d / (rho0 V_eff N0)
    std::optional<double> absolute;   ///< F_d in kg/min when S_eff is known
};

NozzleFlow nozzle_flow(const ExtruderParams& params, const Coefficients& coeffs, double x);

/// Absolute nozzle flow; throws ConfigError when S_eff is missing.
double absolute_nozzle_flow(const ExtruderParams& params, const Coefficients& coeffs, double x);

/// Constant inlet filling ratio holding the interface at x_star.
double open_loop_input(const Coefficients& coeffs, double x_star);

namespace detail {

// Unchecked formulas shared by the predictor inner loops.
inline double gamma_unchecked(double theta2, double x, double U)
{
    return (theta2 * x / (1.0 + theta2 * x) - U) / (1.0 - U);
}

}  // namespace detail

}  // namespace extruder
