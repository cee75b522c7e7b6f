#pragma once

#include <span>
#include <vector>

#include "extruder/history.hpp"
#include "extruder/model.hpp"

namespace extruder {

/// State of the bi-zone model: transport PDE for the filling ratio on the partially filled
/// zone coupled with the interface ODE.
///
/// The filling ratio is sampled on a fixed grid anchored at the inlet, u[j] = u(L - j dz, t),
/// j = 0..M with L - M dz <= 0. Samples left of the interface are carried but unused (the fully
/// filled zone has filling ratio one).
struct BiZoneState {
    double t = 0.0;
    double x = 0.0;
    double length = 0.0;  ///< L, position of u[0]
    double dz = 0.0;
    std::vector<double> u;
};

/// Filling ratio at position z by linear interpolation on the grid.
double filling_at(const BiZoneState& state, double z);

/// Filling ratio seen by the interface, u(x(t), t).
double interface_filling(const BiZoneState& state);

/// Initial profile from an input history via the characteristic solution u(z, t0) = U(t0 - (L - z)/c(t0)).
BiZoneState initial_bizone_state(const Coefficients& coeffs, const Perturbation& pert, double x0, double t0,
                                 const ActuatorHistory& history, double dz);

/// Largest step allowed by the unit CFL condition dt <= dz / (theta1 (1 + eps)).
double max_pde_step(const Coefficients& coeffs, const Perturbation& pert, double dz);

/// Shifts u along characteristics by the exact transport distance over [t, t + dt] (boundary
/// filled with U_boundary, held over the step), then advances x by one explicit step of the
/// interface ODE using u(x(t), t). Throws SingularityError when u(x, t) >= 1 - 1e-9 and
/// DomainError when x leaves [0, L].
void advance(BiZoneState& state, const Coefficients& coeffs, const Perturbation& pert, double U_boundary,
             double dt);

/// Value-returning form of advance().
BiZoneState step_pde(BiZoneState state, const Coefficients& coeffs, const Perturbation& pert, double U_boundary,
                     double dt);

/// Interface trajectory x(t_k), k = 0..n, on the grid t_k = k tau.
struct InterfaceTrace {
    double tau = 0.0;
    std::vector<double> x;
};

/// Bi-zone simulation fed with inputs[k] on [t_k, t_{k+1}); the initial profile comes from a
/// constant history level u0.
InterfaceTrace simulate_pde_trace(const Coefficients& coeffs, const Perturbation& pert, double x0, double u0,
                                  std::span<const double> inputs, double tau, double dz);

/// Delay-system simulation x' = f(t, x, U(t - D(t, x))) with the same inputs, explicit Euler,
/// history read by linear interpolation.
InterfaceTrace simulate_delay_trace(const Coefficients& coeffs, const Perturbation& pert, double x0, double u0,
                                    std::span<const double> inputs, double tau);

/// max_k |x_pde(t_k) - x_delay(t_k)|; ConfigError on mismatched grids.
double trace_equivalence(const InterfaceTrace& pde_run, const InterfaceTrace& delay_run);

struct EquivalenceStudy {
    double dz = 0.0;
    double deviation = 0.0;          ///< at (tau, dz)
    double refined_deviation = 0.0;  ///< at (tau/2, dz/2), inputs held over both half steps
    double ratio() const { return refined_deviation > 0.0 ? deviation / refined_deviation : 0.0; }
};

/// PDE-vs-delay deviation for an input sequence at two resolutions. dz defaults to
/// theta1 (1 + eps) tau, the unit-CFL spacing.
EquivalenceStudy equivalence_study(const Coefficients& coeffs, const Perturbation& pert, double x0, double u0,
                                   std::span<const double> inputs, double tau, double dz = 0.0);

}  // namespace extruder
