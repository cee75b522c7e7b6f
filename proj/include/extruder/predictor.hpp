#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "extruder/bangbang.hpp"
#include "extruder/history.hpp"
#include "extruder/model.hpp"

namespace extruder {

/// Smallest admissible predictor denominator 1 - F.
inline constexpr double kFeasibilityMargin = 1e-6;

/// Whether predict() keeps the per-sample P, sigma and F values of the window.
enum class Trace { none, full };

struct PredictorOutput {
    double P = 0.0;        ///< predicted interface position at the prediction time (m)
    double sigma = 0.0;    ///< prediction time (min)
    double delay = 0.0;    ///< delay used to size the window (min)
    std::int64_t first_index = 0;  ///< first history index of the window
    std::int64_t samples = 0;      ///< window length in samples, floor(delay / tau)
    double min_denominator = 1.0;  ///< min over the window of 1 - F (1 for an empty window)
    double max_F = 0.0;            ///< max over the window of F (0 for an empty window)
    // Values at the left end of each window sample, when traced.
    std::vector<double> P_trace;
    std::vector<double> sigma_trace;
    std::vector<double> F_trace;
};

/// F = dD/dt(sigma, P) + dD/dx(sigma, P) f(sigma, P, U); the transport speed is taken at sigma.
double compute_F(const Coefficients& coeffs, const Perturbation& pert, double sigma, double P, double U);

/// Time- and state-dependent predictor: left-endpoint integration of the P and sigma
/// equations over the window [t - D(t, x), t]. Throws FeasibilityError when 1 - F <= 1e-6.
PredictorOutput predict(const Coefficients& coeffs, const Perturbation& pert, double x, double t,
                        const ActuatorHistory& history, Trace trace = Trace::full);

/// State-dependent-only predictor: D_s(x) = (L - x)/theta1 and the unperturbed vector field.
PredictorOutput predict_state_only(const Coefficients& coeffs, double x, double t, const ActuatorHistory& history,
                                   Trace trace = Trace::full);

/// Same nominal predictor used against a plant whose transport speed fluctuates. The
/// boundedness guard Gamma(P, U) < 1 - 1e-6 is checked on every sample (max_F records it).
PredictorOutput predict_estimated(const Coefficients& coeffs, double x, double t, const ActuatorHistory& history,
                                  Trace trace = Trace::full);

struct ControlDecision {
    double U = 0.0;
    PredictorOutput prediction;
};

/// U(t) = v(P(t)) with the full predictor.
ControlDecision predictor_control(const Coefficients& coeffs, const Perturbation& pert, double x, double t,
                                  const ActuatorHistory& history, const BangBangController& law,
                                  Trace trace = Trace::none);

struct PredictionSample {
    std::int64_t index = 0;
    double P = 0.0;
};

/// Window samples (index, P) of a traced prediction.
std::vector<PredictionSample> window_samples(const PredictorOutput& out);

/// max over samples with index >= first_index of |U(index) - v(P)|, the backstepping variable W.
double backstepping_residual(const ActuatorHistory& history, std::span<const PredictionSample> trace,
                             const BangBangController& law, std::int64_t first_index);

}  // namespace extruder
