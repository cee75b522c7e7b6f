#pragma once

#include <optional>
#include <string_view>

#include "extruder/model.hpp"

namespace extruder {

/// Which sufficient condition on the perturbation certified the delay-rate bound.
enum class FeasibilityBranch {
    none,
    increasing,      ///< Lambda strictly increasing on [0, L]: lhs < theta1 theta2 / (1 + theta2 L)^2
    decreasing,      ///< band up to theta1 / L with theta2 < 1/L
    interior_max,    ///< band up to 4 theta1 theta2 / (1 + theta2 L)^2 with theta2 > 1/L
};

std::string_view to_string(FeasibilityBranch b);

struct FeasibilityBounds {
    double increasing = 0.0;    ///< theta1 theta2 / (1 + theta2 L)^2
    double decreasing = 0.0;    ///< theta1 / L
    double interior_max = 0.0;  ///< 4 theta1 theta2 / (1 + theta2 L)^2
};

struct FeasibilityVerdict {
    bool satisfied = false;
    FeasibilityBranch branch = FeasibilityBranch::none;
    double lhs = 0.0;  ///< eps omega / (1 - eps)^2
    FeasibilityBounds bounds;
    std::optional<double> x1;  ///< interior stationary point of Lambda, when it lies in (0, L)
    double sup_lambda = 0.0;   ///< max of Lambda on a 10^4-point grid of [0, L]
};

/// Upper bound of the delay rate over U in [0, v_max] at interface position x:
/// Lambda(x) = eps omega (L - x) / (theta1 (1 - eps)^2) + theta2 x / (1 + theta2 x).
double lambda_profile(const Coefficients& coeffs, const Perturbation& pert, double x);

struct StationaryPoint {
    enum class Where { undefined, below, inside, above };
    Where where = Where::undefined;
    double x1 = 0.0;  ///< meaningful unless where == undefined

    std::optional<double> inside_value() const
    {
        return where == Where::inside ? std::optional<double>(x1) : std::nullopt;
    }
};

/// x1 = (1 - eps) sqrt(theta1 / (theta2 eps omega)) - 1/theta2; undefined when eps * omega = 0.
StationaryPoint stationary_point(const Coefficients& coeffs, const Perturbation& pert);

/// Grid maximum of Lambda over [0, L].
double sup_lambda(const Coefficients& coeffs, const Perturbation& pert, int points = 10000);

/// Evaluates the three sufficient conditions (strict inequalities) in order and reports the first
/// that holds, together with the grid supremum of Lambda as a cross-check.
FeasibilityVerdict check_feasibility(const Coefficients& coeffs, const Perturbation& pert);

/// Largest admissible perturbation size over all theta2 at fixed theta1 and L:
/// max of theta1 theta2 / (1 + theta2 L)^2, attained at theta2 = 1/L with value theta1 / (4L).
struct PerturbationCeiling {
    double theta2 = 0.0;
    double value = 0.0;
};
PerturbationCeiling perturbation_ceiling(double theta1, double L);

}  // namespace extruder
