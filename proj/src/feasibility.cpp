#include "extruder/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "extruder/errors.hpp"

namespace extruder {

std::string_view to_string(FeasibilityBranch b)
{
    switch (b) {
    case FeasibilityBranch::increasing:
        return "increasing-profile";
    case FeasibilityBranch::decreasing:
        return "decreasing-profile";
    case FeasibilityBranch::interior_max:
        return "interior-maximum";
    case FeasibilityBranch::none:
        break;
    }
    return "none";
}

namespace {

double perturbation_size(const Perturbation& pert)
{
    double r = 1.0 - pert.eps;
    return pert.eps * pert.omega / (r * r);
}

}  // namespace

double lambda_profile(const Coefficients& coeffs, const Perturbation& pert, double x)
{
    return perturbation_size(pert) * (coeffs.length - x) / coeffs.theta1 +
           coeffs.theta2 * x / (1.0 + coeffs.theta2 * x);
}

StationaryPoint stationary_point(const Coefficients& coeffs, const Perturbation& pert)
{
    StationaryPoint sp;
    double eo = pert.eps * pert.omega;
    if (!(eo > 0.0)) {
        return sp;
    }
    sp.x1 = (1.0 - pert.eps) * std::sqrt(coeffs.theta1 / (coeffs.theta2 * eo)) - 1.0 / coeffs.theta2;
    if (sp.x1 <= 0.0) {
        sp.where = StationaryPoint::Where::below;
    } else if (sp.x1 >= coeffs.length) {
        sp.where = StationaryPoint::Where::above;
    } else {
        sp.where = StationaryPoint::Where::inside;
    }
    return sp;
}

double sup_lambda(const Coefficients& coeffs, const Perturbation& pert, int points)
{
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < points; ++j) {
        double x = coeffs.length * static_cast<double>(j) / static_cast<double>(points - 1);
        best = std::max(best, lambda_profile(coeffs, pert, x));
    }
    return best;
}

FeasibilityVerdict check_feasibility(const Coefficients& coeffs, const Perturbation& pert)
{
    pert.validate();
    const double t1 = coeffs.theta1;
    const double t2 = coeffs.theta2;
    const double L = coeffs.length;
    const double denom = (1.0 + t2 * L) * (1.0 + t2 * L);

    FeasibilityVerdict v;
    v.lhs = perturbation_size(pert);
    v.bounds.increasing = t1 * t2 / denom;
    v.bounds.decreasing = t1 / L;
    v.bounds.interior_max = 4.0 * t1 * t2 / denom;
    v.x1 = stationary_point(coeffs, pert).inside_value();
    v.sup_lambda = sup_lambda(coeffs, pert);

    if (v.lhs >= 0.0 && v.lhs < v.bounds.increasing) {
        v.branch = FeasibilityBranch::increasing;
    } else if (v.lhs > v.bounds.increasing && v.lhs < v.bounds.decreasing && t2 < 1.0 / L) {
        v.branch = FeasibilityBranch::decreasing;
    } else if (v.lhs > v.bounds.increasing && v.lhs < v.bounds.interior_max && t2 > 1.0 / L) {
        v.branch = FeasibilityBranch::interior_max;
    }
    v.satisfied = v.branch != FeasibilityBranch::none;

    if (v.satisfied && !(v.sup_lambda < 1.0)) {
        throw Error(fmt::format("feasibility cross-check failed: {} branch holds but grid sup of Lambda is {}",
                                to_string(v.branch), v.sup_lambda));
    }
    return v;
}

PerturbationCeiling perturbation_ceiling(double theta1, double L)
{
    return {1.0 / L, theta1 / (4.0 * L)};
}

}  // namespace extruder
