#include "extruder/bangbang.hpp"

#include <cmath>

#include <fmt/format.h>

#include "extruder/errors.hpp"

namespace extruder {

namespace {

constexpr double kLowerBracket = 1e-9;
constexpr int kMaxDoublings = 60;
constexpr double kRelativeWidth = 1e-12;

// Root of g on (0, inf) where g(0+) < 0 and g -> +inf.
template <class Residual, class Derivative>
double positive_root(Residual g, Derivative dg, const char* side)
{
    double lo = kLowerBracket;
    if (!(g(lo) < 0.0)) {
        throw NoPositiveRootError(fmt::format("{} gain equation has no positive root", side));
    }
    double hi = 1.0;
    int doublings = 0;
    while (!(g(hi) > 0.0)) {
        if (g(hi) < 0.0) {
            lo = hi;
        }
        hi *= 2.0;
        if (++doublings > kMaxDoublings) {
            throw SolverError(fmt::format("{} gain bracket not found after {} doublings", side, kMaxDoublings));
        }
    }
    while (hi - lo > kRelativeWidth * hi) {
        double mid = 0.5 * (lo + hi);
        double g_mid = g(mid);
        if (g_mid == 0.0) {
            return mid;
        }
        (g_mid < 0.0 ? lo : hi) = mid;
    }
    double root = 0.5 * (lo + hi);
    double slope = dg(root);
    if (slope > 0.0) {
        double polished = root - g(root) / slope;
        if (std::abs(g(polished)) <= std::abs(g(root))) {
            root = polished;
        }
    }
    return root;
}

}  // namespace

double s_min(const Coefficients& coeffs, double x_star, double v_max)
{
    if (!(x_star > 0.0 && x_star < coeffs.length)) {
        throw DomainError(fmt::format("setpoint {} must lie strictly inside (0, {})", x_star, coeffs.length));
    }
    double v_star = open_loop_input(coeffs, x_star);
    if (!(v_max > v_star && v_max < 1.0)) {
        throw DomainError(fmt::format("v_max = {} must lie in (v(x*) = {}, 1)", v_max, v_star));
    }
    double left = (v_max - v_star) / x_star;
    double right = v_star / (coeffs.length - x_star);
    return std::max(left, right);
}

double left_gain_residual(const Coefficients& coeffs, const SetpointConfig& sp, double a)
{
    double v_star = open_loop_input(coeffs, sp.x_star);
    return a * (sp.v_max - v_star) + sp.S * std::expm1(-a * sp.x_star);
}

double right_gain_residual(const Coefficients& coeffs, const SetpointConfig& sp, double a)
{
    double v_star = open_loop_input(coeffs, sp.x_star);
    return a * v_star + sp.S * std::expm1(-a * (coeffs.length - sp.x_star));
}

void validate_setpoint(const Coefficients& coeffs, const SetpointConfig& sp)
{
    double minimum = s_min(coeffs, sp.x_star, sp.v_max);
    if (!(sp.S > minimum)) {
        throw NoPositiveRootError(
            fmt::format("setpoint slope S = {} must exceed S_min = {:.6g} at x* = {}", sp.S, minimum, sp.x_star));
    }
}

ControllerGains solve_gains(const SetpointConfig& sp, const Coefficients& coeffs)
{
    validate_setpoint(coeffs, sp);
    double v_star = open_loop_input(coeffs, sp.x_star);
    double width_l = sp.x_star;
    double width_r = coeffs.length - sp.x_star;

    ControllerGains gains;
    gains.a_l = positive_root(
        [&](double a) { return left_gain_residual(coeffs, sp, a); },
        [&](double a) { return (sp.v_max - v_star) - sp.S * width_l * std::exp(-a * width_l); }, "left");
    gains.a_r = positive_root(
        [&](double a) { return right_gain_residual(coeffs, sp, a); },
        [&](double a) { return v_star - sp.S * width_r * std::exp(-a * width_r); }, "right");
    gains.residual_l = left_gain_residual(coeffs, sp, gains.a_l);
    gains.residual_r = right_gain_residual(coeffs, sp, gains.a_r);
    return gains;
}

double control(const Coefficients& coeffs, const SetpointConfig& sp, const ControllerGains& gains, double x)
{
    const double L = coeffs.length;
    if (!(x >= 0.0 && x <= L)) {
        throw DomainError(fmt::format("control evaluated at {} outside [0, {}]", x, L));
    }
    const double xs = sp.x_star;
    const double v_star = open_loop_input(coeffs, xs);
    if (x == xs) {
        return v_star;
    }
    if (x < xs) {
        // v_max - (v_max - v*) e^{a(x-x*)} (1 - e^{-a x}) / (1 - e^{-a x*})
        double a = gains.a_l;
        double blend = std::exp(a * (x - xs)) * std::expm1(-a * x) / std::expm1(-a * xs);
        return sp.v_max - (sp.v_max - v_star) * blend;
    }
    // v* e^{-a(x-x*)} (1 - e^{-a(L-x)}) / (1 - e^{-a(L-x*)}), written to keep precision near L
    double a = gains.a_r;
    return v_star * std::exp(-a * (x - xs)) * std::expm1(-a * (L - x)) / std::expm1(-a * (L - xs));
}

BangBangController::BangBangController(const Coefficients& coeffs, const SetpointConfig& setpoint)
    : coeffs_(coeffs), setpoint_(setpoint), gains_(solve_gains(setpoint, coeffs)),
      v_star_(open_loop_input(coeffs, setpoint.x_star))
{
}

}  // namespace extruder
