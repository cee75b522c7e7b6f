#include <cmath>
#include <numbers>

#include <doctest.h>

#include "extruder/bangbang.hpp"
#include "extruder/errors.hpp"
#include "extruder/history.hpp"
#include "extruder/model.hpp"
#include "extruder/predictor.hpp"
#include "oracles.hpp"

using namespace extruder;
using doctest::Approx;

namespace {

const Coefficients kC = derive_coefficients(ExtruderParams{});

// Constant history ending just before step i, long enough for any delay under pert.
ActuatorHistory steady_history(double level, double tau, std::int64_t i, const Perturbation& pert)
{
    auto window = static_cast<std::int64_t>(ActuatorHistory::window_capacity(tau, max_delay(kC, pert)));
    return ActuatorHistory::constant(tau, level, i - window, i);
}

SetpointConfig default_setpoint()
{
    SetpointConfig sp;
    sp.S = s_min(kC, sp.x_star, sp.v_max) + 30.0;
    return sp;
}

// Max over the traced window of |P - oracle| for a constant input, eps = 0.
double window_oracle_error(double tau, double x, double U0, double t)
{
    const Perturbation none{0.0, 0.0};
    const auto i = static_cast<std::int64_t>(std::llround(t / tau));
    auto out = predict(kC, none, x, static_cast<double>(i) * tau, steady_history(U0, tau, i, none));
    const double h = 1e-6;
    auto f = [&](double y) { return -oracle::kTheta1 * oracle::gamma(oracle::kTheta2, y, U0); };
    double worst = 0.0;
    double y = x;
    double s = 0.0;
    for (std::size_t k = 0; k < out.P_trace.size(); ++k) {
        double target = out.sigma_trace[k] - static_cast<double>(i) * tau;
        while (s + h <= target) {
            y = oracle::rk4_step(f, y, h);
            s += h;
        }
        double here = oracle::rk4_step(f, y, target - s);
        worst = std::max(worst, std::abs(out.P_trace[k] - here));
    }
    return worst;
}

}  // namespace

TEST_CASE("actuator history")
{
    ActuatorHistory h(0.5, 3);
    CHECK(h.empty());
    h.push(0.1);
    h.push(0.2);
    h.push(0.3);
    h.push(0.4);
    CHECK(h.size() == 3);
    CHECK(h.first_index() == 1);
    CHECK(h.next_index() == 4);
    CHECK(h.at(1) == 0.2);
    CHECK(h.at(3) == 0.4);
    CHECK_THROWS_AS(h.at(0), DomainError);
    CHECK(h.value_at(1.0) == 0.3);
    CHECK(h.value_at(0.75) == Approx(0.25));
    CHECK_THROWS_AS(h.push(1.0), DomainError);
    CHECK_THROWS_AS(h.push(-0.1), DomainError);
    CHECK_THROWS_AS(ActuatorHistory(0.0), ConfigError);

    auto c = ActuatorHistory::constant(0.1, 0.25, -5, 2);
    CHECK(c.first_index() == -5);
    CHECK(c.next_index() == 2);
    CHECK(c.time_of(-5) == Approx(-0.5));
    CHECK(c.value_at(-0.123) == 0.25);

    CHECK(ActuatorHistory::window_capacity(1e-4, max_delay(kC, {0.1, 3.5})) >= 2470);
    CHECK(ActuatorHistory::window_capacity(1e-4, max_delay(kC, {0.0, 0.0})) >= 2223);
}

TEST_CASE("delay-rate bound examples")
{
    CHECK(compute_F(kC, {0.0, 0.0}, 0.3, 0.16, open_loop_input(kC, 0.16)) == Approx(0.0).epsilon(1e-15));
    CHECK(compute_F(kC, {0.0, 0.0}, 0.3, 0.1, 0.0) == Approx(0.17453).epsilon(1e-4));
    const double sigma = std::numbers::pi / (2 * 3.5);
    CHECK(compute_F(kC, {0.1, 3.5}, sigma, 0.1, open_loop_input(kC, 0.1)) == Approx(0.03889).epsilon(1e-3));
}

TEST_CASE("empty window at the outlet")
{
    const double tau = 1e-3;
    auto hist = steady_history(0.2, tau, 100, {0.1, 3.5});
    auto out = predict(kC, {0.1, 3.5}, 0.2, 0.1, hist);
    CHECK(out.P == 0.2);
    CHECK(out.sigma == Approx(0.1));
    CHECK(out.samples == 0);
    auto so = predict_state_only(kC, 0.2, 0.1, hist);
    CHECK(so.P == 0.2);
}

TEST_CASE("window starts at the current state")
{
    const double tau = 1e-4;
    const Perturbation pert{0.1, 3.5};
    auto hist = steady_history(0.3, tau, 12345, pert);
    auto out = predict(kC, pert, 0.07, 1.2345, hist);
    REQUIRE_FALSE(out.P_trace.empty());
    CHECK(out.P_trace.front() == 0.07);
    CHECK(out.sigma_trace.front() == 1.2345);
    CHECK(out.samples == static_cast<std::int64_t>(std::floor(delay(kC, pert, 12345 * tau, 0.07) / tau)));
    CHECK(out.sigma >= 1.2345);
    CHECK(out.P >= 0.0);
    CHECK(out.P <= 0.2);
    CHECK(out.min_denominator > 0.0);
}

TEST_CASE("equilibrium fixed point")
{
    const Perturbation none{0.0, 0.0};
    const double v_star = open_loop_input(kC, 0.16);
    for (double tau : {1e-4, 5e-5}) {
        const std::int64_t i = std::llround(1.0 / tau);
        const double t = static_cast<double>(i) * tau;
        auto hist = steady_history(v_star, tau, i, none);
        for (auto out : {predict(kC, none, 0.16, t, hist), predict_state_only(kC, 0.16, t, hist),
                         predict_estimated(kC, 0.16, t, hist)}) {
            CHECK(std::abs(out.P - 0.16) <= tau);
            CHECK(std::abs(out.sigma - t - 0.04 / 0.9) <= tau);
            CHECK(std::abs(out.sigma - t - delay(kC, none, out.sigma, out.P)) <= tau);
        }
    }
}

TEST_CASE("constant input prediction matches the forward oracle")
{
    const double tau = 1e-4;
    auto ref = oracle::forward_prediction(oracle::kTheta1, oracle::kTheta2, oracle::kL, 0.1, 0.3, tau / 100);
    const std::int64_t i = 10000;
    auto out = predict(kC, {0.0, 0.0}, 0.1, 1.0, steady_history(0.3, tau, i, {0.0, 0.0}));
    CHECK(std::abs(out.P - ref.P) < 10 * tau);
    CHECK(std::abs(out.sigma - 1.0 - ref.s) < 10 * tau);
    CHECK(window_oracle_error(tau, 0.1, 0.3, 1.0) < 10 * tau);
}

TEST_CASE("oracle error shrinks at first order")
{
    for (double U0 : {0.0, 0.3, 0.6}) {
        double coarse = window_oracle_error(2e-4, 0.1, U0, 1.0);
        double fine = window_oracle_error(1e-4, 0.1, U0, 1.0);
        CAPTURE(U0);
        CAPTURE(coarse);
        CAPTURE(fine);
        CHECK(coarse / fine > 1.6);
        CHECK(coarse / fine < 2.5);
    }
}

TEST_CASE("the three predictors coincide without fluctuation")
{
    const double tau = 1e-4;
    const Perturbation none{0.0, 0.0};
    const std::int64_t i = 3000;
    // Slowly oscillating input.
    ActuatorHistory ramp(tau);
    for (std::int64_t k = 0; k < i; ++k) {
        ramp.push(0.3 + 0.2 * std::sin(0.01 * static_cast<double>(k)));
    }
    const double t = static_cast<double>(i) * tau;
    for (double x : {0.02, 0.1, 0.15, 0.19}) {
        auto a = predict(kC, none, x, t, ramp);
        auto b = predict_state_only(kC, x, t, ramp);
        auto c = predict_estimated(kC, x, t, ramp);
        CHECK(std::abs(a.P - b.P) < 1e-12);
        CHECK(std::abs(a.sigma - b.sigma) < 1e-12);
        CHECK(std::abs(b.P - c.P) < 1e-12);
        CHECK(std::abs(b.sigma - c.sigma) < 1e-12);
    }
}

TEST_CASE("estimated predictor stays nonnegative for admissible inputs")
{
    const double tau = 1e-4;
    ActuatorHistory hist(tau);
    for (int k = 0; k < 3000; ++k) {
        hist.push(k % 400 < 200 ? 0.0 : 0.9);
    }
    for (double x : {0.0, 0.01, 0.1, 0.19}) {
        auto out = predict_estimated(kC, x, 3000 * tau, hist);
        for (double P : out.P_trace) {
            CHECK(P >= 0.0);
        }
        CHECK(out.P >= 0.0);
    }
}

TEST_CASE("infeasible delay rate aborts the prediction")
{
    const double tau = 1e-4;
    const Perturbation wild{0.9, 60.0};
    const std::int64_t i = 20000;
    CHECK_THROWS_AS(predict(kC, wild, 0.0, static_cast<double>(i) * tau, steady_history(0.1, tau, i, wild)),
                    FeasibilityError);
}

TEST_CASE("predictor control at the law's anchor points")
{
    const double tau = 1e-4;
    const Perturbation pert{0.1, 3.5};
    BangBangController law(kC, default_setpoint());
    const std::int64_t i = 5000;
    const double t = static_cast<double>(i) * tau;

    // Outlet: empty window, P = L.
    CHECK(predictor_control(kC, pert, 0.2, t, steady_history(0.0, tau, i, pert), law).U == 0.0);
    // Empty extruder with no inflow stays empty: P = 0.
    auto at_zero = predictor_control(kC, pert, 0.0, t, steady_history(0.0, tau, i, pert), law);
    CHECK(at_zero.prediction.P == 0.0);
    CHECK(at_zero.U == 0.9);
    // Equilibrium history: P = x* up to O(tau).
    auto eq = predictor_control(kC, {0.0, 0.0}, 0.16, t, steady_history(law.equilibrium_input(), tau, i, pert), law);
    CHECK(eq.U == Approx(0.25278).epsilon(1e-4));
}

TEST_CASE("backstepping residual")
{
    const double tau = 1e-4;
    const Perturbation pert{0.1, 3.5};
    BangBangController law(kC, default_setpoint());
    const std::int64_t i = 5000;
    const double t = static_cast<double>(i) * tau;

    // Zero initial actuator state: W = U - v(P) = -v(P) on the window.
    auto hist = steady_history(0.0, tau, i, pert);
    auto out = predict(kC, pert, 0.1, t, hist);
    auto samples = window_samples(out);
    REQUIRE_FALSE(samples.empty());
    double expected = 0.0;
    for (const auto& s : samples) {
        expected = std::max(expected, law(s.P));
    }
    CHECK(backstepping_residual(hist, samples, law, samples.front().index) == Approx(expected));
    CHECK(expected > 0.1);

    // An input that ignores the prediction leaves a nonzero residual.
    auto unc = steady_history(law(0.1), tau, i, pert);
    auto out2 = predict(kC, pert, 0.1, t, unc);
    auto s2 = window_samples(out2);
    CHECK(backstepping_residual(unc, s2, law, s2.front().index) > 0.0);

    // Samples before first_index are ignored.
    CHECK(backstepping_residual(hist, samples, law, samples.back().index + 1) == 0.0);
}
