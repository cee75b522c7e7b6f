#include "extruder/history.hpp"

#include <cmath>

#include <fmt/format.h>

#include "extruder/errors.hpp"

namespace extruder {

ActuatorHistory::ActuatorHistory(double tau, std::size_t capacity) : tau_(tau), capacity_(capacity)
{
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw ConfigError(fmt::format("sampling step tau = {} must be positive", tau));
    }
}

ActuatorHistory ActuatorHistory::constant(double tau, double level, std::int64_t first, std::int64_t last,
                                          std::size_t capacity)
{
    ActuatorHistory h(tau, capacity);
    h.first_ = first;
    for (std::int64_t k = first; k < last; ++k) {
        h.push(level);
    }
    return h;
}

void ActuatorHistory::push(double U)
{
    if (!(U >= 0.0 && U < 1.0)) {
        throw DomainError(fmt::format("stored input {} outside [0, 1)", U));
    }
    samples_.push_back(U);
    if (capacity_ != 0 && samples_.size() > capacity_) {
        samples_.pop_front();
        ++first_;
    }
}

double ActuatorHistory::at(std::int64_t k) const
{
    if (!contains(k)) {
        throw DomainError(fmt::format("history sample {} not stored (have [{}, {}))", k, first_, next_index()));
    }
    return samples_[static_cast<std::size_t>(k - first_)];
}

double ActuatorHistory::value_at(double time) const
{
    double pos = time / tau_;
    auto k = static_cast<std::int64_t>(std::floor(pos));
    double frac = pos - static_cast<double>(k);
    // snap round-off at sample times
    if (frac < 1e-9) {
        return at(k);
    }
    if (frac > 1.0 - 1e-9) {
        return at(k + 1);
    }
    double lo = at(k);
    double hi = at(k + 1);
    return lo + frac * (hi - lo);
}

std::size_t ActuatorHistory::window_capacity(double tau, double window_length)
{
    return static_cast<std::size_t>(std::ceil(window_length / tau)) + 2;
}

}  // namespace extruder
