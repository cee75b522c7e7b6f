#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>

namespace extruder {

/// Uniformly sampled record of the applied input U on the integer step grid t_k = k * tau.
///
/// Sample indices may be negative (initial actuator state before t0 = 0). Samples are appended
/// in order; when a capacity is set, the oldest samples beyond it are discarded.
class ActuatorHistory {
public:
    /// capacity == 0 keeps every sample.
    explicit ActuatorHistory(double tau, std::size_t capacity = 0);

    /// Constant initial actuator state on indices [first, last).
    static ActuatorHistory constant(double tau, double level, std::int64_t first, std::int64_t last,
                                    std::size_t capacity = 0);

    void push(double U);

    double tau() const { return tau_; }
    bool empty() const { return samples_.empty(); }
    std::size_t size() const { return samples_.size(); }
    std::int64_t first_index() const { return first_; }
    /// Index the next push will receive.
    std::int64_t next_index() const { return first_ + static_cast<std::int64_t>(samples_.size()); }
    double time_of(std::int64_t k) const { return static_cast<double>(k) * tau_; }

    bool contains(std::int64_t k) const { return k >= first_ && k < next_index(); }
    double at(std::int64_t k) const;

    /// Linear interpolation between neighbouring samples; exact at sample times.
    double value_at(double time) const;

    /// Number of samples a window of the given length needs, ceil(length / tau) + 2.
    static std::size_t window_capacity(double tau, double window_length);

private:
    double tau_;
    std::size_t capacity_;
    std::int64_t first_ = 0;
    std::deque<double> samples_;
};

}  // namespace extruder
