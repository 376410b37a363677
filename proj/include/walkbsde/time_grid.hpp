#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace walkbsde {

/// Uniform mesh on [0,T] with n steps of size h = T/n, together with the
/// floor/ceiling time maps onto the mesh.
class TimeGrid {
public:
    TimeGrid(double horizon, long steps) : T_(horizon), n_(steps) {
        if (!(horizon > 0.0))
            throw std::invalid_argument("time grid horizon must be positive");
        if (steps < 1)
            throw std::invalid_argument("time grid needs at least one step");
        h_ = horizon / static_cast<double>(steps);
    }

    double horizon() const { return T_; }
    long steps() const { return n_; }
    double step() const { return h_; }
    double sqrt_step() const { return std::sqrt(h_); }

    double time_at(long k) const { return static_cast<double>(k) * h_; }

    /// Largest mesh index k with k*h <= t. Exact grid points are snapped
    /// before flooring: t = k*h need not be representable, so a raw floor
    /// of t/h can land one cell short.
    long floor_index(double t) const {
        check_range(t);
        double ratio = t / h_;
        double nearest = std::round(ratio);
        if (std::abs(ratio - nearest) < 1e-9) ratio = nearest;
        long k = static_cast<long>(std::floor(ratio));
        if (k < 0) k = 0;
        if (k > n_) k = n_;
        return k;
    }

    long ceil_index(double t) const {
        check_range(t);
        double ratio = t / h_;
        double nearest = std::round(ratio);
        if (std::abs(ratio - nearest) < 1e-9) ratio = nearest;
        long k = static_cast<long>(std::ceil(ratio));
        if (k < 0) k = 0;
        if (k > n_) k = n_;
        return k;
    }

    double floor_time(double t) const { return time_at(floor_index(t)); }
    double ceil_time(double t) const { return time_at(ceil_index(t)); }

private:
    void check_range(double t) const {
        if (!(t >= -1e-12 * T_) || !(t <= T_ * (1.0 + 1e-12)))
            throw std::invalid_argument("time " + std::to_string(t) +
                                        " outside [0," + std::to_string(T_) + "]");
    }

    double T_;
    long n_;
    double h_;
};

inline TimeGrid make_grid(double horizon, long steps) { return TimeGrid(horizon, steps); }

}  // namespace walkbsde
