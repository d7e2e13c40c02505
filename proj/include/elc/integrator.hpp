#pragma once

// Dormand-Prince 5(4) with PI-free step control. Steps are clipped so that
// every requested output time is hit exactly; no interpolation is involved.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "elc/errors.hpp"

namespace elc {

template <typename Scalar>
struct StepStats {
    int accepted = 0;
    int rejected = 0;
    Scalar last_step{};
};

/// Integrates y' = f(t, y) from 0 through the sorted, nonnegative `times`,
/// returning the state at each of them. `f` maps (t, y) to y'.
template <typename Scalar, typename Rhs>
std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> dopri5(Rhs&& f, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y,
                                                               const std::vector<Scalar>& times, Scalar tol,
                                                               StepStats<Scalar>* stats = nullptr)
{
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    static constexpr Scalar c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr Scalar a21 = 1.0 / 5;
    static constexpr Scalar a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr Scalar a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr Scalar a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr Scalar a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr Scalar b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr Scalar e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    std::vector<Vec> out;
    out.reserve(times.size());
    Scalar t = 0;
    Vec k1 = f(t, y);
    Scalar h = std::max<Scalar>(Scalar(1e-3), times.empty() ? Scalar(0) : times.back() * Scalar(1e-3));
    StepStats<Scalar> local;

    for (Scalar target : times) {
        if (target < t) throw Error("invalid_times", "output times must be sorted and nonnegative");
        while (t < target) {
            const Scalar remaining = target - t;
            bool clipped = false;
            Scalar step = h;
            if (step >= remaining) {
                step = remaining;
                clipped = true;
            }
            const Vec k2 = f(t + c2 * step, y + step * (a21 * k1));
            const Vec k3 = f(t + c3 * step, y + step * (a31 * k1 + a32 * k2));
            const Vec k4 = f(t + c4 * step, y + step * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vec k5 = f(t + c5 * step, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vec k6 = f(t + step, y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vec y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vec k7 = f(t + step, y_new);
            const Vec err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            Scalar norm = 0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const Scalar sc = tol + tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
                norm += (err(i) / sc) * (err(i) / sc);
            }
            norm = y.size() ? std::sqrt(norm / static_cast<Scalar>(y.size())) : Scalar(0);
            if (!std::isfinite(norm)) norm = Scalar(1e10);

            const Scalar factor = std::clamp<Scalar>(Scalar(0.9) * std::pow(std::max(norm, Scalar(1e-10)), Scalar(-0.2)),
                                                     Scalar(0.2), Scalar(5.0));
            if (norm <= 1) {
                t = clipped ? target : t + step;
                y = y_new;
                k1 = k7;
                ++local.accepted;
                local.last_step = step;
                // A clipped step says nothing about the natural step size.
                if (!clipped || factor < 1) h = step * factor;
            } else {
                ++local.rejected;
                h = step * std::max<Scalar>(factor, Scalar(0.2));
            }
            if (h < Scalar(1e-14) * (Scalar(1) + std::abs(t)))
                throw SolverError("step_collapse", "integrator step size collapsed at t = " + std::to_string(t));
        }
        out.push_back(y);
    }
    if (stats) *stats = local;
    return out;
}

}  // namespace elc
