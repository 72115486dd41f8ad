#pragma once

// Adaptive implicit Euler for the one- or two-gap systems of a unit cell
// or a CRS pair. Each accepted step solves x' = P(x + dt f(t + dt, x')),
// with P the projection onto [x_min, l], by Newton iteration on a
// finite-difference Jacobian. The step is halved when Newton fails or when
// any gap would move further than `max_gap_step`.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "crsim/ecm_device.hpp"
#include "crsim/errors.hpp"

namespace crsim::detail {

template <std::size_t N>
using Gaps = std::array<double, N>;

template <std::size_t N>
struct GapRate {
    Gaps<N> dxdt{};
    double current = 0.0;  // terminal current at the evaluated state [A]
};

inline constexpr double kGapTolerance = 1e-17;  // Newton tolerance on gaps [m]
inline constexpr double kJacobianStep = 1e-14;  // finite-difference step [m]

template <std::size_t N>
bool solve_linear(std::array<std::array<double, N>, N> a, Gaps<N>& b) {
    if constexpr (N == 1) {
        if (a[0][0] == 0.0 || !std::isfinite(a[0][0])) return false;
        b[0] /= a[0][0];
        return std::isfinite(b[0]);
    } else {
        static_assert(N == 2, "only one or two gaps are supported");
        const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if (det == 0.0 || !std::isfinite(det)) return false;
        const double x0 = (b[0] * a[1][1] - a[0][1] * b[1]) / det;
        const double x1 = (a[0][0] * b[1] - a[1][0] * b[0]) / det;
        b = {x0, x1};
        return std::isfinite(x0) && std::isfinite(x1);
    }
}

template <std::size_t N, typename Rhs>
bool implicit_step(const Gaps<N>& y, double t_next, double dt, Rhs& rhs, double lo, double hi,
                   int max_iterations, Gaps<N>& out, GapRate<N>& out_rate) {
    auto project = [&](double v) { return std::clamp(v, lo, hi); };
    auto residual = [&](const Gaps<N>& z, GapRate<N>& r) {
        r = rhs(t_next, z);
        Gaps<N> f{};
        for (std::size_t i = 0; i < N; ++i) f[i] = z[i] - project(y[i] + dt * r.dxdt[i]);
        return f;
    };

    Gaps<N> z = y;
    GapRate<N> rate;
    try {
        for (int it = 0; it < max_iterations; ++it) {
            Gaps<N> f = residual(z, rate);
            double worst = 0.0;
            for (double v : f) worst = std::max(worst, std::abs(v));
            if (worst <= kGapTolerance) {
                out = z;
                out_rate = rate;
                return true;
            }
            std::array<std::array<double, N>, N> jac{};
            for (std::size_t j = 0; j < N; ++j) {
                Gaps<N> zp = z;
                const double step = (z[j] + kJacobianStep <= hi) ? kJacobianStep : -kJacobianStep;
                zp[j] += step;
                GapRate<N> scratch;
                const Gaps<N> fp = residual(zp, scratch);
                for (std::size_t i = 0; i < N; ++i) jac[i][j] = (fp[i] - f[i]) / step;
            }
            Gaps<N> delta{};
            for (std::size_t i = 0; i < N; ++i) delta[i] = -f[i];
            if (!solve_linear<N>(jac, delta)) return false;
            for (std::size_t i = 0; i < N; ++i) z[i] = project(z[i] + delta[i]);
        }
    } catch (const ConvergenceError&) {
        return false;
    } catch (const DomainError&) {
        return false;
    }
    return false;
}

/// Integrates from t0 to t1. `observer(t, gaps, rate)` sees every accepted
/// step. `dt_hint` carries the step size between calls.
template <std::size_t N, typename Rhs, typename Observer>
Gaps<N> integrate(Gaps<N> y, double t0, double t1, Rhs&& rhs, Observer&& observer,
                  const EcmParams& p, const TransientOptions& opt, double& dt_hint) {
    const double lo = p.x_min;
    const double hi = p.l;
    double t = t0;
    double dt = std::min({dt_hint > 0.0 ? dt_hint : opt.dt_max, opt.dt_max, t1 - t0});
    while (t < t1) {
        const bool last = dt >= (t1 - t) * (1.0 - 1e-12);
        const double h = last ? t1 - t : dt;
        const double t_next = last ? t1 : t + h;
        Gaps<N> z{};
        GapRate<N> rate;
        bool ok = implicit_step<N>(y, t_next, h, rhs, lo, hi, opt.newton_iterations, z, rate);
        if (ok) {
            for (std::size_t i = 0; i < N; ++i) {
                if (std::abs(z[i] - y[i]) > opt.max_gap_step) ok = false;
            }
            if (!ok && h <= opt.dt_min) ok = true;
        }
        if (!ok) {
            dt = 0.5 * h;
            if (dt < opt.dt_min) {
                throw ConvergenceError("implicit gap integration stalled at t=" + std::to_string(t),
                                       h);
            }
            continue;
        }
        y = z;
        t = t_next;
        observer(t, y, rate);
        if (!last) dt = std::min(2.0 * h, opt.dt_max);
    }
    dt_hint = dt;
    return y;
}

}  // namespace crsim::detail
