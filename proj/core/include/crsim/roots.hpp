#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "crsim/errors.hpp"

namespace crsim {

struct RootOptions {
    double f_tol = 0.0;       // absolute tolerance on |f|
    double x_tol = 0.0;       // absolute bracket width at which to stop
    int max_iterations = 200;
};

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Safeguarded Newton iteration for a nondecreasing scalar function on a
/// bracket [lo, hi] with f(lo) <= 0 <= f(hi). `f(x, df)` returns f(x) and
/// writes f'(x) into `df`. Falls back to bisection whenever the Newton
/// step leaves the bracket or fails to halve the residual.
template <typename F>
RootResult solve_increasing(F&& f, double lo, double hi, double guess, const RootOptions& opt,
                            const char* what = "root solve") {
    if (!(lo <= hi)) throw ArgumentError(std::string(what) + ": empty bracket");
    double x = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
    double prev_abs = std::numeric_limits<double>::infinity();
    double fx = 0.0;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        double dfx = 0.0;
        fx = f(x, dfx);
        if (!std::isfinite(fx)) throw DomainError(std::string(what) + ": non-finite residual");
        if (std::abs(fx) <= opt.f_tol) return {x, fx, it};
        if (fx < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo <= opt.x_tol) return {x, fx, it};

        double next = 0.5 * (lo + hi);
        if (dfx > 0.0 && std::isfinite(dfx) && std::abs(fx) <= 0.5 * prev_abs) {
            const double newton = x - fx / dfx;
            if (newton > lo && newton < hi) next = newton;
        }
        prev_abs = std::abs(fx);
        if (next == x) return {x, fx, it};
        x = next;
    }
    throw ConvergenceError(std::string(what) + ": no convergence", fx);
}

}  // namespace crsim
