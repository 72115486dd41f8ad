#pragma once

// Independent reference implementations used only by tests.

#include <cmath>

#include "crsim/ecm_device.hpp"

namespace oracle {

inline double thermal(const crsim::EcmParams& p) { return p.k_b * p.t / (p.z * p.e); }

inline double tafel(double eta, bool positive_cell, bool tip, const crsim::EcmParams& p) {
    const double i0 = p.j0 * p.a_fil;
    const double vt = thermal(p);
    // The tip interface runs the reverse reaction, so its coefficients swap.
    const double c_fwd = tip ? p.alpha : 1.0 - p.alpha;
    const double c_rev = tip ? 1.0 - p.alpha : p.alpha;
    if (positive_cell) return i0 * (std::exp(c_fwd * eta / vt) - 1.0);
    return i0 * (1.0 - std::exp(-c_rev * eta / vt));
}

inline double tunnel_g(double x, const crsim::EcmParams& p) {
    const double k = std::sqrt(2.0 * p.m_eff * p.dw0);
    const double pref = 3.0 * k / (2.0 * x) * (p.e / p.h) * (p.e / p.h);
    return pref * std::exp(-4.0 * M_PI * x * k / p.h) * p.a_fil;
}

/// Root of an increasing function on [lo, hi].
template <class F>
double bisect(F&& f, double lo, double hi, int iters = 200) {
    for (int k = 0; k < iters; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct Point {
    double eta1, eta2, i_ion, i_tu, i_total;
};

/// Nested bisection: inner on eta2 for a given eta1, outer on eta1 against
/// the applied voltage.
inline Point cell(double v, double x, const crsim::EcmParams& p) {
    const bool pos = v > 0;
    const double r_ion = x / (p.sigma_ion * p.a_fil);
    const double r_ser = p.r_el + (p.l - x) / (p.sigma_fil * p.a_fil);
    auto at = [&](double eta1) {
        const double i = tafel(eta1, pos, false, p);
        const double eta2 = bisect([&](double e2) { return tafel(e2, pos, true, p) - i; }, pos ? 0.0 : v,
                                   pos ? v : 0.0);
        const double v_tu = eta1 + eta2 + i * r_ion;
        const double i_tu = tunnel_g(x, p) * v_tu;
        const double total = i + i_tu;
        return Point{eta1, eta2, i, i_tu, total};
    };
    auto resid = [&](double eta1) {
        const Point q = at(eta1);
        return q.eta1 + q.eta2 + q.i_ion * r_ion + q.i_total * r_ser - v;
    };
    const double eta1 = pos ? bisect(resid, 0.0, v) : bisect(resid, v, 0.0);
    return at(eta1);
}

}  // namespace oracle
