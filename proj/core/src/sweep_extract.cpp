#include <algorithm>
#include <cmath>

#include "crsim/ecm_device.hpp"
#include "crsim/errors.hpp"
#include "transient.hpp"

namespace crsim {

namespace {

double triangle(double t, double amplitude, double rate) {
    const double s = t * rate;
    if (s <= amplitude) return s;
    if (s <= 3.0 * amplitude) return 2.0 * amplitude - s;
    return s - 4.0 * amplitude;
}

}  // namespace

std::vector<UnitSample> sweep_iv_unit(double amplitude, double rate, const EcmState& s0,
                                      const EcmParams& p, const SweepOptions& opt) {
    if (!(amplitude > 0.0)) throw ArgumentError("sweep_iv_unit: amplitude must be positive");
    if (!(rate > 0.0)) throw ArgumentError("sweep_iv_unit: rate must be positive");
    if (opt.samples < 4) throw ArgumentError("sweep_iv_unit: need at least 4 samples");

    const double period = 4.0 * amplitude / rate;
    const int n = opt.samples;
    TransientOptions topt;
    topt.dt_max = period / n;

    auto rhs = [&](double t, const detail::Gaps<1>& y) {
        const CellSolution sol = solve_cell_dc(triangle(t, amplitude, rate), EcmState{y[0]}, p);
        detail::GapRate<1> r;
        r.dxdt[0] = state_derivative(sol.i_ion, p);
        r.current = sol.i_total;
        return r;
    };
    auto ignore = [](double, const detail::Gaps<1>&, const detail::GapRate<1>&) {};

    std::vector<UnitSample> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    detail::Gaps<1> y{clamp_gap(s0.x, p)};
    double hint = topt.dt_max;
    for (int k = 0; k <= n; ++k) {
        const double t = period * k / n;
        if (k > 0) y = detail::integrate<1>(y, period * (k - 1) / n, t, rhs, ignore, p, topt, hint);
        const double v = triangle(t, amplitude, rate);
        const CellSolution sol = solve_cell_dc(v, EcmState{y[0]}, p);
        out.push_back({t, v, sol.i_total, y[0]});
    }
    return out;
}

UnitLandmarks extract_unit_landmarks(const std::vector<UnitSample>& curve, const EcmParams& p,
                                     double fraction) {
    UnitLandmarks out;
    if (curve.empty()) return out;
    const double mid = p.gap_midpoint();

    // positive half: from the start until the voltage first turns negative
    std::size_t split = curve.size();
    for (std::size_t k = 1; k < curve.size(); ++k) {
        if (curve[k].v < 0.0) {
            split = k;
            break;
        }
    }

    double peak_pos = 0.0;
    bool set_happened = false;
    for (std::size_t k = 0; k < split; ++k) {
        peak_pos = std::max(peak_pos, std::abs(curve[k].i));
        if (curve[k].x < mid && curve[0].x >= mid) set_happened = true;
    }
    if (set_happened && peak_pos > 0.0) {
        for (std::size_t k = 0; k < split; ++k) {
            if (curve[k].v > 0.0 && std::abs(curve[k].i) >= fraction * peak_pos) {
                out.v_set = curve[k].v;
                break;
            }
        }
    }

    if (split < curve.size() && curve[split - 1].x < mid) {
        bool reset_happened = false;
        std::size_t arg = split;
        for (std::size_t k = split; k < curve.size(); ++k) {
            if (curve[k].v >= 0.0) continue;
            if (std::abs(curve[k].i) > std::abs(curve[arg].i)) arg = k;
            if (curve[k].x >= mid) reset_happened = true;
        }
        if (reset_happened) out.v_reset = curve[arg].v;
    }
    return out;
}

}  // namespace crsim
