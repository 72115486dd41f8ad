#include <algorithm>
#include <cmath>
#include <limits>

#include "crsim/crs_cell.hpp"
#include "crsim/errors.hpp"
#include "crsim/exec.hpp"

namespace crsim {

namespace {

struct Reached {
    double t;
};

TransientOptions horizon_options(double t_max) {
    TransientOptions t;
    t.dt_max = t_max / 2000.0;
    return t;
}

double displacement(const CrsDeviceState& a, const CrsDeviceState& b) {
    return std::max(std::abs(a.top.x - b.top.x), std::abs(a.bottom.x - b.bottom.x));
}

}  // namespace

std::optional<double> crs_switch_time(const EcmParams& ep, double v, bool to_one, double t_max) {
    if (!(t_max > 0.0)) throw ArgumentError("crs_switch_time: t_max must be positive");
    const CrsLogicState target = to_one ? CrsLogicState::one : CrsLogicState::zero;
    const double mid = ep.gap_midpoint();
    try {
        drive_crs(CrsDeviceState::of(!to_one, ep), v, t_max, ep, horizon_options(t_max),
                  [&](double t, const CrsDeviceState& s, double) {
                      if (try_decode_state(s, mid) == target) throw Reached{t};
                  });
    } catch (const Reached& r) {
        return r.t;
    }
    return std::nullopt;
}

std::optional<double> crs_drift_time(const EcmParams& ep, bool stored_bit, double v, double budget,
                                     double t_max) {
    if (!(budget > 0.0)) throw ArgumentError("crs_drift_time: budget must be positive");
    if (!(t_max > 0.0)) throw ArgumentError("crs_drift_time: t_max must be positive");
    const CrsDeviceState s0 = CrsDeviceState::of(stored_bit, ep);
    double t_prev = 0.0;
    double d_prev = 0.0;
    try {
        drive_crs(s0, v, t_max, ep, horizon_options(t_max), [&](double t, const CrsDeviceState& s, double) {
            const double d = displacement(s, s0);
            if (d >= budget) throw Reached{t_prev + (t - t_prev) * (budget - d_prev) / (d - d_prev)};
            t_prev = t;
            d_prev = d;
        });
    } catch (const Reached& r) {
        return r.t;
    }
    return std::nullopt;
}

double crs_drift_after(const EcmParams& ep, bool stored_bit, double v, double duration) {
    const CrsDeviceState s0 = CrsDeviceState::of(stored_bit, ep);
    double moved = 0.0;
    drive_crs(s0, v, duration, ep, horizon_options(duration),
              [&](double, const CrsDeviceState& s, double) { moved = std::max(moved, displacement(s, s0)); });
    return moved;
}

double read_peak_current(const EcmParams& ep, const PulseParams& pp, bool stored_bit) {
    CrsDeviceState s = CrsDeviceState::of(stored_bit, ep);
    return readout_cell(s, pp, ep).peak_current;
}

Calibration calibrate_pulse(const EcmParams& ep, double target_margin, const CalibrationOptions& opt) {
    ep.validate();
    if (!(target_margin > 1.0)) throw ArgumentError("calibrate_pulse: target_margin must exceed 1");
    if (!(opt.v_step > 0.0) || !(opt.v_max >= opt.v_min) || !(opt.v_min > 0.0)) {
        throw ArgumentError("calibrate_pulse: invalid voltage grid");
    }
    if (!(opt.write_safety >= 1.0) || !(opt.max_stretch >= 1.0)) {
        throw ArgumentError("calibrate_pulse: write_safety and max_stretch must be >= 1");
    }

    Calibration cal;
    cal.target_margin = target_margin;
    cal.drift_budget = (ep.l - ep.x_min) / target_margin;
    const double ratio_needed = target_margin * target_margin;
    std::optional<std::size_t> best;

    const int n_grid = static_cast<int>(std::floor((opt.v_max - opt.v_min) / opt.v_step + 1e-9)) + 1;
    for (int g = 0; g < n_grid; ++g) {
        KineticsPoint k;
        k.v_w = opt.v_min + g * opt.v_step;

        const auto up = crs_switch_time(ep, k.v_w, true, opt.t_max);
        const auto down = crs_switch_time(ep, -k.v_w, false, opt.t_max);
        if (up && down) k.t_write = std::max(*up, *down);

        k.t_half_drift = opt.t_max;
        for (bool bit : {false, true}) {
            for (double v : {0.5 * k.v_w, -0.5 * k.v_w}) {
                const auto t = crs_drift_time(ep, bit, v, cal.drift_budget, opt.t_max);
                if (t && *t < k.t_half_drift) {
                    k.t_half_drift = *t;
                    k.half_drift_reached = true;
                }
            }
        }

        if (k.t_write) {
            const double t_min = 2.0 * opt.write_safety * *k.t_write;
            k.t_pulse = std::min(std::sqrt(t_min * k.t_half_drift), opt.max_stretch * t_min);
            PulseParams probe = opt.seed;
            probe.v_w = k.v_w;
            probe.t_pulse = k.t_pulse;
            k.spike_peak = read_peak_current(ep, probe, false);
            k.nospike_peak = read_peak_current(ep, probe, true);
            const double write_room = k.t_pulse / t_min;
            const double drift_room = k.t_half_drift / k.t_pulse;
            const double read_room = k.nospike_peak > 0.0 ? k.spike_peak / k.nospike_peak / ratio_needed
                                                           : std::numeric_limits<double>::infinity();
            k.feasible = write_room >= 1.0 && drift_room > 1.0 && read_room >= 1.0;
            k.score = std::min({std::log(write_room), std::log(drift_room), std::log(read_room)});
        }
        cal.report.push_back(k);
        if (k.feasible && (!best || k.score > cal.report[*best].score)) best = cal.report.size() - 1;
    }

    if (!best) throw CalibrationError("no pulse amplitude on the grid satisfies write, drift and read margins");
    cal.chosen = cal.report[*best];
    cal.pulse = opt.seed;
    cal.pulse.v_w = cal.chosen.v_w;
    cal.pulse.t_pulse = cal.chosen.t_pulse;
    cal.pulse.i_spike = std::sqrt(cal.chosen.spike_peak * cal.chosen.nospike_peak);
    return cal;
}

}  // namespace crsim
