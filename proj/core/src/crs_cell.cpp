#include "crsim/crs_cell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crsim/errors.hpp"
#include "crsim/roots.hpp"
#include "transient.hpp"

namespace crsim {

std::string_view to_string(CrsLogicState s) noexcept {
    switch (s) {
        case CrsLogicState::zero:
            return "0";
        case CrsLogicState::one:
            return "1";
        case CrsLogicState::on:
            return "ON";
    }
    return "?";
}

std::optional<CrsLogicState> try_decode_state(const CrsDeviceState& s, double gap_threshold) {
    const bool top_lrs = s.top.x < gap_threshold;
    const bool bottom_lrs = s.bottom.x < gap_threshold;
    if (top_lrs && bottom_lrs) return CrsLogicState::on;
    if (top_lrs) return CrsLogicState::zero;
    if (bottom_lrs) return CrsLogicState::one;
    return std::nullopt;
}

CrsLogicState decode_state(const CrsDeviceState& s, double gap_threshold) {
    if (auto d = try_decode_state(s, gap_threshold)) return *d;
    throw IndeterminateStateError("decode_state: both devices are high resistive");
}

CrsSolution solve_crs_dc(double v, const CrsDeviceState& s, const EcmParams& p) {
    CrsSolution out;
    out.v_applied = v;
    if (v == 0.0) {
        out.top = solve_cell_dc(0.0, s.top, p);
        out.bottom = solve_cell_dc(0.0, s.bottom, p);
        return out;
    }
    // u is the bottom-device voltage; the top device sees -(v - u) in its own
    // polarity. The current mismatch is increasing in u.
    CellSolution top, bottom;
    auto f = [&](double u, double& df) {
        bottom = solve_cell_dc(u, s.bottom, p);
        top = solve_cell_dc(-(v - u), s.top, p);
        const double through_top = -top.i_total;
        const double scale = std::abs(bottom.i_total) + std::abs(through_top) +
                             std::numeric_limits<double>::min();
        df = (bottom.conductance + top.conductance) / scale;
        return (bottom.i_total - through_top) / scale;
    };
    RootOptions opt;
    opt.f_tol = 1e-12;
    opt.x_tol = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(v);
    opt.max_iterations = 400;
    const RootResult r =
        solve_increasing(f, std::min(0.0, v), std::max(0.0, v), 0.5 * v, opt, "solve_crs_dc");
    if (bottom.v_cell != r.x) {
        double unused = 0.0;
        f(r.x, unused);
    }
    out.v_bottom = r.x;
    out.v_top = -(v - r.x);
    out.top = top;
    out.bottom = bottom;
    out.current = bottom.i_total;
    out.current_mismatch = bottom.i_total + top.i_total;
    return out;
}

namespace {

detail::GapRate<2> crs_rate(double v, const detail::Gaps<2>& y, const EcmParams& p) {
    const CrsSolution sol = solve_crs_dc(v, {{y[0]}, {y[1]}}, p);
    detail::GapRate<2> r;
    r.dxdt[0] = state_derivative(sol.top.i_ion, p);
    r.dxdt[1] = state_derivative(sol.bottom.i_ion, p);
    r.current = sol.current;
    return r;
}

double triangle(double t, double amplitude, double rate) {
    const double s = t * rate;
    if (s <= amplitude) return s;
    if (s <= 3.0 * amplitude) return 2.0 * amplitude - s;
    return s - 4.0 * amplitude;
}

}  // namespace

CrsDeviceState drive_crs(const CrsDeviceState& s, double v, double duration, const EcmParams& p,
                         const TransientOptions& opt, const CrsObserver& observer) {
    if (!(duration > 0.0)) throw ArgumentError("drive_crs: duration must be positive");
    detail::Gaps<2> y{clamp_gap(s.top.x, p), clamp_gap(s.bottom.x, p)};
    auto rhs = [&](double, const detail::Gaps<2>& g) { return crs_rate(v, g, p); };
    auto obs = [&](double t, const detail::Gaps<2>& g, const detail::GapRate<2>& r) {
        if (observer) observer(t, {{g[0]}, {g[1]}}, r.current);
    };
    if (v == 0.0) {
        if (observer) observer(duration, {{y[0]}, {y[1]}}, 0.0);
        return {{y[0]}, {y[1]}};
    }
    double hint = std::min(duration, opt.dt_max);
    y = detail::integrate<2>(y, 0.0, duration, rhs, obs, p, opt, hint);
    return {{y[0]}, {y[1]}};
}

CrsDeviceState step_crs_transient(const CrsDeviceState& s, double v, double dt, const EcmParams& p,
                                  const TransientOptions& opt) {
    if (!(dt > 0.0)) throw ArgumentError("step_crs_transient: dt must be positive");
    return drive_crs(s, v, dt, p, opt);
}

CrsSweep sweep_iv_crs(double amplitude, double rate, const CrsDeviceState& s0, const EcmParams& p,
                      const SweepOptions& opt) {
    if (!(amplitude > 0.0)) throw ArgumentError("sweep_iv_crs: amplitude must be positive");
    if (!(rate > 0.0)) throw ArgumentError("sweep_iv_crs: rate must be positive");
    if (opt.samples < 4) throw ArgumentError("sweep_iv_crs: need at least 4 samples");

    const double period = 4.0 * amplitude / rate;
    const int n = opt.samples;
    TransientOptions topt;
    topt.dt_max = period / n;
    auto rhs = [&](double t, const detail::Gaps<2>& g) {
        return crs_rate(triangle(t, amplitude, rate), g, p);
    };
    auto ignore = [](double, const detail::Gaps<2>&, const detail::GapRate<2>&) {};

    CrsSweep out;
    out.samples.reserve(static_cast<std::size_t>(n) + 1);
    detail::Gaps<2> y{clamp_gap(s0.top.x, p), clamp_gap(s0.bottom.x, p)};
    double hint = topt.dt_max;
    const double mid = p.gap_midpoint();
    for (int k = 0; k <= n; ++k) {
        const double t = period * k / n;
        if (k > 0) y = detail::integrate<2>(y, period * (k - 1) / n, t, rhs, ignore, p, topt, hint);
        const double v = triangle(t, amplitude, rate);
        const CrsDeviceState st{{y[0]}, {y[1]}};
        const CrsSolution sol = solve_crs_dc(v, st, p);
        out.samples.push_back({t, v, sol.current, y[0], y[1], try_decode_state(st, mid)});
    }
    try {
        out.thresholds = extract_crs_thresholds(out.samples, opt.current_fraction);
    } catch (const ExtractionError&) {
        out.thresholds.reset();
    }
    return out;
}

namespace {

// Rising and falling crossings of `fraction * peak` within [begin, end),
// requiring an ON-state sample between them.
std::pair<double, double> branch_thresholds(const std::vector<CrsSample>& s, std::size_t begin,
                                            std::size_t end, double fraction, const char* branch) {
    double peak = 0.0;
    for (std::size_t k = begin; k < end; ++k) peak = std::max(peak, std::abs(s[k].i));
    const double level = fraction * peak;
    std::size_t rise = end;
    for (std::size_t k = begin; k < end; ++k) {
        if (std::abs(s[k].i) >= level && peak > 0.0) {
            rise = k;
            break;
        }
    }
    std::size_t fall = end;
    bool saw_on = false;
    for (std::size_t k = rise; k < end; ++k) {
        if (s[k].logic == CrsLogicState::on) saw_on = true;
        if (std::abs(s[k].i) < level) {
            fall = k;
            break;
        }
    }
    if (rise == end || fall == end || !saw_on) {
        throw ExtractionError(std::string("CRS ") + branch +
                              " branch: no ON-state switching event within the sweep amplitude");
    }
    return {s[rise].v, s[fall].v};
}

}  // namespace

CrsThresholds extract_crs_thresholds(const std::vector<CrsSample>& samples, double fraction) {
    std::size_t split = samples.size();
    for (std::size_t k = 1; k < samples.size(); ++k) {
        if (samples[k].v < 0.0) {
            split = k;
            break;
        }
    }
    const auto [th1, th2] = branch_thresholds(samples, 0, split, fraction, "positive");
    const auto [th3, th4] = branch_thresholds(samples, split, samples.size(), fraction, "negative");
    return {th1, th2, th3, th4};
}

}  // namespace crsim
