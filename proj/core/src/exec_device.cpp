#include <algorithm>
#include <cmath>
#include <limits>

#include "crsim/crs_cell.hpp"
#include "crsim/errors.hpp"
#include "crsim/exec.hpp"
#include "exec_common.hpp"

namespace crsim {

namespace {

struct Cursor {
    double peak = 0.0;  // signed current of largest magnitude
    void see(double i) {
        if (std::abs(i) > std::abs(peak)) peak = i;
    }
};

TransientOptions pulse_options(const PulseParams& pp, double max_gap_step) {
    TransientOptions t;
    t.dt_max = pp.t_pulse / std::max(pp.samples_per_pulse, 1);
    t.max_gap_step = max_gap_step;
    return t;
}

// One pulse phase: line levels for every cell plus the state bookkeeping.
struct Phase {
    std::vector<Level> wl;       // per array
    std::vector<Level> bl;       // per trace cell
};

bool full_select(Level wl, Level bl) {
    return (wl == Level::high && bl == Level::low) || (wl == Level::low && bl == Level::high);
}

double max_move(const CrsDeviceState& a, const CrsDeviceState& b) {
    return std::max(std::abs(a.top.x - b.top.x), std::abs(a.bottom.x - b.bottom.x));
}

}  // namespace

ReadResult readout_cell(CrsDeviceState& cell, const PulseParams& pp, const EcmParams& ep) {
    pp.validate();
    const CrsLogicState s = decode_state(cell, ep.gap_midpoint());
    if (s == CrsLogicState::on) throw IndeterminateStateError("cannot read a cell in the ON state");
    Cursor c;
    cell = drive_crs(cell, pp.v_w, pp.t_pulse, ep, pulse_options(pp, TransientOptions{}.max_gap_step),
                     [&](double, const CrsDeviceState&, double i) { c.see(i); });
    const bool spike = std::abs(c.peak) > pp.i_spike;
    return {!spike, spike, std::abs(c.peak)};
}

ExecTrace run_device(const Program& p, const Word& a, const Word& b, bool c0, const PulseParams& pp,
                     const EcmParams& ep, const DeviceOptions& opt) {
    pp.validate();
    ep.validate();
    detail::SignalResolver resolver(p, a, b, c0);
    detail::require_valid_layout(p);

    ExecTrace trace;
    trace.n = p.n;
    trace.cells = detail::layout_cells(p);
    const std::size_t n_cells = trace.cells.size();
    const std::size_t n_arrays = p.arrays.size();
    std::map<CellAddr, std::size_t> index;
    for (std::size_t i = 0; i < n_cells; ++i) index[trace.cells[i]] = i;
    auto lookup = [&](const CellAddr& c) {
        const auto it = index.find(c);
        if (it == index.end()) throw ExecutionError("cell " + to_string(c) + " is not in the layout");
        return it->second;
    };

    const double mid = ep.gap_midpoint();
    std::vector<CrsDeviceState> cells(n_cells, CrsDeviceState::of(opt.initial_state, ep));
    const TransientOptions topt = pulse_options(pp, opt.max_gap_step);
    double now = 0.0;

    auto record_rest = [&](int si, Annotation ann) {
        if (!opt.record_waveform) return;
        WaveformSample w{now, si, ann, std::vector<double>(n_arrays, 0.0),
                         std::vector<double>(n_cells, 0.0), std::vector<double>(n_cells, 0.0)};
        trace.waveform.push_back(std::move(w));
    };

    // Applies one pulse; returns the peak |I| per cell.
    auto apply = [&](int si, Annotation ann, const Phase& ph, double duration) {
        const int chunks = std::max(1, static_cast<int>(std::lround(pp.samples_per_pulse * duration / pp.t_pulse)));
        const double dt_chunk = duration / chunks;
        std::vector<double> peak(n_cells, 0.0);
        std::vector<std::vector<double>> chunk_i(n_cells, std::vector<double>(static_cast<std::size_t>(chunks), 0.0));
        std::vector<double> v_bl(n_cells), v_cell(n_cells);
        for (std::size_t c = 0; c < n_cells; ++c) {
            v_bl[c] = pp.potential(ph.bl[c]);
            v_cell[c] = pp.potential(ph.wl[static_cast<std::size_t>(trace.cells[c].array)]) - v_bl[c];
        }
        for (std::size_t c = 0; c < n_cells; ++c) {
            const CellAddr& addr = trace.cells[c];
            const Level wl = ph.wl[static_cast<std::size_t>(addr.array)];
            const Level bl = ph.bl[c];
            const CrsDeviceState start = cells[c];
            const auto before = try_decode_state(start, mid);
            double moved = 0.0;
            for (int k = 0; k < chunks; ++k) {
                Cursor cur;
                cells[c] = drive_crs(cells[c], v_cell[c], dt_chunk, ep, topt,
                                     [&](double, const CrsDeviceState& s, double i) {
                                         cur.see(i);
                                         moved = std::max(moved, max_move(s, start));
                                     });
                chunk_i[c][static_cast<std::size_t>(k)] = cur.peak;
                peak[c] = std::max(peak[c], std::abs(cur.peak));
            }
            const auto after = try_decode_state(cells[c], mid);
            if (full_select(wl, bl)) {
                const CrsLogicState expected = wl == Level::high ? CrsLogicState::one : CrsLogicState::zero;
                if (after != expected) {
                    trace.write_failures.push_back({si, addr, detail::state_name(before),
                                                    detail::state_name(after),
                                                    std::string(to_string(expected))});
                }
            } else {
                trace.max_half_select_drift = std::max(trace.max_half_select_drift, moved);
                if (after != before) {
                    trace.half_select_violations.push_back({si, addr, detail::state_name(before),
                                                            detail::state_name(after),
                                                            detail::state_name(before)});
                }
            }
        }
        if (opt.record_waveform) {
            for (int k = 0; k < chunks; ++k) {
                WaveformSample w;
                w.t = now + dt_chunk * (k + 1);
                w.step = si;
                w.annotation = ann;
                for (std::size_t ai = 0; ai < n_arrays; ++ai) w.v_wl.push_back(pp.potential(ph.wl[ai]));
                w.v_bl = v_bl;
                for (std::size_t c = 0; c < n_cells; ++c) w.i_bl.push_back(chunk_i[c][static_cast<std::size_t>(k)]);
                trace.waveform.push_back(std::move(w));
            }
        }
        now += duration;
        if (pp.t_gap > 0.0) {
            now += pp.t_gap;
            record_rest(si, ann);
        }
        return peak;
    };

    record_rest(0, p.steps.empty() ? Annotation::init_read : p.steps.front().annotation);

    for (int si = 0; si < static_cast<int>(p.steps.size()); ++si) {
        const Step& step = p.steps[si];
        std::map<CellAddr, bool> forwarded;

        // A step with a same-cycle forward splits its window: read half, then
        // forwarded-write half.
        Phase first{std::vector<Level>(n_arrays, Level::ground), std::vector<Level>(n_cells, Level::ground)};
        bool pending = false;
        std::vector<ResolvedArray> lines;
        for (const auto& d : step.arrays) {
            const auto wl = resolver.resolve(d.wl, forwarded);
            if (!wl) throw ExecutionError("wordline forwards a read that is not part of this step");
            first.wl[static_cast<std::size_t>(d.array)] = *wl;
            for (std::size_t k = 0; k < d.bls.size(); ++k) {
                const auto bl = resolver.resolve(d.bls[k], forwarded);
                const std::size_t ci = lookup({d.array, p.arrays[d.array].wordline, static_cast<int>(k)});
                if (bl) {
                    first.bl[ci] = *bl;
                } else {
                    pending = true;
                }
            }
        }
        for (const auto& r : step.reads) {
            const std::size_t ci = lookup(r.cell);
            if (first.wl[static_cast<std::size_t>(r.cell.array)] != Level::high || first.bl[ci] != Level::low) {
                throw ExecutionError("step " + std::to_string(si + 1) + " reads " + to_string(r.cell) +
                                     " without a full-select '1' write");
            }
        }

        const double window = pending ? 0.5 * pp.t_pulse : pp.t_pulse;
        const std::vector<double> peak = apply(si, step.annotation, first, window);
        for (const auto& r : step.reads) {
            const double ip = peak[lookup(r.cell)];
            const bool spike = ip > pp.i_spike;
            forwarded[r.cell] = !spike;
            trace.verdicts.push_back({si, r.cell, spike, !spike, ip, r.latch});
            if (r.latch) resolver.registers()[*r.latch] = !spike;
        }

        // Phase two: bitlines that carry a forwarded read.
        Phase second{std::vector<Level>(n_arrays, Level::ground), std::vector<Level>(n_cells, Level::ground)};
        for (const auto& d : step.arrays) {
            ResolvedArray ra{d.array, first.wl[static_cast<std::size_t>(d.array)], {}};
            bool has_forward = false;
            for (std::size_t k = 0; k < d.bls.size(); ++k) {
                const std::size_t ci = lookup({d.array, p.arrays[d.array].wordline, static_cast<int>(k)});
                if (d.bls[k].kind == SignalKind::read_forward) {
                    const auto bl = resolver.resolve(d.bls[k], forwarded);
                    if (!bl) {
                        throw ExecutionError("step " + std::to_string(si + 1) + " forwards " +
                                             to_string(d.bls[k].source) + " which is not read in it");
                    }
                    second.bl[ci] = *bl;
                    ra.bls.push_back(*bl);
                    has_forward = true;
                } else {
                    ra.bls.push_back(first.bl[ci]);
                }
            }
            if (has_forward) second.wl[static_cast<std::size_t>(d.array)] = ra.wl;
            lines.push_back(std::move(ra));
        }
        if (pending) apply(si, step.annotation, second, window);

        StepRecord rec{si, step.annotation, std::move(lines), {}};
        for (const auto& c : cells) rec.states.push_back(try_decode_state(c, mid));
        trace.steps.push_back(std::move(rec));
    }

    for (const auto& c : cells) trace.final_states.push_back(try_decode_state(c, mid));
    trace.final_devices = cells;
    for (const auto& rc : p.result_cells) {
        const auto s = trace.final_states[lookup(rc)];
        if (!s || *s == CrsLogicState::on) {
            throw ExecutionError("result cell " + to_string(rc) + " decodes to " + detail::state_name(s));
        }
        trace.result.bits.push_back(*s == CrsLogicState::one);
    }
    trace.registers = resolver.registers();
    return trace;
}

}  // namespace crsim
