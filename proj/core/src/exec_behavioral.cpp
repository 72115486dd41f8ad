#include <algorithm>

#include "crsim/crs_cell.hpp"
#include "crsim/errors.hpp"
#include "crsim/exec.hpp"
#include "exec_common.hpp"

namespace crsim {

Word Word::parse(std::string_view msb_first) {
    if (msb_first.empty()) throw ArgumentError("operand must not be empty");
    Word w;
    for (auto it = msb_first.rbegin(); it != msb_first.rend(); ++it) {
        if (*it != '0' && *it != '1') {
            throw ArgumentError("operand '" + std::string(msb_first) + "' is not a binary string");
        }
        w.bits.push_back(*it == '1');
    }
    return w;
}

Word Word::from_int(long long value, int width) {
    if (width < 1 || width > 63) throw ArgumentError("word width must lie in [1, 63]");
    Word w;
    const auto u = static_cast<unsigned long long>(value);
    for (int i = 0; i < width; ++i) w.bits.push_back(((u >> i) & 1ULL) != 0);
    return w;
}

long long Word::as_signed() const {
    if (bits.empty()) return 0;
    long long v = 0;
    for (int i = width() - 1; i >= 0; --i) v = v * 2 + (bits[static_cast<std::size_t>(i)] ? 1 : 0);
    if (bits.back()) v -= 1LL << width();
    return v;
}

std::string Word::str() const {
    std::string s;
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) s.push_back(*it ? '1' : '0');
    return s;
}

void PulseParams::validate() const {
    if (!(v_w > 0.0)) throw ArgumentError("PulseParams.v_w must be positive");
    if (!(t_pulse > 0.0)) throw ArgumentError("PulseParams.t_pulse must be positive");
    if (!(t_gap >= 0.0)) throw ArgumentError("PulseParams.t_gap must be non-negative");
    if (samples_per_pulse < 1) throw ArgumentError("PulseParams.samples_per_pulse must be >= 1");
    if (!(i_spike > 0.0)) throw ArgumentError("PulseParams.i_spike must be positive");
}

double PulseParams::potential(Level level) const {
    switch (level) {
        case Level::high:
            return 0.5 * v_w;
        case Level::low:
            return -0.5 * v_w;
        case Level::ground:
            break;
    }
    return 0.0;
}

std::vector<ReadVerdict> ExecTrace::verdicts_for(Annotation annotation) const {
    std::vector<ReadVerdict> out;
    for (const auto& v : verdicts) {
        if (steps.at(static_cast<std::size_t>(v.step)).annotation == annotation) out.push_back(v);
    }
    return out;
}

ReadResult readout_cell(bool& state) {
    ReadResult r{state, !state, 0.0};
    state = fsm_next(state, true, false);
    return r;
}

ExecTrace run_behavioral(const Program& p, const Word& a, const Word& b, bool c0,
                         const BehavioralOptions& opt) {
    detail::SignalResolver resolver(p, a, b, c0);
    detail::require_valid_layout(p);

    ExecTrace trace;
    trace.n = p.n;
    trace.cells = detail::layout_cells(p);
    std::map<CellAddr, std::size_t> index;
    for (std::size_t i = 0; i < trace.cells.size(); ++i) index[trace.cells[i]] = i;
    std::vector<bool> state(trace.cells.size(), opt.initial_state);

    auto lookup = [&](const CellAddr& c) {
        const auto it = index.find(c);
        if (it == index.end()) throw ExecutionError("cell " + to_string(c) + " is not in the layout");
        return it->second;
    };

    for (int si = 0; si < static_cast<int>(p.steps.size()); ++si) {
        const Step& step = p.steps[si];
        const std::vector<bool> before = state;

        // Reads see the state at the start of the cycle.
        std::map<CellAddr, bool> forwarded;
        for (const auto& r : step.reads) {
            bool cell = before[lookup(r.cell)];
            const ReadResult rr = readout_cell(cell);
            forwarded[r.cell] = rr.bit;
            trace.verdicts.push_back({si, r.cell, rr.spike, rr.bit, 0.0, r.latch});
            if (r.latch) resolver.registers()[*r.latch] = rr.bit;
        }

        StepRecord rec;
        rec.index = si;
        rec.annotation = step.annotation;
        for (const auto& d : step.arrays) {
            ResolvedArray ra;
            ra.array = d.array;
            const auto wl = resolver.resolve(d.wl, forwarded);
            if (!wl) throw ExecutionError("wordline forwards a read that is not part of this step");
            ra.wl = *wl;
            for (std::size_t k = 0; k < d.bls.size(); ++k) {
                const auto bl = resolver.resolve(d.bls[k], forwarded);
                if (!bl) {
                    throw ExecutionError("step " + std::to_string(si + 1) + " forwards " +
                                         to_string(d.bls[k].source) + " which is not read in it");
                }
                ra.bls.push_back(*bl);
                if (ra.wl == Level::ground || *bl == Level::ground) continue;
                const std::size_t ci = lookup({d.array, p.arrays[d.array].wordline, static_cast<int>(k)});
                state[ci] = fsm_next(before[ci], ra.wl == Level::high, *bl == Level::high);
            }
            rec.lines.push_back(std::move(ra));
        }
        for (bool s : state) rec.states.push_back(s ? CrsLogicState::one : CrsLogicState::zero);
        trace.steps.push_back(std::move(rec));
    }

    for (bool s : state) trace.final_states.push_back(s ? CrsLogicState::one : CrsLogicState::zero);
    for (const auto& c : p.result_cells) trace.result.bits.push_back(state[lookup(c)]);
    trace.registers = resolver.registers();
    return trace;
}

}  // namespace crsim
