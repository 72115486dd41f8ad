// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "crsim/crs_arithmetic.hpp"
#include "crsim/crs_cell.hpp"
#include "crsim/errors.hpp"
#include "crsim/exec.hpp"
#include "crsim/microcode.hpp"

using namespace crsim;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] C%-2d %s (%.1f s) %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

long long wrap(long long v, int bits) {
    const long long m = 1LL << bits;
    v = ((v % m) + m) % m;
    return v >= m / 2 ? v - m : v;
}

// Shared by C9, C10, C11 and C12.
const EcmParams kParams{};
constexpr double kMargin = 100.0;
std::optional<Calibration> calibration;

const Calibration& calibrated() {
    if (!calibration) calibration = calibrate_pulse(kParams, kMargin);
    return *calibration;
}

struct DeviceRuns {
    int runs = 0;
    int mismatches = 0;
    std::size_t half_select = 0;
    std::size_t write_failures = 0;
    double max_drift = 0.0;
    std::string first_problem;
    double seconds = 0.0;
};
std::optional<DeviceRuns> cross_level;

// Truth table of f(a, b) as a 4-bit mask indexed by (a << 1) | b.
using Table = unsigned;

Table table_of(const std::function<bool(bool, bool)>& f) {
    Table t = 0;
    for (int k = 0; k < 4; ++k) {
        if (f(k & 2, k & 1)) t |= 1u << k;
    }
    return t;
}

// Line sources: 0, 1, a, b, !a, !b.
bool source(int s, bool a, bool b) {
    switch (s) {
        case 0: return false;
        case 1: return true;
        case 2: return a;
        case 3: return b;
        case 4: return !a;
        default: return !b;
    }
}

const char* kSourceNames[] = {"0", "1", "a", "b", "!a", "!b"};

}  // namespace

int main() {
    std::printf("crsim acceptance suite\n");

    report(1, "carry identity, single step equals majority", [] {
        int bad = 0;
        for (int k = 0; k < 8; ++k) {
            const bool a = k & 1, b = k & 2, c = k & 4;
            const bool majority = (a && b) || (a && c) || (b && c);
            if (fsm_next(c, a, !b) != majority || carry_next(a, b, c) != majority) ++bad;
        }
        return Outcome{bad == 0, std::to_string(8 - bad) + "/8 triples"};
    });

    report(2, "sum pipeline equals a xor b xor c", [] {
        int bad = 0;
        for (int k = 0; k < 8; ++k) {
            const bool a = k & 1, b = k & 2, c = k & 4;
            const bool s1 = fsm_next(c, a, b);
            const bool cn = fsm_next(c, a, !b);
            if (fsm_next(s1, b, cn) != ((a != b) != c) || full_sum({a, b, c}) != ((a != b) != c)) ++bad;
        }
        return Outcome{bad == 0, std::to_string(8 - bad) + "/8 triples"};
    });

    report(3, "FSM truth table", [] {
        // Rows (Z', wl, bl) -> Z from the state diagram: (1,0) sets, (0,1)
        // resets, equal lines hold.
        int bad = 0;
        for (int k = 0; k < 8; ++k) {
            const bool z = k & 4, wl = k & 2, bl = k & 1;
            const bool expected = (wl && !bl) ? true : (!wl && bl) ? false : z;
            if (fsm_next(z, wl, bl) != expected) ++bad;
        }
        return Outcome{bad == 0, std::to_string(8 - bad) + "/8 rows"};
    });

    report(4, "behavioral adders, exhaustive N<=4 and 1000 random pairs at N=8", [] {
        long long runs = 0, bad = 0;
        std::mt19937_64 rng(20240601);
        const auto t0 = Clock::now();
        for (int n : {1, 2, 3, 4, 8}) {
            for (const Program& p : {gen_pc_adder(n), gen_tc_adder(n)}) {
                auto check = [&](long long a, long long b, int c0) {
                    const Word wa = Word::from_int(a, n), wb = Word::from_int(b, n);
                    const ExecTrace t = run_behavioral(p, wa, wb, c0 == 1);
                    ++runs;
                    if (t.result.as_signed() != wrap(wa.as_signed() + wb.as_signed() + c0, n + 1)) ++bad;
                };
                for (int c0 : {0, 1}) {
                    if (n <= 4) {
                        for (long long a = 0; a < (1LL << n); ++a) {
                            for (long long b = 0; b < (1LL << n); ++b) check(a, b, c0);
                        }
                    } else {
                        for (int k = 0; k < 1000; ++k) {
                            check(static_cast<long long>(rng() % 256), static_cast<long long>(rng() % 256), c0);
                        }
                    }
                }
            }
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        return Outcome{bad == 0 && secs < 10.0,
                       std::to_string(runs - bad) + "/" + std::to_string(runs) + " runs correct" +
                           fmt(", %.2f s of 10 s budget", secs)};
    });

    report(5, "cycle and device formulas for N in [1, 64]", [] {
        int bad = 0;
        for (int n = 1; n <= 64; ++n) {
            const Program pc = gen_pc_adder(n), tc = gen_tc_adder(n);
            if (pc.cycle_count() != 2 * (n + 1) + 2) ++bad;
            if (tc.cycle_count() != 4 * n + 5) ++bad;
            if (static_cast<int>(pc.touched_cells().size()) != 2 * (n + 1)) ++bad;
            if (static_cast<int>(tc.touched_cells().size()) != n + 2) ++bad;
            if (!validate_program(pc).empty() || !validate_program(tc).empty()) ++bad;
        }
        return Outcome{bad == 0, std::to_string(bad) + " mismatches over 64 widths"};
    });

    report(6, "comparison table rows for N in {1, 2, 16}", [] {
        int bad = 0;
        for (long long n : {1, 2, 16}) {
            const long long dev[] = {3 * n + 5, 3 * n + 3, 9 * n, 2 * (n + 1), n + 2};
            const long long cyc[] = {88 * n + 48, 29 * n, 5 * n + 18, 2 * (n + 1) + 2, 4 * n + 5};
            const bool xbar[] = {true, true, false, true, true};
            const auto rows = comparison_table(static_cast<int>(n));
            if (rows.size() != 5) {
                ++bad;
                continue;
            }
            for (int k = 0; k < 5; ++k) {
                if (rows[k].devices != dev[k] || rows[k].cycles != cyc[k] || rows[k].common_crossbar != xbar[k]) ++bad;
            }
        }
        return Outcome{bad == 0, std::to_string(15 - bad) + "/15 rows"};
    });

    report(7, "unit-cell SET in [1.1, 1.5] V, RESET in [-0.7, -0.3] V", [] {
        const auto t0 = Clock::now();
        const auto samples = sweep_iv_unit(1.5, kDefaultSweepRate, EcmState{kParams.l}, kParams);
        const UnitLandmarks lm = extract_unit_landmarks(samples, kParams);
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (!lm.v_set || !lm.v_reset) return Outcome{false, "landmark missing"};
        const bool ok = *lm.v_set >= 1.1 && *lm.v_set <= 1.5 && *lm.v_reset >= -0.7 && *lm.v_reset <= -0.3;
        return Outcome{ok && secs < 30.0, fmt("SET %.4f V, RESET %.4f V at %.0f V/s", *lm.v_set, *lm.v_reset,
                                              kDefaultSweepRate)};
    });

    report(8, "CRS sweep: stored states high resistive, thresholds ordered", [] {
        const CrsSweep sw = sweep_iv_crs(2.0, kDefaultSweepRate, CrsDeviceState::zero(kParams), kParams);
        if (!sw.thresholds) return Outcome{false, "thresholds not extracted"};
        const CrsThresholds& t = *sw.thresholds;
        const bool ordered = 0.0 < t.v_th1 && t.v_th1 < t.v_th2 && t.v_th4 < t.v_th3 && t.v_th3 < 0.0;
        // Stored-state resistance over (0, V_th1) in both polarities against
        // the ON state at the same voltage.
        double ratio = INFINITY, r_min = INFINITY, r_on_at = 0.0;
        for (int k = 1; k < 50; ++k) {
            const double v = t.v_th1 * k / 50.0;
            for (double s : {v, -v}) {
                const double r_on = std::abs(s / solve_crs_dc(s, {{kParams.x_min}, {kParams.x_min}}, kParams).current);
                for (bool bit : {false, true}) {
                    const double r = std::abs(s / solve_crs_dc(s, CrsDeviceState::of(bit, kParams), kParams).current);
                    if (r / r_on < ratio) {
                        ratio = r / r_on;
                        r_min = r;
                        r_on_at = r_on;
                    }
                }
            }
        }
        const bool high = ratio > 1e3;
        return Outcome{ordered && high,
                       fmt("th1 %.4f th2 %.4f th3 %.4f th4 %.4f V", t.v_th1, t.v_th2, t.v_th3, t.v_th4) +
                           fmt(", below V_th1 R(0/1) >= %.3g ohm vs R(ON) %.3g ohm", r_min, r_on_at)};
    });

    report(9, "calibrated pulse: full select switches, half select drifts < 1%", [] {
        const Calibration& cal = calibrated();
        const PulseParams& pp = cal.pulse;
        const double mid = kParams.gap_midpoint();
        const double range = kParams.l - kParams.x_min;
        bool writes = true;
        for (bool to_one : {true, false}) {
            const auto end = drive_crs(CrsDeviceState::of(!to_one, kParams), to_one ? pp.v_w : -pp.v_w, pp.t_pulse, kParams);
            if (try_decode_state(end, mid) != (to_one ? CrsLogicState::one : CrsLogicState::zero)) writes = false;
            // Forwarded writes get half the window.
            const auto half = drive_crs(CrsDeviceState::of(!to_one, kParams), to_one ? pp.v_w : -pp.v_w,
                                        0.5 * pp.t_pulse, kParams);
            if (try_decode_state(half, mid) != (to_one ? CrsLogicState::one : CrsLogicState::zero)) writes = false;
        }
        bool holds = true;
        double worst = 0.0;
        for (bool bit : {false, true}) {
            for (double v : {0.5 * pp.v_w, -0.5 * pp.v_w}) {
                const auto end = drive_crs(CrsDeviceState::of(bit, kParams), v, pp.t_pulse, kParams);
                if (try_decode_state(end, mid) != (bit ? CrsLogicState::one : CrsLogicState::zero)) holds = false;
                worst = std::max(worst, crs_drift_after(kParams, bit, v, pp.t_pulse));
            }
        }
        const double spike = read_peak_current(kParams, pp, false);
        const double quiet = read_peak_current(kParams, pp, true);
        const bool reads = spike >= kMargin * pp.i_spike && quiet * kMargin <= pp.i_spike;
        const bool drift_ok = worst < 0.01 * range;
        return Outcome{writes && holds && drift_ok && reads,
                       fmt("V_w %.2f V, t_pulse %.3g s, worst half-select drift %.3f%%", pp.v_w, pp.t_pulse,
                           100.0 * worst / range) +
                           fmt(", read peaks %.3g / %.3g A around I_spike %.3g A", spike, quiet, pp.i_spike)};
    });

    report(10, "device-level a=01, b=01 gives s=010 with reads (none, spike, spike)", [] {
        const auto t0 = Clock::now();
        const PulseParams& pp = calibrated().pulse;
        std::string detail;
        bool ok = true;
        for (const Program& p : {gen_pc_adder(2), gen_tc_adder(2)}) {
            const ExecTrace t = run_device(p, Word::parse("01"), Word::parse("01"), false, pp, kParams);
            const auto reads = t.verdicts_for(p.scheme == Scheme::pc ? Annotation::sum2 : Annotation::read);
            std::string pattern;
            for (const auto& r : reads) pattern += r.spike ? "S" : "-";
            const bool good = t.result.str() == "010" && pattern == "-SS";
            ok = ok && good;
            detail += std::string(to_string(p.scheme)) + " s=" + t.result.str() + " reads " + pattern + "; ";
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        return Outcome{ok && secs < 300.0, detail + fmt("%.0f s of 300 s budget", secs)};
    });

    report(11, "device result equals behavioral for all 16 pairs at N=2, both schemes", [] {
        const auto t0 = Clock::now();
        const PulseParams& pp = calibrated().pulse;
        DeviceRuns dr;
        for (const Program& p : {gen_pc_adder(2), gen_tc_adder(2)}) {
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    const Word wa = Word::from_int(a, 2), wb = Word::from_int(b, 2);
                    DeviceOptions opt;
                    opt.record_waveform = false;
                    const ExecTrace dev = run_device(p, wa, wb, false, pp, kParams, opt);
                    const ExecTrace beh = run_behavioral(p, wa, wb, false);
                    ++dr.runs;
                    if (dev.result != beh.result) {
                        ++dr.mismatches;
                        if (dr.first_problem.empty()) {
                            dr.first_problem = std::string(to_string(p.scheme)) + " a=" + wa.str() + " b=" + wb.str();
                        }
                    }
                    dr.half_select += dev.half_select_violations.size();
                    dr.write_failures += dev.write_failures.size();
                    dr.max_drift = std::max(dr.max_drift, dev.max_half_select_drift);
                }
            }
        }
        dr.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        cross_level = dr;
        return Outcome{dr.mismatches == 0 && dr.seconds < 1800.0,
                       std::to_string(dr.runs - dr.mismatches) + "/" + std::to_string(dr.runs) + " equal" +
                           (dr.first_problem.empty() ? "" : ", first mismatch " + dr.first_problem) +
                           fmt(", %.0f s of 1800 s budget", dr.seconds)};
    });

    report(12, "no unintended state change in half-selected cells during C11 runs", [] {
        if (!cross_level) return Outcome{false, "C11 runs unavailable"};
        const DeviceRuns& dr = *cross_level;
        const double range = kParams.l - kParams.x_min;
        return Outcome{dr.half_select == 0,
                       std::to_string(dr.half_select) + " violations over " + std::to_string(dr.runs) + " runs, " +
                           std::to_string(dr.write_failures) + " write failures" +
                           fmt(", largest single-pulse drift %.3f%%", 100.0 * dr.max_drift / range)};
    });

    report(13, "Boolean coverage: XOR/XNOR need a second cell's read-out", [] {
        const Table xor_t = table_of([](bool a, bool b) { return a != b; });
        const Table xnor_t = table_of([](bool a, bool b) { return a == b; });

        std::set<Table> one_step;
        for (int z = 0; z < 2; ++z) {
            for (int w = 0; w < 6; ++w) {
                for (int l = 0; l < 6; ++l) {
                    one_step.insert(table_of([&](bool a, bool b) { return fsm_next(z, source(w, a, b), source(l, a, b)); }));
                }
            }
        }
        const bool unreachable = !one_step.count(xor_t) && !one_step.count(xnor_t);

        // Two steps: cell B computes g in step one (as does cell A), then A
        // takes B's read-out on one line and a source on the other.
        std::string xor_witness, xnor_witness;
        for (int za = 0; za < 2; ++za) for (int wa = 0; wa < 6; ++wa) for (int la = 0; la < 6; ++la)
        for (int zb = 0; zb < 2; ++zb) for (int wb = 0; wb < 6; ++wb) for (int lb = 0; lb < 6; ++lb)
        for (int side = 0; side < 2; ++side) for (int other = 0; other < 6; ++other) {
            const Table t = table_of([&](bool a, bool b) {
                const bool cell_a = fsm_next(za, source(wa, a, b), source(la, a, b));
                const bool cell_b = fsm_next(zb, source(wb, a, b), source(lb, a, b));
                const bool o = source(other, a, b);
                return side == 0 ? fsm_next(cell_a, o, cell_b) : fsm_next(cell_a, cell_b, o);
            });
            std::string w = std::string("A(") + char('0' + za) + ",wl=" + kSourceNames[wa] + ",bl=" + kSourceNames[la] +
                            ") B(" + char('0' + zb) + ",wl=" + kSourceNames[wb] + ",bl=" + kSourceNames[lb] + ") then " +
                            (side == 0 ? std::string("wl=") + kSourceNames[other] + ",bl=B"
                                       : std::string("wl=B,bl=") + kSourceNames[other]);
            if (t == xor_t && xor_witness.empty()) xor_witness = w;
            if (t == xnor_t && xnor_witness.empty()) xnor_witness = w;
        }

        // The XOR witness also runs as a program on the behavioral executor.
        Program p;
        p.scheme = Scheme::custom;
        p.n = 1;
        p.arrays = {{0, 1}, {0, 1}};
        const CellAddr cell_a{0, 0, 0}, cell_b{1, 0, 0};
        p.steps.push_back({Annotation::carry,
                           {{0, Signal::input_a(0), {Signal::input_b(0)}}, {1, Signal::input_a(0), {Signal::not_b(0)}}},
                           {}});
        p.steps.push_back({Annotation::sum2,
                           {{0, Signal::input_b(0), {Signal::read_forward(cell_b)}}, {1, Signal::const1(), {Signal::const0()}}},
                           {{cell_b, std::nullopt}}});
        p.result_cells = {cell_a};
        bool program_ok = true;
        for (int k = 0; k < 4; ++k) {
            const bool a = k & 2, b = k & 1;
            const ExecTrace t = run_behavioral(p, Word::from_int(a, 1), Word::from_int(b, 1), false);
            if (t.result.bits.at(0) != (a != b)) program_ok = false;
        }

        const bool ok = unreachable && !xor_witness.empty() && !xnor_witness.empty() && program_ok;
        return Outcome{ok, std::to_string(one_step.size()) + "/16 functions in one step; XOR via " +
                               (xor_witness.empty() ? "none" : xor_witness) + "; XNOR via " +
                               (xnor_witness.empty() ? "none" : xnor_witness) +
                               (program_ok ? "; XOR program verified" : "; XOR program wrong")};
    });

    std::printf("%d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
