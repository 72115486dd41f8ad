#pragma once

// Program execution at two fidelity levels. The behavioral executor applies
// fsm_next per cell; the device executor turns every step into half-select
// voltage pulses over anti-serial ECM pairs and integrates them in time.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crsim/crs_cell.hpp"
#include "crsim/ecm_device.hpp"
#include "crsim/microcode.hpp"

namespace crsim {

/// Two's-complement word, bits stored LSB first.
struct Word {
    std::vector<bool> bits;

    /// Parses an MSB-first binary string such as "01".
    static Word parse(std::string_view msb_first);
    /// Low `width` bits of `value`.
    static Word from_int(long long value, int width);

    int width() const { return static_cast<int>(bits.size()); }
    long long as_signed() const;
    /// MSB-first binary string.
    std::string str() const;
    bool operator==(const Word&) const = default;
};

/// Three line potentials of the half-select scheme.
enum class Level { low, high, ground };

struct PulseParams {
    double v_w = 2.6;            ///< full-select amplitude [V]
    double t_pulse = 10e-6;      ///< pulse width [s]
    double t_gap = 1e-6;         ///< grounded settle time after each pulse [s]
    int samples_per_pulse = 50;  ///< waveform samples per pulse
    double i_spike = 1e-4;       ///< read spike threshold [A]

    void validate() const;
    /// '1' -> +V_w/2, '0' -> -V_w/2, ground -> 0.
    double potential(Level level) const;
};

struct ReadVerdict {
    int step = 0;
    CellAddr cell;
    bool spike = false;
    bool bit = false;
    double peak_current = 0.0;  // device level only [A]
    std::optional<std::string> latch;
};

struct ResolvedArray {
    int array = 0;
    Level wl = Level::ground;
    std::vector<Level> bls;
};

struct StepRecord {
    int index = 0;
    Annotation annotation = Annotation::carry;
    std::vector<ResolvedArray> lines;                   // after read-forward resolution
    std::vector<std::optional<CrsLogicState>> states;  // per trace cell after the step
};

/// A cell whose decoded state changed although it was not fully selected,
/// or a full-select write that did not land on the fsm_next state.
struct StateViolation {
    int step = 0;
    CellAddr cell;
    std::string before;
    std::string after;
    std::string expected;
};

struct WaveformSample {
    double t = 0.0;
    int step = 0;
    Annotation annotation = Annotation::carry;
    std::vector<double> v_wl;  // per array, active wordline
    std::vector<double> v_bl;  // per trace cell (its bitline)
    std::vector<double> i_bl;  // per trace cell, wordline-to-bitline current
};

struct ExecTrace {
    int n = 0;
    std::vector<CellAddr> cells;  // every cell on the layout rows, array-major
    std::vector<StepRecord> steps;
    std::vector<ReadVerdict> verdicts;
    std::map<std::string, bool> registers;
    std::vector<std::optional<CrsLogicState>> final_states;  // per trace cell
    std::vector<CrsDeviceState> final_devices;               // device level only
    Word result;
    std::vector<StateViolation> half_select_violations;
    std::vector<StateViolation> write_failures;
    double max_half_select_drift = 0.0;  // largest gap move of a non-fully-selected cell in one pulse [m]
    std::vector<WaveformSample> waveform;

    /// Verdicts of steps carrying `annotation`, in execution order.
    std::vector<ReadVerdict> verdicts_for(Annotation annotation) const;
};

struct BehavioralOptions {
    bool initial_state = false;  // state of every cell before INIT_READ
};

/// Throws ExecutionError on unresolved registers or read-forward sources,
/// or when operand widths differ from p.n.
ExecTrace run_behavioral(const Program& p, const Word& a, const Word& b, bool c0,
                         const BehavioralOptions& opt = {});

struct DeviceOptions {
    bool initial_state = false;
    bool record_waveform = true;
    double max_gap_step = 0.05e-9;  // integrator step limiter [m]
};

ExecTrace run_device(const Program& p, const Word& a, const Word& b, bool c0,
                     const PulseParams& pp, const EcmParams& ep, const DeviceOptions& opt = {});

struct ReadResult {
    bool bit = false;
    bool spike = false;
    double peak_current = 0.0;
};

/// Destructive read of a behavioral cell: the state becomes '1'.
ReadResult readout_cell(bool& state);

/// Destructive read of a device-level cell with a full-select (+V_w) pulse.
/// Throws IndeterminateStateError if the cell does not decode to 0 or 1.
ReadResult readout_cell(CrsDeviceState& cell, const PulseParams& pp, const EcmParams& ep);

struct KineticsPoint {
    double v_w = 0.0;
    std::optional<double> t_write;       // slowest of 0->1 and 1->0 at +-V_w
    double t_half_drift = 0.0;           // time for half-select drift to hit the budget (lower bound)
    bool half_drift_reached = false;     // false: t_half_drift is the search horizon
    double t_pulse = 0.0;
    double spike_peak = 0.0;
    double nospike_peak = 0.0;
    bool feasible = false;
    double score = 0.0;
};

struct CalibrationOptions {
    double v_min = 2.0;
    double v_max = 3.4;
    double v_step = 0.2;
    double write_safety = 1.5;   // half window: t_pulse / 2 >= write_safety * t_write
    double max_stretch = 10.0;   // t_pulse <= max_stretch * 2 * write_safety * t_write
    double t_max = 1.0;          // search horizon for kinetics runs [s]
    PulseParams seed;            // t_gap and samples_per_pulse carry over
};

struct Calibration {
    PulseParams pulse;
    double target_margin = 0.0;
    double drift_budget = 0.0;   // (L - x_min) / target_margin [m]
    KineticsPoint chosen;
    std::vector<KineticsPoint> report;
};

/// Picks (V_w, t_pulse, I_spike) so that a full-select pulse completes a CRS
/// transition, a half-select pulse moves no gap further than the drift
/// budget, and spike and no-spike read peaks sit at least `target_margin`
/// above and below I_spike. Throws CalibrationError when no grid point
/// qualifies.
Calibration calibrate_pulse(const EcmParams& ep, double target_margin,
                            const CalibrationOptions& opt = {});

/// Time for a full CRS flip under a constant +-v (to '1' for +v).
std::optional<double> crs_switch_time(const EcmParams& ep, double v, bool to_one, double t_max);

/// Time until either gap of a stored cell drifts by `budget` under constant v.
std::optional<double> crs_drift_time(const EcmParams& ep, bool stored_bit, double v, double budget,
                                     double t_max);

/// Largest gap displacement of a stored cell after holding v for `duration`.
double crs_drift_after(const EcmParams& ep, bool stored_bit, double v, double duration);

/// Peak read current of a stored bit under the read pulse.
double read_peak_current(const EcmParams& ep, const PulseParams& pp, bool stored_bit);

}  // namespace crsim
