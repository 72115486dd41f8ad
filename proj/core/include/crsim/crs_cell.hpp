#pragma once

// Complementary resistive switch: two ECM cells in anti-series. The "top"
// device faces the wordline, the "bottom" device the bitline. A positive
// wordline-to-bitline voltage drives the bottom device towards SET and the
// top device towards RESET.

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "crsim/ecm_device.hpp"

namespace crsim {

enum class CrsLogicState { zero, one, on };

std::string_view to_string(CrsLogicState s) noexcept;

struct CrsDeviceState {
    EcmState top;
    EcmState bottom;

    /// '0' = LRS/HRS (top/bottom).
    static CrsDeviceState zero(const EcmParams& p) { return {{p.x_min}, {p.l}}; }
    /// '1' = HRS/LRS.
    static CrsDeviceState one(const EcmParams& p) { return {{p.l}, {p.x_min}}; }
    static CrsDeviceState of(bool bit, const EcmParams& p) { return bit ? one(p) : zero(p); }
};

struct CrsThresholds {
    double v_th1 = 0.0;
    double v_th2 = 0.0;
    double v_th3 = 0.0;
    double v_th4 = 0.0;

    double on_window() const { return v_th2 - v_th1; }
};

/// Stateful CRS logic: Z = (wl RIMP bl) Z' + (wl NIMP bl) !Z'.
constexpr bool fsm_next(bool z_prev, bool wl, bool bl) noexcept {
    const bool rimp = wl || !bl;
    const bool nimp = wl && !bl;
    return (rimp && z_prev) || (nimp && !z_prev);
}

/// Classifies each device as LRS iff its gap is below `gap_threshold`.
/// Throws IndeterminateStateError when both devices are high resistive.
CrsLogicState decode_state(const CrsDeviceState& s, double gap_threshold);

/// Non-throwing variant; nullopt for the HRS/HRS pair.
std::optional<CrsLogicState> try_decode_state(const CrsDeviceState& s, double gap_threshold);

/// Operating point of the series pair; the internal node is solved, never driven.
struct CrsSolution {
    double v_applied = 0.0;   ///< wordline minus bitline [V]
    double v_top = 0.0;       ///< voltage across the top device, device polarity [V]
    double v_bottom = 0.0;    ///< voltage across the bottom device, device polarity [V]
    double current = 0.0;     ///< series current, wordline to bitline [A]
    CellSolution top;
    CellSolution bottom;
    double current_mismatch = 0.0;  ///< I_bottom - I_through_top [A]
};

CrsSolution solve_crs_dc(double v_wl_minus_bl, const CrsDeviceState& s, const EcmParams& p);

/// Observer for accepted integration steps: (time, state, series current).
using CrsObserver = std::function<void(double, const CrsDeviceState&, double)>;

/// Holds `v_wl_minus_bl` for `duration` seconds.
CrsDeviceState drive_crs(const CrsDeviceState& s, double v_wl_minus_bl, double duration,
                         const EcmParams& p, const TransientOptions& opt = {},
                         const CrsObserver& observer = {});

/// Advances both devices by `dt` under a constant applied voltage.
CrsDeviceState step_crs_transient(const CrsDeviceState& s, double v_wl_minus_bl, double dt,
                                  const EcmParams& p, const TransientOptions& opt = {});

struct CrsSample {
    double t = 0.0;
    double v = 0.0;
    double i = 0.0;
    double x_top = 0.0;
    double x_bottom = 0.0;
    std::optional<CrsLogicState> logic;  ///< nullopt for HRS/HRS
};

struct CrsSweep {
    std::vector<CrsSample> samples;
    std::optional<CrsThresholds> thresholds;  // absent when the sweep never reaches ON
};

/// Butterfly sweep 0 -> +amp -> -amp -> 0. Thresholds are left empty when
/// the four crossings are not all present.
CrsSweep sweep_iv_crs(double amplitude, double rate, const CrsDeviceState& s0, const EcmParams& p,
                      const SweepOptions& opt = {});

/// Threshold = voltage at which |I| crosses `fraction` of the branch peak:
/// th1/th2 rising/falling on the positive branch, th3/th4 on the negative.
CrsThresholds extract_crs_thresholds(const std::vector<CrsSample>& samples, double fraction = 0.5);

}  // namespace crsim
