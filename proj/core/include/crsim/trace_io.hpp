#pragma once

// Plot-ready artifacts. Numbers are written as %.16e; step numbers in files
// are 1-based.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crsim/crs_cell.hpp"
#include "crsim/ecm_device.hpp"
#include "crsim/exec.hpp"

namespace crsim {

std::string format_number(double v);

/// v_volts,i_amps,x_meters
void write_unit_sweep_csv(std::ostream& os, const std::vector<UnitSample>& s);
/// v_volts,i_amps,x_top_meters,x_bottom_meters,logic_state
void write_crs_sweep_csv(std::ostream& os, const std::vector<CrsSample>& s);
/// {v_set, v_reset, v_th1..v_th4}; absent values are null.
void write_landmarks_json(std::ostream& os, const std::optional<UnitLandmarks>& unit,
                          const std::optional<CrsThresholds>& crs);

/// time_s,step_index,annotation,v_wl_<array>_<wl>...,v_bl_<array>_<k>...,i_bl_<array>_<k>...
void write_device_trace_csv(std::ostream& os, const ExecTrace& t);
/// [{step, cell, spike, bit}]
void write_verdicts_json(std::ostream& os, const ExecTrace& t);
/// step_index,annotation,<cell>... with 0, 1, ON or X per cell.
void write_state_matrix_csv(std::ostream& os, const ExecTrace& t);

void write_calibration_json(std::ostream& os, const Calibration& c);
/// Reads back the pulse of a calibration file.
PulseParams read_calibration_pulse(std::istream& is);

}  // namespace crsim
