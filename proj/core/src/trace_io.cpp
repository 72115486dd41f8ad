#include "crsim/trace_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "crsim/errors.hpp"
#include "json.hpp"

namespace crsim {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string state_cell(const std::optional<CrsLogicState>& s) {
    return s ? std::string(to_string(*s)) : std::string("X");
}

std::string cell_suffix(const CellAddr& c) { return std::to_string(c.array) + "_" + std::to_string(c.bl); }

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void write_unit_sweep_csv(std::ostream& os, const std::vector<UnitSample>& s) {
    os << "v_volts,i_amps,x_meters\n";
    for (const auto& r : s) os << format_number(r.v) << ',' << format_number(r.i) << ',' << format_number(r.x) << '\n';
}

void write_crs_sweep_csv(std::ostream& os, const std::vector<CrsSample>& s) {
    os << "v_volts,i_amps,x_top_meters,x_bottom_meters,logic_state\n";
    for (const auto& r : s) {
        os << format_number(r.v) << ',' << format_number(r.i) << ',' << format_number(r.x_top) << ','
           << format_number(r.x_bottom) << ',' << state_cell(r.logic) << '\n';
    }
}

void write_landmarks_json(std::ostream& os, const std::optional<UnitLandmarks>& unit,
                          const std::optional<CrsThresholds>& crs) {
    json j;
    j["v_set"] = unit ? optional_number(unit->v_set) : json(nullptr);
    j["v_reset"] = unit ? optional_number(unit->v_reset) : json(nullptr);
    j["v_th1"] = crs ? json(crs->v_th1) : json(nullptr);
    j["v_th2"] = crs ? json(crs->v_th2) : json(nullptr);
    j["v_th3"] = crs ? json(crs->v_th3) : json(nullptr);
    j["v_th4"] = crs ? json(crs->v_th4) : json(nullptr);
    os << j.dump(2) << '\n';
}

void write_device_trace_csv(std::ostream& os, const ExecTrace& t) {
    std::vector<int> wordlines;
    for (const auto& c : t.cells) {
        if (static_cast<int>(wordlines.size()) <= c.array) wordlines.resize(static_cast<std::size_t>(c.array) + 1, 0);
        wordlines[static_cast<std::size_t>(c.array)] = c.wl;
    }
    os << "time_s,step_index,annotation";
    for (std::size_t a = 0; a < wordlines.size(); ++a) os << ",v_wl_" << a << '_' << wordlines[a];
    for (const auto& c : t.cells) os << ",v_bl_" << cell_suffix(c);
    for (const auto& c : t.cells) os << ",i_bl_" << cell_suffix(c);
    os << '\n';
    for (const auto& w : t.waveform) {
        os << format_number(w.t) << ',' << w.step + 1 << ',' << to_string(w.annotation);
        for (double v : w.v_wl) os << ',' << format_number(v);
        for (double v : w.v_bl) os << ',' << format_number(v);
        for (double i : w.i_bl) os << ',' << format_number(i);
        os << '\n';
    }
}

void write_verdicts_json(std::ostream& os, const ExecTrace& t) {
    json arr = json::array();
    for (const auto& v : t.verdicts) {
        json j{{"step", v.step + 1}, {"cell", to_string(v.cell)}, {"spike", v.spike}, {"bit", v.bit ? 1 : 0}};
        if (v.latch) j["latch"] = *v.latch;
        arr.push_back(std::move(j));
    }
    os << arr.dump(2) << '\n';
}

void write_state_matrix_csv(std::ostream& os, const ExecTrace& t) {
    os << "step_index,annotation";
    for (const auto& c : t.cells) os << ',' << to_string(c);
    os << '\n';
    for (const auto& s : t.steps) {
        os << s.index + 1 << ',' << to_string(s.annotation);
        for (const auto& st : s.states) os << ',' << state_cell(st);
        os << '\n';
    }
}

void write_calibration_json(std::ostream& os, const Calibration& c) {
    json report = json::array();
    for (const auto& k : c.report) {
        report.push_back({{"v_w", k.v_w},
                          {"t_write", optional_number(k.t_write)},
                          {"t_half_drift", k.t_half_drift},
                          {"half_drift_reached", k.half_drift_reached},
                          {"t_pulse", k.t_pulse},
                          {"spike_peak", k.spike_peak},
                          {"nospike_peak", k.nospike_peak},
                          {"feasible", k.feasible},
                          {"score", k.score}});
    }
    json j{{"pulse",
            {{"v_w", c.pulse.v_w},
             {"t_pulse", c.pulse.t_pulse},
             {"t_gap", c.pulse.t_gap},
             {"samples_per_pulse", c.pulse.samples_per_pulse},
             {"i_spike", c.pulse.i_spike}}},
           {"target_margin", c.target_margin},
           {"drift_budget", c.drift_budget},
           {"report", report}};
    os << j.dump(2) << '\n';
}

PulseParams read_calibration_pulse(std::istream& is) {
    try {
        const json j = json::parse(is);
        const json& p = j.at("pulse");
        PulseParams pp;
        pp.v_w = p.at("v_w").get<double>();
        pp.t_pulse = p.at("t_pulse").get<double>();
        pp.t_gap = p.at("t_gap").get<double>();
        pp.samples_per_pulse = p.at("samples_per_pulse").get<int>();
        pp.i_spike = p.at("i_spike").get<double>();
        pp.validate();
        return pp;
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("malformed calibration file: ") + e.what());
    }
}

}  // namespace crsim
