#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "crsim/crs_cell.hpp"
#include "crsim/ecm_device.hpp"
#include "crsim/errors.hpp"
#include "crsim/exec.hpp"
#include "crsim/microcode.hpp"
#include "crsim/params_io.hpp"
#include "crsim/trace_io.hpp"

namespace fs = std::filesystem;
using namespace crsim;

namespace {

enum Exit { kOk = 0, kMismatch = 1, kUsage = 2, kFailure = 3 };

struct Global {
    std::string params;
    std::string out = ".";
    std::string format = "csv";
};

struct SweepArgs {
    std::string device = "unit";
    std::optional<double> amplitude;
    double rate = kDefaultSweepRate;
    int samples = 4000;
    int state = 0;
};

struct PulseArgs {
    std::optional<double> v_w, t_pulse, t_gap, i_spike;
    std::optional<int> samples;
    double margin = 100.0;
    bool no_cache = false;
};

struct AdderArgs {
    std::string scheme = "pc";
    std::string a, b;
    int cin = 0;
    bool subtract = false;
    std::string level = "behavioral";
    PulseArgs pulse;
};

struct EmitArgs {
    std::string scheme = "pc";
    int n = 2;
    bool subtract = false;
    bool final_read = false;
};

struct CompareArgs {
    std::vector<int> n{1, 2, 16};
};

EcmParams load(const Global& g) { return g.params.empty() ? EcmParams{} : load_params(g.params); }

fs::path out_file(const Global& g, const std::string& name) {
    fs::create_directories(g.out);
    return fs::path(g.out) / name;
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
    std::ofstream os(path);
    if (!os) throw ArgumentError("cannot write '" + path.string() + "'");
    fn(os);
}

std::string landmark(const std::optional<double>& v) {
    if (!v) return "none";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f V", *v);
    return buf;
}

int cmd_sweep(const Global& g, const SweepArgs& a) {
    const EcmParams ep = load(g);
    SweepOptions opt;
    opt.samples = a.samples;
    if (a.device == "unit") {
        const auto samples = sweep_iv_unit(a.amplitude.value_or(1.5), a.rate, EcmState{ep.l}, ep, opt);
        const UnitLandmarks lm = extract_unit_landmarks(samples, ep, opt.current_fraction);
        write_file(out_file(g, "unit_sweep.csv"), [&](std::ostream& os) { write_unit_sweep_csv(os, samples); });
        write_file(out_file(g, "landmarks.json"), [&](std::ostream& os) { write_landmarks_json(os, lm, std::nullopt); });
        std::cout << "v_set=" << landmark(lm.v_set) << " v_reset=" << landmark(lm.v_reset) << '\n';
        return kOk;
    }
    const auto sw = sweep_iv_crs(a.amplitude.value_or(2.0), a.rate, CrsDeviceState::of(a.state != 0, ep), ep, opt);
    write_file(out_file(g, "crs_sweep.csv"), [&](std::ostream& os) { write_crs_sweep_csv(os, sw.samples); });
    write_file(out_file(g, "landmarks.json"), [&](std::ostream& os) { write_landmarks_json(os, std::nullopt, sw.thresholds); });
    if (sw.thresholds) {
        const auto& t = *sw.thresholds;
        std::cout << "v_th1=" << landmark(t.v_th1) << " v_th2=" << landmark(t.v_th2) << " v_th3=" << landmark(t.v_th3)
                  << " v_th4=" << landmark(t.v_th4) << '\n';
    } else {
        std::cout << "no CRS transition within the sweep\n";
    }
    return kOk;
}

fs::path cache_path(const Global& g, const EcmParams& ep, double margin) {
    const std::string key = format_params(ep) + "margin=" + format_number(margin) + "\n";
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
    if (!g.params.empty()) return fs::path(g.params + ".cal-" + hex + ".json");
    return out_file(g, std::string(".crsim-cal-") + hex + ".json");
}

Calibration run_calibration(const Global& g, const EcmParams& ep, double margin) {
    Calibration cal = calibrate_pulse(ep, margin);
    write_file(cache_path(g, ep, margin), [&](std::ostream& os) { write_calibration_json(os, cal); });
    return cal;
}

PulseParams resolve_pulse(const Global& g, const EcmParams& ep, const PulseArgs& a) {
    PulseParams pp;
    const bool complete = a.v_w && a.t_pulse && a.i_spike;
    if (!complete) {
        const fs::path cache = cache_path(g, ep, a.margin);
        std::ifstream in(cache);
        if (in && !a.no_cache) {
            pp = read_calibration_pulse(in);
        } else {
            std::cerr << "calibrating pulse (cached in " << cache.string() << ")\n";
            pp = run_calibration(g, ep, a.margin).pulse;
        }
    }
    if (a.v_w) pp.v_w = *a.v_w;
    if (a.t_pulse) pp.t_pulse = *a.t_pulse;
    if (a.t_gap) pp.t_gap = *a.t_gap;
    if (a.i_spike) pp.i_spike = *a.i_spike;
    if (a.samples) pp.samples_per_pulse = *a.samples;
    pp.validate();
    return pp;
}

long long oracle(const Word& a, const Word& b, bool cin, bool subtract) {
    return subtract ? a.as_signed() - b.as_signed() : a.as_signed() + b.as_signed() + (cin ? 1 : 0);
}

int cmd_adder(const Global& g, const AdderArgs& a) {
    const Word wa = Word::parse(a.a);
    const Word wb = Word::parse(a.b);
    if (wa.width() != wb.width()) throw ArgumentError("operands must have the same width");
    const int n = wa.width();
    const Scheme scheme = parse_scheme(a.scheme);
    const Program p = scheme == Scheme::pc ? gen_pc_adder(n, a.subtract) : gen_tc_adder(n, a.subtract);
    const bool cin = a.cin != 0;

    ExecTrace trace;
    if (a.level == "device") {
        const EcmParams ep = load(g);
        const PulseParams pp = resolve_pulse(g, ep, a.pulse);
        trace = run_device(p, wa, wb, cin, pp, ep);
        write_file(out_file(g, "trace.csv"), [&](std::ostream& os) { write_device_trace_csv(os, trace); });
        for (const auto& v : trace.half_select_violations) {
            std::cerr << "half-select violation: step " << v.step + 1 << ' ' << to_string(v.cell) << ' ' << v.before
                      << " -> " << v.after << '\n';
        }
        for (const auto& v : trace.write_failures) {
            std::cerr << "write failure: step " << v.step + 1 << ' ' << to_string(v.cell) << ' ' << v.after
                      << " expected " << v.expected << '\n';
        }
    } else {
        trace = run_behavioral(p, wa, wb, cin);
    }
    write_file(out_file(g, "states.csv"), [&](std::ostream& os) { write_state_matrix_csv(os, trace); });
    write_file(out_file(g, "verdicts.json"), [&](std::ostream& os) { write_verdicts_json(os, trace); });

    std::cout << "s=" << trace.result.str() << '\n';
    const Word expected = Word::from_int(oracle(wa, wb, cin, a.subtract), n + 1);
    if (trace.result != expected) {
        std::cerr << "mismatch: expected s=" << expected.str() << '\n';
        return kMismatch;
    }
    return kOk;
}

int cmd_calibrate(const Global& g, const PulseArgs& a) {
    const EcmParams ep = load(g);
    const Calibration cal = run_calibration(g, ep, a.margin);
    write_file(out_file(g, "calibration.json"), [&](std::ostream& os) { write_calibration_json(os, cal); });
    if (g.format == "md") {
        std::cout << "| V_w [V] | t_write [s] | t_half_drift [s] | t_pulse [s] | spike [A] | no-spike [A] | feasible |\n"
                  << "|---|---|---|---|---|---|---|\n";
        for (const auto& k : cal.report) {
            std::cout << "| " << k.v_w << " | " << (k.t_write ? format_number(*k.t_write) : "-") << " | "
                      << format_number(k.t_half_drift) << " | " << format_number(k.t_pulse) << " | "
                      << format_number(k.spike_peak) << " | " << format_number(k.nospike_peak) << " | "
                      << (k.feasible ? "yes" : "no") << " |\n";
        }
    }
    std::cout << "v_w=" << cal.pulse.v_w << " t_pulse=" << cal.pulse.t_pulse << " i_spike=" << cal.pulse.i_spike << '\n';
    return kOk;
}

int cmd_emit(const Global& g, const EmitArgs& a) {
    const Scheme scheme = parse_scheme(a.scheme);
    Program p = scheme == Scheme::pc ? gen_pc_adder(a.n, a.subtract) : gen_tc_adder(a.n, a.subtract);
    if (a.final_read) p = with_final_read(std::move(p));
    const std::string stem = std::string(to_string(scheme)) + "_n" + std::to_string(a.n);
    const std::string table = format_step_table(p);
    write_file(out_file(g, stem + ".json"), [&](std::ostream& os) { os << program_to_json(p) << '\n'; });
    write_file(out_file(g, stem + "_steps.txt"), [&](std::ostream& os) { os << table; });
    if (g.format == "json") {
        std::cout << program_to_json(p) << '\n';
    } else {
        std::cout << table;
    }
    const auto diags = validate_program(p);
    for (const auto& d : diags) std::cerr << "step " << d.step + 1 << ": " << d.code << ": " << d.message << '\n';
    return diags.empty() ? kOk : kMismatch;
}

int cmd_compare(const Global& g, const CompareArgs& a) {
    std::ostringstream md, csv;
    csv << "n,scheme,devices,cycles,common_crossbar\n";
    for (int n : a.n) {
        if (n < 1) throw ArgumentError("N must be >= 1");
        const auto rows = comparison_table(n);
        long long best_dev = rows.front().devices, best_cyc = rows.front().cycles;
        for (const auto& r : rows) {
            best_dev = std::min(best_dev, r.devices);
            best_cyc = std::min(best_cyc, r.cycles);
        }
        md << "### N = " << n << "\n\n| Scheme | Devices | Cycles | Common crossbar |\n|---|---|---|---|\n";
        for (const auto& r : rows) {
            auto mark = [](long long v, bool best) { return best ? "**" + std::to_string(v) + "**" : std::to_string(v); };
            md << "| " << r.scheme << " | " << mark(r.devices, r.devices == best_dev) << " | "
               << mark(r.cycles, r.cycles == best_cyc) << " | " << (r.common_crossbar ? "Yes" : "No") << " |\n";
            csv << n << ',' << r.scheme << ',' << r.devices << ',' << r.cycles << ','
                << (r.common_crossbar ? "yes" : "no") << '\n';
        }
        md << '\n';
    }
    write_file(out_file(g, "compare.md"), [&](std::ostream& os) { os << md.str(); });
    write_file(out_file(g, "compare.csv"), [&](std::ostream& os) { os << csv.str(); });
    std::cout << (g.format == "csv" ? csv.str() : md.str());
    return kOk;
}

void add_pulse_options(CLI::App* cmd, PulseArgs& a) {
    cmd->add_option("--v-w", a.v_w, "Full-select amplitude [V]");
    cmd->add_option("--t-pulse", a.t_pulse, "Pulse width [s]");
    cmd->add_option("--t-gap", a.t_gap, "Settle time after each pulse [s]");
    cmd->add_option("--i-spike", a.i_spike, "Spike threshold [A]");
    cmd->add_option("--samples-per-pulse", a.samples, "Waveform samples per pulse")->check(CLI::PositiveNumber);
    cmd->add_option("--margin", a.margin, "Calibration target margin")->check(CLI::Range(1.0001, 1e12));
    cmd->add_flag("--no-cache", a.no_cache, "Recalibrate even when a cached calibration exists");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crsim: CRS in-memory adder simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--params", g.params, "Parameter file (key=value)");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--format", g.format, "Console format")->check(CLI::IsMember({"csv", "json", "md"}));

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Quasi-static I-V sweep of a unit cell or CRS");
    c_sweep->add_option("--device", sweep.device, "unit or crs")->check(CLI::IsMember({"unit", "crs"}));
    c_sweep->add_option("--amplitude", sweep.amplitude, "Sweep amplitude [V]")->check(CLI::PositiveNumber);
    c_sweep->add_option("--rate", sweep.rate, "Sweep rate [V/s]")->check(CLI::PositiveNumber);
    c_sweep->add_option("--samples", sweep.samples, "Samples per period")->check(CLI::Range(4, 10000000));
    c_sweep->add_option("--state", sweep.state, "Initial CRS bit")->check(CLI::Range(0, 1));

    AdderArgs adder;
    auto* c_adder = app.add_subcommand("adder", "Run an adder program");
    c_adder->add_option("--scheme", adder.scheme, "pc or tc")->check(CLI::IsMember({"pc", "tc"}));
    c_adder->add_option("--a", adder.a, "Operand a, MSB first")->required();
    c_adder->add_option("--b", adder.b, "Operand b, MSB first")->required();
    c_adder->add_option("--cin", adder.cin, "Carry in")->check(CLI::Range(0, 1));
    c_adder->add_flag("--subtract", adder.subtract, "Compute a - b");
    c_adder->add_option("--level", adder.level, "behavioral or device")->check(CLI::IsMember({"behavioral", "device"}));
    add_pulse_options(c_adder, adder.pulse);

    PulseArgs calib;
    auto* c_cal = app.add_subcommand("calibrate", "Calibrate the write pulse");
    c_cal->add_option("--margin", calib.margin, "Target margin")->check(CLI::Range(1.0001, 1e12));

    EmitArgs emit;
    auto* c_emit = app.add_subcommand("emit", "Write a program as JSON and a step table");
    c_emit->add_option("--scheme", emit.scheme, "pc or tc")->check(CLI::IsMember({"pc", "tc"}));
    c_emit->add_option("--n", emit.n, "Operand width")->check(CLI::Range(1, 4096));
    c_emit->add_flag("--subtract", emit.subtract, "Emit the subtractor");
    c_emit->add_flag("--final-read", emit.final_read, "Append a FINAL_READ step");

    CompareArgs compare;
    auto* c_cmp = app.add_subcommand("compare", "Device and cycle counts of adder schemes");
    c_cmp->add_option("--n", compare.n, "Operand widths")->expected(1, -1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*c_sweep) return cmd_sweep(g, sweep);
        if (*c_adder) return cmd_adder(g, adder);
        if (*c_cal) return cmd_calibrate(g, calib);
        if (*c_emit) return cmd_emit(g, emit);
        return cmd_compare(g, compare);
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
