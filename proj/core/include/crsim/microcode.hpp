#pragma once

// Microcode for half-select signal schedules on CRS crossbar arrays. A
// Program is a list of Steps; each Step assigns one symbolic signal to the
// active wordline of every driven array and one to each of its bitlines,
// and names the cells whose read-out is captured in that cycle.

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crsim {

struct CellAddr {
    int array = 0;
    int wl = 0;
    int bl = 0;

    auto operator<=>(const CellAddr&) const = default;
};

/// "A<array>/<wl>/<bl>"
std::string to_string(const CellAddr& c);
CellAddr parse_cell(std::string_view text);

enum class SignalKind { const0, const1, ground, input_a, input_b, not_b, carry_in, read_forward, reg };

struct Signal {
    SignalKind kind = SignalKind::ground;
    int index = 0;         // operand bit for input_a / input_b / not_b
    CellAddr source;       // read_forward
    std::string reg;       // reg

    static Signal const0() { return {SignalKind::const0, 0, {}, {}}; }
    static Signal const1() { return {SignalKind::const1, 0, {}, {}}; }
    static Signal ground() { return {SignalKind::ground, 0, {}, {}}; }
    static Signal carry_in() { return {SignalKind::carry_in, 0, {}, {}}; }
    static Signal input_a(int i) { return {SignalKind::input_a, i, {}, {}}; }
    static Signal input_b(int i) { return {SignalKind::input_b, i, {}, {}}; }
    static Signal not_b(int i) { return {SignalKind::not_b, i, {}, {}}; }
    static Signal read_forward(CellAddr c) { return {SignalKind::read_forward, 0, c, {}}; }
    static Signal from_reg(std::string name) { return {SignalKind::reg, 0, {}, std::move(name)}; }

    bool is_ground() const { return kind == SignalKind::ground; }
    bool operator==(const Signal&) const = default;
};

/// Tagged string form: "const0", "const1", "gnd", "cin", "a:1", "b:0",
/// "not_b:0", "read_fwd:A1/0/2", "reg:c1".
std::string to_string(const Signal& s);
Signal parse_signal(std::string_view text);

enum class Annotation { init_read, program_c0, carry, sum1, sum2, read, writeback, final_read };

std::string_view to_string(Annotation a);
Annotation parse_annotation(std::string_view text);

/// Signals on one array during a step. `bls` covers every bitline.
struct ArrayDrive {
    int array = 0;
    Signal wl;
    std::vector<Signal> bls;
};

struct ReadDirective {
    CellAddr cell;
    std::optional<std::string> latch;  // register receiving the read bit
};

struct Step {
    Annotation annotation = Annotation::carry;
    std::vector<ArrayDrive> arrays;  // arrays not listed are idle (all lines grounded)
    std::vector<ReadDirective> reads;

    const ArrayDrive* drive_for(int array) const;
};

/// Geometry of one array row used by a program: the active wordline and
/// the number of bitlines.
struct ArrayLayout {
    int wordline = 0;
    int bitlines = 0;
};

enum class Scheme { pc, tc, custom };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view text);

struct Program {
    Scheme scheme = Scheme::custom;
    int n = 0;
    bool subtract = false;
    std::vector<ArrayLayout> arrays;
    std::vector<Step> steps;
    std::vector<CellAddr> result_cells;  // LSB first, n + 1 entries
    int declared_devices = 0;

    /// Steps excluding a trailing FINAL_READ, which display traces may add.
    int cycle_count() const;
    /// Cells on active wordlines that receive a non-ground bitline signal.
    std::vector<CellAddr> touched_cells() const;
};

/// Where the adder lives in the arrays.
struct Placement {
    int calc_wordline = 0;   // wl_calc in array 0
    int aux_wordline = 0;    // wl_aux in array 1 (PC-Adder only)
    int bitline_offset = 0;  // first bitline used
};

int pc_cycle_count(int n);
int tc_cycle_count(int n);
int pc_device_count(int n);
int tc_device_count(int n);

/// Precalculation-Adder over a calculation row (array 0) and an auxiliary
/// row (array 1). Throws ArgumentError for n < 1.
Program gen_pc_adder(int n, bool subtract = false, const Placement& where = {});

/// Toggle-Cell-Adder on one row: toggle cell first, then n + 1 sum cells.
Program gen_tc_adder(int n, bool subtract = false, const Placement& where = {});

/// Returns `p` with an extra FINAL_READ step over the result cells.
Program with_final_read(Program p);

struct Diagnostic {
    int step = -1;  // -1 for program-level findings
    std::string code;
    std::string message;
};

/// Empty iff the program satisfies the structural invariants: bitline
/// vectors sized to the layout, operand indices < n, registers latched in
/// an earlier step, read-forward sources read in the same step, read
/// directives driven as ('1', '0'), distinct in-range result cells, and
/// the scheme's cycle and device counts.
std::vector<Diagnostic> validate_program(const Program& p);

struct ComparisonRow {
    std::string scheme;
    long long devices = 0;
    long long cycles = 0;
    bool common_crossbar = false;
};

/// Device and cycle counts of the compared adder schemes at width n.
std::vector<ComparisonRow> comparison_table(int n);

/// Human-readable step table, one row per step.
std::string format_step_table(const Program& p);

/// JSON serialization (see README for the schema).
std::string program_to_json(const Program& p, int indent = 2);
Program program_from_json(std::string_view text);

}  // namespace crsim
