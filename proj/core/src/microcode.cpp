#include "crsim/microcode.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "crsim/errors.hpp"

namespace crsim {

namespace {

int parse_int(std::string_view text, std::string_view what) {
    int value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ArgumentError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

struct Builder {
    Program& p;
    Placement where;

    std::vector<Signal> idle_row(int array) const {
        return std::vector<Signal>(static_cast<std::size_t>(p.arrays[array].bitlines),
                                   Signal::ground());
    }
    CellAddr cell(int array, int j) const {
        return {array, p.arrays[array].wordline, where.bitline_offset + j};
    }
    Signal& bl(ArrayDrive& d, int j) const {
        return d.bls[static_cast<std::size_t>(where.bitline_offset + j)];
    }
    ArrayDrive drive(int array, Signal wl) const { return {array, std::move(wl), idle_row(array)}; }
};

}  // namespace

std::string to_string(const CellAddr& c) {
    return "A" + std::to_string(c.array) + "/" + std::to_string(c.wl) + "/" + std::to_string(c.bl);
}

CellAddr parse_cell(std::string_view text) {
    if (text.size() < 2 || text[0] != 'A') {
        throw ArgumentError("invalid cell address: '" + std::string(text) + "'");
    }
    const auto s1 = text.find('/');
    const auto s2 = s1 == std::string_view::npos ? s1 : text.find('/', s1 + 1);
    if (s2 == std::string_view::npos) {
        throw ArgumentError("invalid cell address: '" + std::string(text) + "'");
    }
    CellAddr c;
    c.array = parse_int(text.substr(1, s1 - 1), "array index");
    c.wl = parse_int(text.substr(s1 + 1, s2 - s1 - 1), "wordline index");
    c.bl = parse_int(text.substr(s2 + 1), "bitline index");
    return c;
}

std::string to_string(const Signal& s) {
    switch (s.kind) {
        case SignalKind::const0:
            return "const0";
        case SignalKind::const1:
            return "const1";
        case SignalKind::ground:
            return "gnd";
        case SignalKind::carry_in:
            return "cin";
        case SignalKind::input_a:
            return "a:" + std::to_string(s.index);
        case SignalKind::input_b:
            return "b:" + std::to_string(s.index);
        case SignalKind::not_b:
            return "not_b:" + std::to_string(s.index);
        case SignalKind::read_forward:
            return "read_fwd:" + to_string(s.source);
        case SignalKind::reg:
            return "reg:" + s.reg;
    }
    return "?";
}

Signal parse_signal(std::string_view text) {
    if (text == "const0") return Signal::const0();
    if (text == "const1") return Signal::const1();
    if (text == "gnd") return Signal::ground();
    if (text == "cin") return Signal::carry_in();
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ArgumentError("invalid signal: '" + std::string(text) + "'");
    }
    const auto tag = text.substr(0, colon);
    const auto arg = text.substr(colon + 1);
    if (tag == "a") return Signal::input_a(parse_int(arg, "operand index"));
    if (tag == "b") return Signal::input_b(parse_int(arg, "operand index"));
    if (tag == "not_b") return Signal::not_b(parse_int(arg, "operand index"));
    if (tag == "read_fwd") return Signal::read_forward(parse_cell(arg));
    if (tag == "reg" && !arg.empty()) return Signal::from_reg(std::string(arg));
    throw ArgumentError("invalid signal: '" + std::string(text) + "'");
}

std::string_view to_string(Annotation a) {
    switch (a) {
        case Annotation::init_read:
            return "INIT_READ";
        case Annotation::program_c0:
            return "PROGRAM_C0";
        case Annotation::carry:
            return "CARRY";
        case Annotation::sum1:
            return "SUM1";
        case Annotation::sum2:
            return "SUM2";
        case Annotation::read:
            return "READ";
        case Annotation::writeback:
            return "WRITEBACK";
        case Annotation::final_read:
            return "FINAL_READ";
    }
    return "?";
}

Annotation parse_annotation(std::string_view text) {
    for (Annotation a : {Annotation::init_read, Annotation::program_c0, Annotation::carry,
                         Annotation::sum1, Annotation::sum2, Annotation::read,
                         Annotation::writeback, Annotation::final_read}) {
        if (to_string(a) == text) return a;
    }
    throw ArgumentError("invalid annotation: '" + std::string(text) + "'");
}

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::pc:
            return "pc";
        case Scheme::tc:
            return "tc";
        case Scheme::custom:
            return "custom";
    }
    return "?";
}

Scheme parse_scheme(std::string_view text) {
    if (text == "pc") return Scheme::pc;
    if (text == "tc") return Scheme::tc;
    if (text == "custom") return Scheme::custom;
    throw ArgumentError("invalid scheme: '" + std::string(text) + "' (expected pc or tc)");
}

const ArrayDrive* Step::drive_for(int array) const {
    for (const auto& d : arrays) {
        if (d.array == array) return &d;
    }
    return nullptr;
}

int Program::cycle_count() const {
    int count = static_cast<int>(steps.size());
    if (!steps.empty() && steps.back().annotation == Annotation::final_read) --count;
    return count;
}

std::vector<CellAddr> Program::touched_cells() const {
    std::set<CellAddr> cells;
    for (const auto& step : steps) {
        for (const auto& d : step.arrays) {
            if (d.array < 0 || d.array >= static_cast<int>(arrays.size())) continue;
            for (std::size_t k = 0; k < d.bls.size(); ++k) {
                if (!d.bls[k].is_ground()) {
                    cells.insert({d.array, arrays[d.array].wordline, static_cast<int>(k)});
                }
            }
        }
        for (const auto& r : step.reads) cells.insert(r.cell);
    }
    return {cells.begin(), cells.end()};
}

int pc_cycle_count(int n) { return 2 * (n + 1) + 2; }
int tc_cycle_count(int n) { return 4 * n + 5; }
int pc_device_count(int n) { return 2 * (n + 1); }
int tc_device_count(int n) { return n + 2; }

Program gen_pc_adder(int n, bool subtract, const Placement& where) {
    if (n < 1) throw ArgumentError("gen_pc_adder: operand width must be at least 1");
    Program p;
    p.scheme = Scheme::pc;
    p.n = n;
    p.subtract = subtract;
    const int cells = n + 1;
    const int width = where.bitline_offset + cells;
    p.arrays = {{where.calc_wordline, width}, {where.aux_wordline, width}};
    p.declared_devices = pc_device_count(n);
    Builder b{p, where};

    // Subtraction adds the complement of b with a forced carry-in.
    auto in_b = [&](int k) { return subtract ? Signal::not_b(k) : Signal::input_b(k); };
    auto in_not_b = [&](int k) { return subtract ? Signal::input_b(k) : Signal::not_b(k); };
    const Signal cin = subtract ? Signal::const1() : Signal::carry_in();
    constexpr int calc = 0;
    constexpr int aux = 1;

    Step init{Annotation::init_read, {}, {}};
    for (int a : {calc, aux}) {
        ArrayDrive d = b.drive(a, Signal::const1());
        for (int j = 0; j < cells; ++j) {
            b.bl(d, j) = Signal::const0();
            init.reads.push_back({b.cell(a, j), std::nullopt});
        }
        init.arrays.push_back(std::move(d));
    }
    p.steps.push_back(std::move(init));

    Step program_c0{Annotation::program_c0, {}, {}};
    for (int a : {calc, aux}) {
        ArrayDrive d = b.drive(a, cin);
        for (int j = 0; j < cells; ++j) b.bl(d, j) = Signal::const1();
        program_c0.arrays.push_back(std::move(d));
    }
    p.steps.push_back(std::move(program_c0));

    // Significance i = n repeats the operand MSBs (sign extension).
    for (int i = 0; i <= n; ++i) {
        const int k = std::min(i, n - 1);
        Step s{Annotation::carry, {}, {}};
        ArrayDrive dc = b.drive(calc, Signal::input_a(k));
        ArrayDrive da = b.drive(aux, Signal::input_a(k));
        for (int j = i; j < cells; ++j) {
            b.bl(dc, j) = j == i ? in_b(k) : in_not_b(k);
            b.bl(da, j) = in_not_b(k);
        }
        s.arrays = {std::move(dc), std::move(da)};
        p.steps.push_back(std::move(s));
    }

    for (int i = 0; i <= n; ++i) {
        const int k = std::min(i, n - 1);
        Step s{Annotation::sum2, {}, {}};
        const CellAddr source = b.cell(aux, i);
        ArrayDrive dc = b.drive(calc, in_b(k));
        b.bl(dc, i) = Signal::read_forward(source);
        ArrayDrive da = b.drive(aux, Signal::const1());
        b.bl(da, i) = Signal::const0();
        s.arrays = {std::move(dc), std::move(da)};
        s.reads.push_back({source, std::nullopt});
        p.steps.push_back(std::move(s));
    }

    for (int j = 0; j < cells; ++j) p.result_cells.push_back(b.cell(calc, j));
    return p;
}

Program gen_tc_adder(int n, bool subtract, const Placement& where) {
    if (n < 1) throw ArgumentError("gen_tc_adder: operand width must be at least 1");
    Program p;
    p.scheme = Scheme::tc;
    p.n = n;
    p.subtract = subtract;
    const int cells = n + 2;  // toggle cell + n + 1 sum cells
    const int width = where.bitline_offset + cells;
    p.arrays = {{where.calc_wordline, width}};
    p.declared_devices = tc_device_count(n);
    Builder b{p, where};

    auto in_b = [&](int k) { return subtract ? Signal::not_b(k) : Signal::input_b(k); };
    auto in_not_b = [&](int k) { return subtract ? Signal::input_b(k) : Signal::not_b(k); };
    const Signal cin = subtract ? Signal::const1() : Signal::carry_in();
    constexpr int row = 0;
    constexpr int toggle = 0;
    auto sum_cell = [](int j) { return j + 1; };

    Step init{Annotation::init_read, {}, {}};
    ArrayDrive di = b.drive(row, Signal::const1());
    for (int j = 0; j < cells; ++j) {
        b.bl(di, j) = Signal::const0();
        init.reads.push_back({b.cell(row, j), std::nullopt});
    }
    init.arrays.push_back(std::move(di));
    p.steps.push_back(std::move(init));

    Step program_c0{Annotation::program_c0, {}, {}};
    ArrayDrive dp = b.drive(row, cin);
    for (int j = 0; j < cells; ++j) b.bl(dp, j) = Signal::const1();
    program_c0.arrays.push_back(std::move(dp));
    p.steps.push_back(std::move(program_c0));

    for (int i = 0; i <= n; ++i) {
        const int k = std::min(i, n - 1);
        const std::string reg = "c" + std::to_string(i + 1);

        Step carry{Annotation::carry, {}, {}};
        ArrayDrive dc = b.drive(row, Signal::input_a(k));
        b.bl(dc, toggle) = in_not_b(k);
        for (int j = i; j <= n; ++j) b.bl(dc, sum_cell(j)) = j == i ? in_b(k) : in_not_b(k);
        carry.arrays.push_back(std::move(dc));
        p.steps.push_back(std::move(carry));

        Step read{Annotation::read, {}, {}};
        ArrayDrive dr = b.drive(row, Signal::const1());
        b.bl(dr, toggle) = Signal::const0();
        read.arrays.push_back(std::move(dr));
        read.reads.push_back({b.cell(row, toggle), reg});
        p.steps.push_back(std::move(read));

        Step sum{Annotation::sum2, {}, {}};
        ArrayDrive ds = b.drive(row, in_b(k));
        b.bl(ds, sum_cell(i)) = Signal::from_reg(reg);
        sum.arrays.push_back(std::move(ds));
        p.steps.push_back(std::move(sum));

        if (i < n) {
            Step wb{Annotation::writeback, {}, {}};
            ArrayDrive dw = b.drive(row, Signal::from_reg(reg));
            b.bl(dw, toggle) = Signal::const1();
            wb.arrays.push_back(std::move(dw));
            p.steps.push_back(std::move(wb));
        }
    }

    for (int j = 0; j <= n; ++j) p.result_cells.push_back(b.cell(row, sum_cell(j)));
    return p;
}

Program with_final_read(Program p) {
    Step s{Annotation::final_read, {}, {}};
    for (std::size_t a = 0; a < p.arrays.size(); ++a) {
        ArrayDrive d{static_cast<int>(a), Signal::const1(),
                     std::vector<Signal>(static_cast<std::size_t>(p.arrays[a].bitlines),
                                         Signal::ground())};
        bool used = false;
        for (const auto& c : p.result_cells) {
            if (c.array == static_cast<int>(a)) {
                d.bls[static_cast<std::size_t>(c.bl)] = Signal::const0();
                used = true;
            }
        }
        if (used) s.arrays.push_back(std::move(d));
    }
    for (const auto& c : p.result_cells) s.reads.push_back({c, std::nullopt});
    p.steps.push_back(std::move(s));
    return p;
}

std::vector<Diagnostic> validate_program(const Program& p) {
    std::vector<Diagnostic> out;
    auto report = [&](int step, std::string code, std::string msg) {
        out.push_back({step, std::move(code), std::move(msg)});
    };
    const int n_arrays = static_cast<int>(p.arrays.size());
    auto in_range = [&](const CellAddr& c) {
        return c.array >= 0 && c.array < n_arrays && c.wl == p.arrays[c.array].wordline && c.bl >= 0 &&
               c.bl < p.arrays[c.array].bitlines;
    };

    if (p.n < 1) report(-1, "width", "operand width must be at least 1");
    if (n_arrays == 0) report(-1, "layout", "program declares no arrays");

    std::set<std::string> latched;
    for (int si = 0; si < static_cast<int>(p.steps.size()); ++si) {
        const Step& s = p.steps[si];
        if (s.annotation == Annotation::final_read && si + 1 != static_cast<int>(p.steps.size())) {
            report(si, "final_read", "FINAL_READ may only be the last step");
        }
        std::set<CellAddr> read_now;
        for (const auto& r : s.reads) {
            if (!in_range(r.cell)) {
                report(si, "read_target", "read of cell outside the layout: " + to_string(r.cell));
                continue;
            }
            read_now.insert(r.cell);
        }

        auto check_signal = [&](const Signal& sig, const std::string& where) {
            switch (sig.kind) {
                case SignalKind::input_a:
                case SignalKind::input_b:
                case SignalKind::not_b:
                    if (sig.index < 0 || sig.index >= p.n) {
                        report(si, "input_index", where + ": operand index out of range in " + to_string(sig));
                    }
                    break;
                case SignalKind::reg:
                    if (!latched.contains(sig.reg)) {
                        report(si, "reg_dominance", where + ": register '" + sig.reg + "' used before any latch");
                    }
                    break;
                case SignalKind::read_forward:
                    if (!read_now.contains(sig.source)) {
                        report(si, "read_forward",
                               where + ": forwarded cell " + to_string(sig.source) + " is not read in this step");
                    }
                    break;
                default:
                    break;
            }
        };

        std::set<int> seen_arrays;
        for (const auto& d : s.arrays) {
            const std::string where = "A" + std::to_string(d.array);
            if (d.array < 0 || d.array >= n_arrays) {
                report(si, "array_index", where + ": array not in layout");
                continue;
            }
            if (!seen_arrays.insert(d.array).second) {
                report(si, "array_index", where + ": array driven twice in one step");
            }
            if (static_cast<int>(d.bls.size()) != p.arrays[d.array].bitlines) {
                report(si, "bitline_count", where + ": bitline vector does not match the layout");
            }
            check_signal(d.wl, where + " wl");
            if (d.wl.is_ground()) {
                for (const auto& sig : d.bls) {
                    if (!sig.is_ground()) {
                        report(si, "idle_line", where + ": grounded wordline with driven bitlines");
                        break;
                    }
                }
            }
            for (std::size_t k = 0; k < d.bls.size(); ++k) {
                check_signal(d.bls[k], where + " bl" + std::to_string(k));
            }
        }

        for (const auto& r : s.reads) {
            if (!in_range(r.cell)) continue;
            const ArrayDrive* d = s.drive_for(r.cell.array);
            const bool driven = d && static_cast<int>(d->bls.size()) > r.cell.bl &&
                                d->wl.kind == SignalKind::const1 &&
                                d->bls[static_cast<std::size_t>(r.cell.bl)].kind == SignalKind::const0;
            if (!driven) {
                report(si, "read_signal", "read of " + to_string(r.cell) + " is not driven as ('1', '0')");
            }
        }
        for (const auto& r : s.reads) {
            if (r.latch) latched.insert(*r.latch);
        }
    }

    if (static_cast<int>(p.result_cells.size()) != p.n + 1) {
        report(-1, "result_cells", "expected n + 1 result cells");
    }
    std::set<CellAddr> distinct;
    for (const auto& c : p.result_cells) {
        if (!in_range(c)) report(-1, "result_cells", "result cell outside the layout: " + to_string(c));
        if (!distinct.insert(c).second) report(-1, "result_cells", "duplicate result cell " + to_string(c));
    }

    if (p.scheme != Scheme::custom && p.n >= 1) {
        const int cycles = p.scheme == Scheme::pc ? pc_cycle_count(p.n) : tc_cycle_count(p.n);
        const int devices = p.scheme == Scheme::pc ? pc_device_count(p.n) : tc_device_count(p.n);
        if (p.cycle_count() != cycles) {
            report(-1, "length",
                   "program has " + std::to_string(p.cycle_count()) + " cycles, scheme requires " +
                       std::to_string(cycles));
        }
        const int touched = static_cast<int>(p.touched_cells().size());
        if (touched != devices || p.declared_devices != devices) {
            report(-1, "devices",
                   "program touches " + std::to_string(touched) + " cells (declared " +
                       std::to_string(p.declared_devices) + "), scheme requires " +
                       std::to_string(devices));
        }
    }
    return out;
}

std::vector<ComparisonRow> comparison_table(int n) {
    if (n < 1) throw ArgumentError("comparison_table: operand width must be at least 1");
    const long long N = n;
    return {
        {"Lehtonen", 3 * N + 5, 88 * N + 48, true},
        {"Kvatinsky serial", 3 * N + 3, 29 * N, true},
        {"Kvatinsky parallel", 9 * N, 5 * N + 18, false},
        {"PC-Adder", 2 * (N + 1), 2 * (N + 1) + 2, true},
        {"TC-Adder", N + 2, 4 * N + 5, true},
    };
}

std::string format_step_table(const Program& p) {
    std::ostringstream os;
    os << "scheme=" << to_string(p.scheme) << " n=" << p.n << (p.subtract ? " subtract" : "")
       << " cycles=" << p.cycle_count() << " devices=" << p.declared_devices << "\n";
    int index = 1;
    for (const auto& s : p.steps) {
        os << index++ << ". " << to_string(s.annotation) << "\n";
        for (const auto& d : s.arrays) {
            os << "   A" << d.array << " wl" << p.arrays[d.array].wordline << " = " << to_string(d.wl)
               << " | bl";
            // highest significance first, as in the cell diagrams
            for (std::size_t k = d.bls.size(); k-- > 0;) os << " " << to_string(d.bls[k]);
            os << "\n";
        }
        if (!s.reads.empty()) {
            os << "   read:";
            for (const auto& r : s.reads) {
                os << " " << to_string(r.cell);
                if (r.latch) os << "->" << *r.latch;
            }
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace crsim
