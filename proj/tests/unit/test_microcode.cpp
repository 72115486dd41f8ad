#include <algorithm>

#include "crsim/errors.hpp"
#include "crsim/microcode.hpp"
#include "doctest.h"

using namespace crsim;

TEST_CASE("program lengths and device usage for N in [1, 64]") {
    for (int n = 1; n <= 64; ++n) {
        CAPTURE(n);
        const Program pc = gen_pc_adder(n);
        const Program tc = gen_tc_adder(n);
        CHECK(pc.cycle_count() == 2 * (n + 1) + 2);
        CHECK(tc.cycle_count() == 4 * n + 5);
        CHECK(static_cast<int>(pc.touched_cells().size()) == 2 * (n + 1));
        CHECK(static_cast<int>(tc.touched_cells().size()) == n + 2);
        CHECK(pc.declared_devices == pc_device_count(n));
        CHECK(tc.declared_devices == tc_device_count(n));
        CHECK(validate_program(pc).empty());
        CHECK(validate_program(tc).empty());
        CHECK(pc.result_cells.size() == static_cast<std::size_t>(n + 1));
    }
    CHECK_THROWS_AS(gen_pc_adder(0), ArgumentError);
    CHECK_THROWS_AS(gen_tc_adder(-1), ArgumentError);
}

TEST_CASE("annotation sequence of the two-bit programs") {
    const Program pc = gen_pc_adder(2);
    std::vector<Annotation> got;
    for (const auto& s : pc.steps) got.push_back(s.annotation);
    const std::vector<Annotation> pc_expected{Annotation::init_read, Annotation::program_c0, Annotation::carry,
                                              Annotation::carry,     Annotation::carry,      Annotation::sum2,
                                              Annotation::sum2,      Annotation::sum2};
    CHECK(got == pc_expected);

    const Program tc = gen_tc_adder(2);
    REQUIRE(tc.steps.size() == 13);
    CHECK(tc.steps[3].annotation == Annotation::read);
    CHECK(tc.steps[7].annotation == Annotation::read);
    CHECK(tc.steps[11].annotation == Annotation::read);
    CHECK(tc.steps[12].annotation == Annotation::sum2);
    REQUIRE(tc.steps[3].reads.size() == 1);
    CHECK(tc.steps[3].reads[0].latch == "c1");
}

TEST_CASE("subtractor swaps b for its complement and sets the carry in") {
    const Program add = gen_pc_adder(3);
    const Program sub = gen_pc_adder(3, true);
    CHECK(sub.subtract);
    CHECK(sub.steps[1].arrays[0].wl == Signal::const1());
    CHECK(add.steps[1].arrays[0].wl == Signal::carry_in());
    CHECK(validate_program(gen_tc_adder(3, true)).empty());
}

TEST_CASE("signal and cell text round trip") {
    const Signal sigs[] = {Signal::const0(),   Signal::const1(),   Signal::ground(),
                           Signal::carry_in(), Signal::input_a(3), Signal::input_b(0),
                           Signal::not_b(7),   Signal::read_forward({1, 0, 2}), Signal::from_reg("c4")};
    for (const auto& s : sigs) CHECK(parse_signal(to_string(s)) == s);
    CHECK(to_string(Signal::read_forward({1, 0, 2})) == "read_fwd:A1/0/2");
    CHECK(parse_cell("A1/5/3") == CellAddr{1, 5, 3});
    CHECK_THROWS_AS(parse_signal("nope"), ArgumentError);
    CHECK_THROWS_AS(parse_cell("B0/0"), ArgumentError);
    CHECK(parse_annotation(to_string(Annotation::writeback)) == Annotation::writeback);
}

TEST_CASE("JSON round trip preserves the program") {
    for (const Program& p : {gen_pc_adder(3), gen_tc_adder(2, true), with_final_read(gen_tc_adder(1))}) {
        const Program q = program_from_json(program_to_json(p));
        CHECK(program_to_json(q) == program_to_json(p));
        CHECK(validate_program(q).empty());
        CHECK(q.steps.size() == p.steps.size());
    }
    CHECK_THROWS_AS(program_from_json("{not json"), ArgumentError);
}

TEST_CASE("final read is excluded from the cycle count") {
    const Program p = with_final_read(gen_pc_adder(2));
    CHECK(p.steps.size() == 9);
    CHECK(p.cycle_count() == 8);
    CHECK(p.steps.back().annotation == Annotation::final_read);
    CHECK(p.steps.back().reads.size() == 3);
}

namespace {
bool has_code(const std::vector<Diagnostic>& d, const std::string& code) {
    return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) { return x.code == code; });
}
}  // namespace

TEST_CASE("validator reports broken programs") {
    Program p = gen_tc_adder(2);
    std::swap(p.steps[3], p.steps[4]);  // SUM2 now uses c1 before it is latched
    CHECK(has_code(validate_program(p), "reg_dominance"));

    p = gen_pc_adder(2);
    p.steps[5].reads.clear();
    CHECK(has_code(validate_program(p), "read_forward"));

    p = gen_pc_adder(2);
    p.steps[2].arrays[0].wl = Signal::input_a(5);
    CHECK(has_code(validate_program(p), "input_index"));

    p = gen_pc_adder(2);
    p.steps[2].arrays[0].bls.pop_back();
    CHECK(has_code(validate_program(p), "bitline_count"));

    p = gen_pc_adder(2);
    p.steps.pop_back();
    CHECK(has_code(validate_program(p), "length"));
}

TEST_CASE("comparison table rows") {
    struct Row {
        const char* scheme;
        long long devices;
        long long cycles;
        bool crossbar;
    };
    for (int n : {1, 2, 16}) {
        const Row expected[] = {
            {"Lehtonen", 3LL * n + 5, 88LL * n + 48, true},
            {"Kvatinsky serial", 3LL * n + 3, 29LL * n, true},
            {"Kvatinsky parallel", 9LL * n, 5LL * n + 18, false},
            {"PC-Adder", 2LL * (n + 1), 2LL * (n + 1) + 2, true},
            {"TC-Adder", n + 2LL, 4LL * n + 5, true},
        };
        const auto rows = comparison_table(n);
        REQUIRE(rows.size() == 5);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(rows[k].scheme == expected[k].scheme);
            CHECK(rows[k].devices == expected[k].devices);
            CHECK(rows[k].cycles == expected[k].cycles);
            CHECK(rows[k].common_crossbar == expected[k].crossbar);
        }
    }
}

TEST_CASE("step table lists one row per step") {
    const std::string t = format_step_table(gen_tc_adder(2));
    CHECK(t.find("13. SUM2") != std::string::npos);
    CHECK(t.find("14.") == std::string::npos);
    CHECK(t.find("read: A0/0/0->c2") != std::string::npos);
}
