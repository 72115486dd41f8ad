#include <cmath>
#include <limits>

#include "crsim/crs_cell.hpp"
#include "crsim/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crsim;

TEST_CASE("fsm_next truth table") {
    // (Z', wl, bl) -> Z
    const bool table[8][4] = {
        {0, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 1}, {0, 1, 1, 0},
        {1, 0, 0, 1}, {1, 0, 1, 0}, {1, 1, 0, 1}, {1, 1, 1, 1},
    };
    for (const auto& row : table) {
        CAPTURE(row[0]);
        CAPTURE(row[1]);
        CAPTURE(row[2]);
        CHECK(fsm_next(row[0], row[1], row[2]) == row[3]);
    }
    static_assert(fsm_next(false, true, false));
    static_assert(!fsm_next(true, false, true));
}

TEST_CASE("decode by gap midpoint") {
    const EcmParams p;
    const double mid = p.gap_midpoint();
    CHECK(decode_state(CrsDeviceState::zero(p), mid) == CrsLogicState::zero);
    CHECK(decode_state(CrsDeviceState::one(p), mid) == CrsLogicState::one);
    CHECK(decode_state({{p.x_min}, {p.x_min}}, mid) == CrsLogicState::on);
    CHECK_THROWS_AS(decode_state({{p.l}, {p.l}}, mid), IndeterminateStateError);
    CHECK_FALSE(try_decode_state({{p.l}, {p.l}}, mid));
    CHECK(to_string(CrsLogicState::on) == "ON");
    CHECK(to_string(CrsLogicState::zero) == "0");
}

TEST_CASE("series solution agrees with a bisection on the middle node") {
    const EcmParams p;
    const CrsDeviceState states[] = {CrsDeviceState::zero(p), CrsDeviceState::one(p), {{p.x_min}, {p.x_min}},
                                     {{3e-9}, {12e-9}}};
    for (const auto& s : states) {
        for (double v : {-2.0, -0.7, 0.3, 1.0, 2.5}) {
            CAPTURE(v);
            // Bottom device sees u, top device sees -(v - u).
            auto mismatch = [&](double u) {
                return oracle::cell(u, s.bottom.x, p).i_total + oracle::cell(-(v - u), s.top.x, p).i_total;
            };
            const double u = v > 0 ? oracle::bisect(mismatch, 1e-12, v - 1e-12, 80)
                                   : oracle::bisect(mismatch, v + 1e-12, -1e-12, 80);
            const CrsSolution sol = solve_crs_dc(v, s, p);
            CHECK(sol.v_bottom == doctest::Approx(u).epsilon(1e-6));
            CHECK(sol.v_top == doctest::Approx(-(v - u)).epsilon(1e-6));
            CHECK(sol.current == doctest::Approx(oracle::cell(u, s.bottom.x, p).i_total).epsilon(1e-5));
            // Floor: one ulp of the node voltage across a low-resistance device.
            const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(v) / 50.0;
            CHECK(std::abs(sol.current_mismatch) <= 1e-6 * std::abs(sol.current) + floor);
        }
    }
}

TEST_CASE("both stored states are high resistive, ON is low resistive") {
    const EcmParams p;
    const double r0 = 0.5 / solve_crs_dc(0.5, CrsDeviceState::zero(p), p).current;
    const double r1 = 0.5 / solve_crs_dc(0.5, CrsDeviceState::one(p), p).current;
    const double r_on = 0.5 / solve_crs_dc(0.5, {{p.x_min}, {p.x_min}}, p).current;
    CHECK(r0 > 1e5 * r_on);
    CHECK(r1 > 1e5 * r_on);
}

TEST_CASE("full-amplitude pulses write 1 and 0") {
    const EcmParams p;
    const double mid = p.gap_midpoint();
    const auto one = drive_crs(CrsDeviceState::zero(p), 2.8, 200e-6, p);
    CHECK(decode_state(one, mid) == CrsLogicState::one);
    const auto zero = drive_crs(one, -2.8, 200e-6, p);
    CHECK(decode_state(zero, mid) == CrsLogicState::zero);
    const auto hold = drive_crs(CrsDeviceState::one(p), 2.8, 200e-6, p);
    CHECK(decode_state(hold, mid) == CrsLogicState::one);
    int calls = 0;
    drive_crs(CrsDeviceState::zero(p), 0.0, 1.0, p, {}, [&](double, const CrsDeviceState&, double i) {
        ++calls;
        CHECK(i == 0.0);
    });
    CHECK(calls == 1);
    CHECK_THROWS_AS(drive_crs(CrsDeviceState::zero(p), 1.0, 0.0, p), ArgumentError);
}

TEST_CASE("butterfly sweep thresholds") {
    const EcmParams p;
    const CrsSweep sw = sweep_iv_crs(2.0, kDefaultSweepRate, CrsDeviceState::zero(p), p);
    REQUIRE(sw.thresholds);
    const CrsThresholds& t = *sw.thresholds;
    CHECK(0.0 < t.v_th1);
    CHECK(t.v_th1 < t.v_th2);
    CHECK(t.v_th3 < 0.0);
    CHECK(t.v_th4 < t.v_th3);
    CHECK(t.on_window() > 0.0);
    CHECK(sw.samples.back().logic == CrsLogicState::zero);

    const CrsSweep small = sweep_iv_crs(0.5, kDefaultSweepRate, CrsDeviceState::zero(p), p);
    CHECK_FALSE(small.thresholds);
    CHECK_THROWS_AS(extract_crs_thresholds(small.samples), ExtractionError);
}
