#pragma once

// Carry and sum of a full adder expressed as CRS state transitions. The
// stored state plays the role of the carry c_i; a_i and b_i arrive on the
// word- and bitline.

#include "crsim/crs_cell.hpp"

namespace crsim {

struct BitTriple {
    bool a = false;
    bool b = false;
    bool c = false;
};

/// Prior state and line signals of one fsm_next application.
struct FsmInputs {
    bool z_prev = false;
    bool wl = false;
    bool bl = false;

    constexpr bool apply() const noexcept { return fsm_next(z_prev, wl, bl); }
};

constexpr FsmInputs carry_inputs(bool a, bool b, bool c) noexcept { return {c, a, !b}; }
constexpr FsmInputs sum_intermediate_inputs(bool a, bool b, bool c) noexcept { return {c, a, b}; }
constexpr FsmInputs sum_final_inputs(bool s_prime, bool b, bool c_next) noexcept {
    return {s_prime, b, c_next};
}

/// c_{i+1} in a single step: a_i on the wordline, !b_i on the bitline.
constexpr bool carry_next(bool a, bool b, bool c) noexcept { return carry_inputs(a, b, c).apply(); }

/// Majority function ab + ac + bc.
constexpr bool carry_oracle(bool a, bool b, bool c) noexcept {
    return (a && b) || (a && c) || (b && c);
}

/// s'_i: a_i on the wordline, b_i on the bitline.
constexpr bool sum_intermediate(bool a, bool b, bool c) noexcept {
    return sum_intermediate_inputs(a, b, c).apply();
}

/// s_i: b_i on the wordline, c_{i+1} on the bitline, starting from s'_i.
constexpr bool sum_final(bool s_prime, bool b, bool c_next) noexcept {
    return sum_final_inputs(s_prime, b, c_next).apply();
}

constexpr bool full_sum(const BitTriple& t) noexcept {
    return sum_final(sum_intermediate(t.a, t.b, t.c), t.b, carry_next(t.a, t.b, t.c));
}

}  // namespace crsim
