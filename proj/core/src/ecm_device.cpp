#include "crsim/ecm_device.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "crsim/errors.hpp"
#include "crsim/roots.hpp"
#include "transient.hpp"

namespace crsim {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ArgumentError(std::string("EcmParams.") + name + " must be positive and finite");
    }
}

// Transfer coefficients of the two interfaces. The filament-tip interface
// uses the opposite-polarity form of the active-electrode interface.
double active_coefficient(Polarity pol, const EcmParams& p) {
    return pol == Polarity::positive ? 1.0 - p.alpha : p.alpha;
}
double tip_coefficient(Polarity pol, const EcmParams& p) {
    return pol == Polarity::positive ? p.alpha : 1.0 - p.alpha;
}

// Circuit quantities as explicit functions of eta1; the only unknown.
struct BranchEval {
    CellSolution sol;
    double dv_deta = 0.0;
    double di_deta = 0.0;
};

BranchEval evaluate_branch(double eta1, Polarity pol, double x, const EcmParams& p) {
    BranchEval b;
    CellSolution& s = b.sol;
    const double vt = p.thermal_voltage();
    const double i0 = p.exchange_current();
    const double c1 = active_coefficient(pol, p);
    const double c2 = tip_coefficient(pol, p);
    const double sign = pol == Polarity::negative ? -1.0 : 1.0;

    s.eta1 = eta1;
    s.i_ion = ionic_current(eta1, pol, p);
    const double mag = std::abs(s.i_ion);
    s.eta2 = sign * (vt / c2) * std::log1p(mag / i0);
    s.r_ion = p.ionic_resistance(x);
    s.r_fil = p.filament_resistance(x);
    s.v_tu = s.eta1 + s.i_ion * s.r_ion + s.eta2;
    const double g_tu = tunnel_conductance(x, p);
    s.i_tu = g_tu * s.v_tu;
    s.i_total = s.i_ion + s.i_tu;
    const double r_series = p.r_el + s.r_fil;
    s.v_cell = s.v_tu + s.i_total * r_series;
    s.kcl_residual = s.i_total - s.i_ion - s.i_tu;

    // derivatives with respect to eta1
    const double dion = i0 * (c1 / vt) * std::exp(c1 * std::abs(eta1) / vt);
    const double deta2 = (vt / c2) / (i0 + mag);
    const double dvtu = 1.0 + dion * (s.r_ion + deta2);
    b.di_deta = dion + g_tu * dvtu;
    b.dv_deta = dvtu + r_series * b.di_deta;
    s.conductance = b.di_deta / b.dv_deta;
    return b;
}

}  // namespace

void EcmParams::validate() const {
    require_positive(r_el, "r_el");
    require_positive(l, "l");
    require_positive(rho_m, "rho_m");
    require_positive(a_fil, "a_fil");
    require_positive(m_me, "m_me");
    require_positive(sigma_fil, "sigma_fil");
    require_positive(sigma_ion, "sigma_ion");
    require_positive(dw0, "dw0");
    require_positive(m_eff, "m_eff");
    require_positive(t, "t");
    require_positive(z, "z");
    require_positive(j0, "j0");
    require_positive(x_min, "x_min");
    require_positive(e, "e");
    require_positive(h, "h");
    require_positive(k_b, "k_b");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("EcmParams.alpha must lie in (0, 1)");
    if (!(x_min < l)) throw ArgumentError("EcmParams.x_min must be smaller than l");
}

double ionic_current(double eta1, Polarity cell_polarity, const EcmParams& p) {
    if (!std::isfinite(eta1)) throw DomainError("ionic_current: non-finite overpotential");
    const double vt = p.thermal_voltage();
    switch (cell_polarity) {
        case Polarity::positive:
            return p.exchange_current() * std::expm1((1.0 - p.alpha) * eta1 / vt);
        case Polarity::negative:
            return -p.exchange_current() * std::expm1(-p.alpha * eta1 / vt);
        case Polarity::zero:
            break;
    }
    return 0.0;
}

double tunnel_conductance(double x, const EcmParams& p) {
    if (!(x > 0.0)) throw DomainError("tunnel_current: gap must be positive");
    const double root = std::sqrt(2.0 * p.m_eff * p.dw0);
    const double eh = p.e / p.h;
    return 3.0 * root / (2.0 * x) * eh * eh *
           std::exp(-4.0 * std::numbers::pi * x / p.h * root) * p.a_fil;
}

double tunnel_current(double x, double v_tu, const EcmParams& p) {
    return tunnel_conductance(x, p) * v_tu;
}

double state_derivative(double i_ion, const EcmParams& p) {
    return -p.m_me / (p.z * p.e * p.a_fil * p.rho_m) * i_ion;
}

double clamp_gap(double x, const EcmParams& p) { return std::clamp(x, p.x_min, p.l); }

CellSolution solve_cell_dc(double v_cell, const EcmState& s, const EcmParams& p) {
    if (!std::isfinite(v_cell)) throw DomainError("solve_cell_dc: non-finite voltage");
    const double x = s.x;
    if (!(x > 0.0)) throw DomainError("solve_cell_dc: gap must be positive");
    const Polarity pol = polarity_of(v_cell);
    if (pol == Polarity::zero) {
        CellSolution zero;
        zero.r_ion = p.ionic_resistance(x);
        zero.r_fil = p.filament_resistance(x);
        zero.conductance = evaluate_branch(0.0, Polarity::positive, x, p).sol.conductance;
        return zero;
    }

    // The residual V_cell(eta1) - v_cell is strictly increasing and eta1 lies
    // between 0 and v_cell, since every other drop shares its sign.
    const double lo = std::min(0.0, v_cell);
    const double hi = std::max(0.0, v_cell);
    RootOptions opt;
    opt.f_tol = 1e-13 * std::abs(v_cell);
    opt.x_tol = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(v_cell);
    opt.max_iterations = 300;

    BranchEval last;
    auto f = [&](double eta, double& df) {
        last = evaluate_branch(eta, pol, x, p);
        df = last.dv_deta;
        return last.sol.v_cell - v_cell;
    };
    const RootResult r = solve_increasing(f, lo, hi, 0.5 * v_cell, opt, "solve_cell_dc");
    if (last.sol.eta1 != r.x) last = evaluate_branch(r.x, pol, x, p);

    CellSolution out = last.sol;
    out.kvl_residual = v_cell - out.v_cell;
    out.v_cell = v_cell;
    out.iterations = r.iterations;
    return out;
}

EcmState step_transient(const EcmState& s, double v_cell, double dt, const EcmParams& p,
                        const TransientOptions& opt) {
    if (!(dt > 0.0)) throw ArgumentError("step_transient: dt must be positive");
    if (v_cell == 0.0) return EcmState{clamp_gap(s.x, p)};
    auto rhs = [&](double, const detail::Gaps<1>& y) {
        const CellSolution sol = solve_cell_dc(v_cell, EcmState{y[0]}, p);
        detail::GapRate<1> r;
        r.dxdt[0] = state_derivative(sol.i_ion, p);
        r.current = sol.i_total;
        return r;
    };
    double hint = std::min(dt, opt.dt_max);
    const auto y = detail::integrate<1>({clamp_gap(s.x, p)}, 0.0, dt, rhs,
                                        [](double, const detail::Gaps<1>&, const auto&) {}, p,
                                        opt, hint);
    return EcmState{y[0]};
}

std::optional<double> time_to_gap(const EcmState& s0, double v_cell, double target, double t_max,
                                  const EcmParams& p) {
    const double x0 = clamp_gap(s0.x, p);
    const bool decreasing = target < x0;
    auto crossed = [&](double x) { return decreasing ? x <= target : x >= target; };
    if (crossed(x0)) return 0.0;
    if (v_cell == 0.0) return std::nullopt;

    auto rhs = [&](double, const detail::Gaps<1>& y) {
        const CellSolution sol = solve_cell_dc(v_cell, EcmState{y[0]}, p);
        detail::GapRate<1> r;
        r.dxdt[0] = state_derivative(sol.i_ion, p);
        r.current = sol.i_total;
        return r;
    };
    TransientOptions opt;
    opt.dt_max = t_max;
    double hint = t_max * 1e-9;
    // The crossing is bracketed by two accepted steps and interpolated.
    struct Found {};
    double t_prev = 0.0, x_prev = x0;
    double t_hit = -1.0;
    try {
        detail::integrate<1>(
            {x0}, 0.0, t_max, rhs,
            [&](double tn, const detail::Gaps<1>& y, const auto&) {
                if (crossed(y[0])) {
                    const double frac = (target - x_prev) / (y[0] - x_prev);
                    t_hit = t_prev + frac * (tn - t_prev);
                    throw Found{};
                }
                t_prev = tn;
                x_prev = y[0];
            },
            p, opt, hint);
    } catch (const Found&) {
        return t_hit;
    }
    return std::nullopt;
}

}  // namespace crsim
