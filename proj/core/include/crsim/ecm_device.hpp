#pragma once

// Compact model of an electrochemical metallization (ECM) ReRAM cell.
//
// The equivalent circuit is an ionic branch (active-electrode overpotential
// eta1, ohmic ion drift R_ion, filament-tip overpotential eta2) in parallel
// with an electronic tunneling branch across the gap x; that block is in
// series with the filament and electrode resistances. The gap x evolves by
// Faraday's law driven by the ionic current.

#include <optional>
#include <vector>

namespace crsim {

/// Model parameters in SI units (mass in grams, as the material data is
/// quoted). Defaults reproduce the reference ECM parameter set.
struct EcmParams {
    double r_el = 70e-3;              ///< electrode series resistance [Ohm]
    double l = 20e-9;                 ///< switching-layer thickness [m]
    double rho_m = 8.95e6;            ///< metal mass density [g/m^3]
    double a_fil = 135.87e-18;        ///< filament cross-section [m^2]
    double m_me = 1.06e-22;           ///< molecular mass [g]
    double sigma_fil = 5e7;           ///< filament/electrode conductivity [S/m]
    double sigma_ion = 1e2;           ///< ionic conductivity [S/m]
    double dw0 = 3.6 * 1.602176634e-19;  ///< tunneling barrier height [J]
    double m_eff = 0.86 * 9.1e-31;    ///< effective tunneling mass [kg]
    double t = 300.0;                 ///< temperature [K]
    double alpha = 0.5;               ///< charge-transfer coefficient
    double z = 1.0;                   ///< cation charge number
    double j0 = 0.01;                 ///< exchange current density [A/m^2]
    double x_min = 0.1e-9;            ///< lower gap clamp [m]

    double e = 1.602176634e-19;       ///< elementary charge [C]
    double h = 6.62607015e-34;        ///< Planck constant [J s]
    double k_b = 1.380649e-23;        ///< Boltzmann constant [J/K]

    /// Throws ArgumentError when a field is non-positive, alpha is outside
    /// (0, 1) or x_min >= l.
    void validate() const;

    /// k_B T / (z e) [V].
    double thermal_voltage() const { return k_b * t / (z * e); }
    /// j0 * A_fil, the exchange current of one interface [A].
    double exchange_current() const { return j0 * a_fil; }
    double ionic_resistance(double x) const { return x / (sigma_ion * a_fil); }
    double filament_resistance(double x) const { return (l - x) / (sigma_fil * a_fil); }
    /// Default LRS/HRS classification threshold, the gap midpoint.
    double gap_midpoint() const { return 0.5 * (x_min + l); }
};

struct EcmState {
    double x = 0.0;  ///< tunneling gap [m]
};

enum class Polarity { negative = -1, zero = 0, positive = 1 };

constexpr Polarity polarity_of(double v) noexcept {
    return v > 0.0 ? Polarity::positive : (v < 0.0 ? Polarity::negative : Polarity::zero);
}

/// Self-consistent DC operating point of one cell at fixed gap.
struct CellSolution {
    double v_cell = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double v_tu = 0.0;
    double i_ion = 0.0;
    double i_tu = 0.0;
    double i_total = 0.0;
    double r_ion = 0.0;
    double r_fil = 0.0;
    double conductance = 0.0;   ///< small-signal dI_total/dV_cell [S]
    double kcl_residual = 0.0;  ///< I_total - I_ion - I_Tu at the filament tip [A]
    double kvl_residual = 0.0;  ///< V_cell - (V_Tu + I_total (R_el + R_fil)) [V]
    int iterations = 0;
};

/// Tafel current at the active electrode for overpotential `eta1`.
/// Positive polarity: j0 A (exp((1-a) z e eta / kT) - 1);
/// negative polarity: j0 A (1 - exp(-a z e eta / kT)); zero polarity: 0.
double ionic_current(double eta1, Polarity cell_polarity, const EcmParams& p);

/// Tunneling conductance of a gap `x`, so that I_Tu = G(x) * V_Tu.
double tunnel_conductance(double x, const EcmParams& p);

/// Electronic tunneling current through gap `x` at voltage `v_tu`.
double tunnel_current(double x, double v_tu, const EcmParams& p);

/// Gap velocity dx/dt for ionic current `i_ion` (Faraday's law).
double state_derivative(double i_ion, const EcmParams& p);

/// Solves the equivalent circuit at applied voltage `v_cell` and gap `s.x`.
/// Throws ConvergenceError if the scalar solve on eta1 does not converge.
CellSolution solve_cell_dc(double v_cell, const EcmState& s, const EcmParams& p);

/// Clamps a gap into [x_min, l].
double clamp_gap(double x, const EcmParams& p);

/// Integration controls shared by the unit-cell and CRS transients.
struct TransientOptions {
    double dt_max = 1e-6;             ///< upper bound on one implicit step [s]
    double dt_min = 1e-18;            ///< halving floor before giving up [s]
    double max_gap_step = 0.05e-9;    ///< reject steps moving any gap further [m]
    int newton_iterations = 40;
};

/// Advances the gap by `dt` under constant `v_cell` with adaptive implicit
/// Euler substeps. The result is clamped to [x_min, l].
EcmState step_transient(const EcmState& s, double v_cell, double dt, const EcmParams& p,
                        const TransientOptions& opt = {});

/// Time for the gap to cross `target` under constant `v_cell`, or nullopt if
/// it does not within `t_max`.
std::optional<double> time_to_gap(const EcmState& s0, double v_cell, double target,
                                  double t_max, const EcmParams& p);

struct UnitSample {
    double t = 0.0;
    double v = 0.0;
    double i = 0.0;
    double x = 0.0;
};

struct UnitLandmarks {
    std::optional<double> v_set;
    std::optional<double> v_reset;
};

struct SweepOptions {
    int samples = 4000;               ///< output samples over the full triangle
    double current_fraction = 0.5;    ///< switching-current fraction for thresholds
};

/// Triangular sweep 0 -> +amp -> -amp -> 0 at constant |dV/dt| = rate.
std::vector<UnitSample> sweep_iv_unit(double amplitude, double rate, const EcmState& s0,
                                      const EcmParams& p, const SweepOptions& opt = {});

/// SET: first voltage on the positive half where |I| rises through
/// `fraction` of the positive-half peak, reported only if the gap crossed
/// into LRS there. RESET: voltage of the negative-half current extremum,
/// reported only if the gap crossed back into HRS.
UnitLandmarks extract_unit_landmarks(const std::vector<UnitSample>& curve, const EcmParams& p,
                                     double fraction = 0.5);

/// Default sweep rate used for I-V characteristics [V/s].
inline constexpr double kDefaultSweepRate = 1.0;

}  // namespace crsim
