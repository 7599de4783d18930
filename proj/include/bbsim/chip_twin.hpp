#ifndef BBSIM_CHIP_TWIN_HPP
#define BBSIM_CHIP_TWIN_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "bbsim/rng.hpp"

namespace bbsim {

/// Die-to-die manufacturing speed class.
enum class ProcessCorner { Fast, Typical, Slow };

inline const char* to_string(ProcessCorner c) {
    switch (c) {
    case ProcessCorner::Fast: return "fast";
    case ProcessCorner::Typical: return "typical";
    case ProcessCorner::Slow: return "slow";
    }
    return "?";
}

inline ProcessCorner corner_from_string(const std::string& s) {
    if (s == "fast") return ProcessCorner::Fast;
    if (s == "typical") return ProcessCorner::Typical;
    if (s == "slow") return ProcessCorner::Slow;
    throw std::domain_error("unknown process corner '" + s +
                            "' (expected fast|typical|slow)");
}

/// Supply voltage and package temperature. Supply is restricted to the three
/// characterized corners; temperature to the characterized range.
struct OperatingPoint {
    double vdd;    ///< V, one of {0.5, 0.7, 0.9}
    double temp_c; ///< degC, within [-20, 80]
};

/// Operating point plus the currently applied body-bias voltage.
struct ChipEnvironment {
    OperatingPoint op;
    double vbb; ///< V, within [-1.0, vdd/2 + 0.3]
};

inline constexpr double kTempMinC = -20.0;
inline constexpr double kTempMaxC = 80.0;
inline constexpr double kVbbEnvMinV = -1.0; ///< deepest RBB exercised on silicon

/// FBB ceiling tracks the supply: vdd/2 + 300 mV.
inline double vbb_env_max(double vdd) { return vdd / 2.0 + 0.3; }

/// Time to read the on-chip frequency sensor once; charged to the simulated
/// clock by whoever issues the read (the twin itself keeps no clock).
inline constexpr double kPmbReadLatencyS = 0.004;

/// Per-supply physical parameters of one die.
struct VddParams {
    double vdd;              ///< V
    double f_base_mhz;       ///< true Fmax at VBB=0, 25 degC, Typical speed
    double bb_gain;          ///< frequency gain per 100 mV of FBB (fraction)
    double temp_coeff;       ///< frequency gain per degC above 25 (fraction)
    double leak_i0_ua;       ///< uA at VBB=0, 25 degC
    double pmb_c_corr;       ///< sensor inverse-model slope
    double pmb_f0_mhz;       ///< sensor inverse-model intercept
};

/// Ground-truth physical model of one die. All surfaces are deterministic
/// functions of (vdd, T, vbb); the only stochastic element is the bounded
/// sensor error, driven by an explicit seed.
struct ChipTwin {
    ProcessCorner corner = ProcessCorner::Typical;
    double speed_factor = 1.0;    ///< multiplier on f_base; 1.0 for Typical
    double leak_v_slope_v = 0.0;  ///< exponential VBB constant, V
    double leak_t_slope_c = 0.0;  ///< exponential temperature constant, degC
    double c_eff_nf = 0.0;        ///< effective switched capacitance, nF
    double pmb_err_bound = 0.0;   ///< max relative sensor-induced prediction error
    std::array<VddParams, 3> per_vdd{}; // ordered 0.5, 0.7, 0.9

    const VddParams& params(double vdd) const {
        for (const auto& p : per_vdd)
            if (std::abs(p.vdd - vdd) < 1e-9) return p;
        throw std::domain_error("vdd " + std::to_string(vdd) +
                                " V outside the characterized set {0.5, 0.7, 0.9}");
    }
};

inline void validate_op(const ChipTwin& twin, const OperatingPoint& op) {
    twin.params(op.vdd); // throws on unknown supply
    if (!(op.temp_c >= kTempMinC && op.temp_c <= kTempMaxC))
        throw std::domain_error("temperature " + std::to_string(op.temp_c) +
                                " degC outside characterized range [-20, 80]");
}

inline void validate_env(const ChipTwin& twin, const ChipEnvironment& env) {
    validate_op(twin, env.op);
    const double hi = vbb_env_max(env.op.vdd);
    if (!(env.vbb >= kVbbEnvMinV - 1e-12 && env.vbb <= hi + 1e-12))
        throw std::domain_error("vbb " + std::to_string(env.vbb) +
                                " V outside [-1.0, vdd/2 + 0.3] = [-1.0, " +
                                std::to_string(hi) + "]");
}

/// True maximum frequency of the die, MHz. Multiplicative in the corner
/// speed factor, the temperature-inversion term and the body-bias term;
/// strictly increasing in both T and vbb.
inline double fmax_true(const ChipTwin& twin, const ChipEnvironment& env) {
    validate_env(twin, env);
    const VddParams& p = twin.params(env.op.vdd);
    return p.f_base_mhz * twin.speed_factor *
           (1.0 + p.temp_coeff * (env.op.temp_c - 25.0)) *
           (1.0 + p.bb_gain * (env.vbb / 0.1));
}

/// Leakage current, uA: i0 * exp(vbb/v_slope) * exp((T-25)/t_slope).
inline double leakage_ua(const ChipTwin& twin, const ChipEnvironment& env) {
    validate_env(twin, env);
    const VddParams& p = twin.params(env.op.vdd);
    return p.leak_i0_ua * std::exp(env.vbb / twin.leak_v_slope_v) *
           std::exp((env.op.temp_c - 25.0) / twin.leak_t_slope_c);
}

/// Active dynamic power, mW: c_eff * vdd^2 * f (nF * V^2 * MHz = mW).
inline double dynamic_power_mw(const ChipTwin& twin, const OperatingPoint& op,
                               double freq_mhz) {
    validate_op(twin, op);
    if (freq_mhz < 0.0)
        throw std::domain_error("negative clock frequency " +
                                std::to_string(freq_mhz) + " MHz");
    return twin.c_eff_nf * op.vdd * op.vdd * freq_mhz;
}

/// Total power, mW: dynamic plus leakage current times supply.
inline double total_power_mw(const ChipTwin& twin, const ChipEnvironment& env,
                             double freq_mhz) {
    return dynamic_power_mw(twin, env.op, freq_mhz) +
           leakage_ua(twin, env) * env.op.vdd / 1000.0;
}

/// Largest (fmax - f0)/fmax over the valid environment space of this die at
/// `vdd`; both factors peak at max temperature and max FBB. Used to map the
/// sensor error bound onto a worst-case prediction error.
inline double pmb_noise_scale(const ChipTwin& twin, double vdd) {
    const VddParams& p = twin.params(vdd);
    ChipEnvironment top{{vdd, kTempMaxC}, vbb_env_max(vdd)};
    const double f_top = fmax_true(twin, top);
    return 1.0 / (1.0 - p.pmb_f0_mhz / f_top);
}

/// Raw sensor reading, MHz: the exact inverse of the die's linear model with
/// a bounded uniform relative error. Deterministic for a fixed seed. The
/// error bound is scaled so that the worst-case relative error of the
/// *prediction* (after mapping the reading back through the model) equals
/// pmb_err_bound over the whole valid environment space.
inline double pmb_read_mhz(const ChipTwin& twin, const ChipEnvironment& env,
                           std::uint64_t rng_seed) {
    const double f_true = fmax_true(twin, env);
    const VddParams& p = twin.params(env.op.vdd);
    const double ideal = (f_true - p.pmb_f0_mhz) / p.pmb_c_corr;
    if (twin.pmb_err_bound == 0.0) return ideal;
    Rng rng(rng_seed);
    const double eps = twin.pmb_err_bound * pmb_noise_scale(twin, env.op.vdd) *
                       rng.uniform_pm1();
    return ideal * (1.0 + eps);
}

} // namespace bbsim

#endif
