#ifndef BBSIM_DEFAULTS_HPP
#define BBSIM_DEFAULTS_HPP

#include <array>
#include <map>
#include <vector>

#include "bbsim/calibration.hpp"
#include "bbsim/chip_twin.hpp"
#include "bbsim/controller.hpp"
#include "bbsim/margining.hpp"
#include "bbsim/model_fit.hpp"

namespace bbsim {

// ---------------------------------------------------------------------------
// Characterization tables (silicon-measured constants).
// ---------------------------------------------------------------------------

struct ModelTableRow {
    double vdd, c_corr, f0_mhz, r_square;
};

/// Single die, single temperature (25 degC), per supply.
inline constexpr std::array<ModelTableRow, 3> kSingleConditionModels{{
    {0.5, 0.47, 3.21, 0.998},
    {0.7, 0.59, 5.19, 0.998},
    {0.9, 0.60, 8.72, 0.995},
}};

/// Single die fitted across T = {-20, 25, 80} degC at 0.7 V.
inline constexpr ModelTableRow kTempSpanningModel{0.7, 0.59, 5.42, 0.996};

/// Multiple dies across corners and temperatures at 0.7 V.
inline constexpr ModelTableRow kProcessSpanningModel{0.7, 0.614, 6.86, 0.88};

/// Body-bias induced performance gain, fraction per 100 mV.
inline constexpr std::array<BbSlope, 3> kBbGainTable{{
    {0.5, 0.11},
    {0.7, 0.05},
    {0.9, 0.03},
}};

struct PolicyTableRow {
    Awareness awareness;
    double vdd, f_err, margin_mv, overhead;
};

/// Frequency error of the three models and the leakage overheads of their
/// margins, relative to ideal (margin-free) compensation.
inline constexpr std::array<PolicyTableRow, 9> kMarginPolicyTable{{
    {Awareness::ProcUnawareTempUnaware, 0.9, 0.066, 150.0, 0.33},
    {Awareness::ProcUnawareTempUnaware, 0.7, 0.097, 150.0, 0.37},
    {Awareness::ProcUnawareTempUnaware, 0.5, 0.250, 200.0, 0.66},
    {Awareness::ProcAwareTempUnaware, 0.9, 0.030, 100.0, 0.13},
    {Awareness::ProcAwareTempUnaware, 0.7, 0.040, 100.0, 0.14},
    {Awareness::ProcAwareTempUnaware, 0.5, 0.070, 100.0, 0.15},
    {Awareness::ProcAwareTempAware, 0.9, 0.020, 50.0, 0.09},
    {Awareness::ProcAwareTempAware, 0.7, 0.030, 50.0, 0.10},
    {Awareness::ProcAwareTempAware, 0.5, 0.060, 50.0, 0.12},
}};

// ---------------------------------------------------------------------------
// Calibrated twin constants.
// ---------------------------------------------------------------------------

/// Exponential VBB leakage constant, V. Least-squares fit (squared relative
/// error, 1-D grid search) of exp(margin/s)-1 against the three 0.7 V
/// margin/overhead pairs of the policy table (50 mV -> 10%, 100 mV -> 14%,
/// 150 mV -> 37%). The table rows are mutually inconsistent with a single
/// exponential; this is the compromise value.
inline constexpr double kLeakVSlopeV = 0.616613;

/// Exponential temperature leakage constant, degC: doubles leakage between
/// 25 and 80 degC at fixed VBB. Calibrated default.
inline constexpr double kLeakTSlopeC = 79.348227248893;

/// Effective switched capacitance, nF. Calibrated so regulated-vs-off total
/// power at 80 degC, 170 MHz, 0.7 V differs by 15%.
inline constexpr double kCEffNf = 0.01026986298027899;

/// Frequency gain per degC above 25, at 0.7 V: anchored so the Typical die
/// runs 175 MHz at 25 degC and exactly 170 MHz at 17 degC.
inline constexpr double kTempCoeff0v7 = 1.0 / 280.0;

/// Worst-case relative prediction error of the sensor alone (model matched,
/// fixed temperature).
inline constexpr double kSensorErrBound = 0.03;

/// Corner speed factors. The +/-6% spread is a configurable default.
inline constexpr double kFastSpeedFactor = 1.06;
inline constexpr double kSlowSpeedFactor = 0.94;

/// How strongly the ring-oscillator sensor tracks the die's process speed
/// deviation. Below 1, a fast die reads proportionally less fast on the
/// sensor than on the critical path, so each corner carries its own inverse
/// model line: that structural spread is what boot calibration removes
/// (about 5.8% process-unaware error with the defaults here).
inline constexpr double kPmbCornerSensitivity = 0.107;

inline double corner_speed_factor(ProcessCorner c) {
    switch (c) {
    case ProcessCorner::Fast: return kFastSpeedFactor;
    case ProcessCorner::Slow: return kSlowSpeedFactor;
    default: return 1.0;
    }
}

/// Sensor-to-die process ratio q: a die of speed k reads (1 + beta*(k-1)) on
/// the sensor, so its inverse-model line is the Typical one scaled by 1/q.
inline double pmb_corner_ratio(double speed_factor) {
    return (1.0 + kPmbCornerSensitivity * (speed_factor - 1.0)) / speed_factor;
}

/// Default die of the given corner. 0.7 V carries the silicon anchors
/// (175 MHz base, 5%/100 mV, single-condition model line); the 0.5/0.9 V
/// frequency, temperature and leakage parameters are calibrated defaults.
inline ChipTwin default_twin(ProcessCorner corner = ProcessCorner::Typical) {
    ChipTwin t;
    t.corner = corner;
    t.speed_factor = corner_speed_factor(corner);
    t.leak_v_slope_v = kLeakVSlopeV;
    t.leak_t_slope_c = kLeakTSlopeC;
    t.c_eff_nf = kCEffNf;
    t.pmb_err_bound = kSensorErrBound;

    const double q = pmb_corner_ratio(t.speed_factor);
    const std::array<double, 3> f_base{55.0, 175.0, 330.0};
    const std::array<double, 3> temp_coeff{0.006, kTempCoeff0v7, 0.0015};
    const std::array<double, 3> leak_i0{120.0, 500.0, 1500.0};
    for (int i = 0; i < 3; ++i) {
        const ModelTableRow& row = kSingleConditionModels[i];
        t.per_vdd[i] = VddParams{
            row.vdd,          f_base[i],          kBbGainTable[i].gain_per_100mv,
            temp_coeff[i],    leak_i0[i],         row.c_corr / q,
            row.f0_mhz / q,
        };
    }
    return t;
}

inline BbSlope default_slope(double vdd) {
    for (const BbSlope& s : kBbGainTable)
        if (std::abs(s.vdd - vdd) < 1e-9) return s;
    throw std::domain_error("no body-bias gain characterized at " +
                            std::to_string(vdd) + " V");
}

inline MarginPolicy default_policy() {
    MarginPolicy p;
    for (const PolicyTableRow& r : kMarginPolicyTable)
        p.set(r.awareness, r.vdd, {r.f_err, r.margin_mv / 1000.0, r.overhead});
    return p;
}

/// Exact inverse-model line of each default die: the factory pre-characterized
/// per-corner references used by corner classification.
inline std::map<ProcessCorner, LinearPmbModel> reference_models(double vdd) {
    std::map<ProcessCorner, LinearPmbModel> refs;
    for (ProcessCorner c : {ProcessCorner::Fast, ProcessCorner::Typical,
                            ProcessCorner::Slow}) {
        const ChipTwin t = default_twin(c);
        const VddParams& p = t.params(vdd);
        refs[c] = LinearPmbModel{p.pmb_c_corr, p.pmb_f0_mhz, 1.0, 0.0,
                                 Awareness::ProcAwareTempUnaware, vdd};
    }
    return refs;
}

/// Noiseless sweep of one die over the characterization grid: the three
/// temperatures and the full body-bias range in 50 mV steps.
inline std::vector<CalibrationSample> characterization_sweep(const ChipTwin& twin,
                                                             double vdd) {
    std::vector<CalibrationSample> samples;
    ChipTwin quiet = twin;
    quiet.pmb_err_bound = 0.0;
    const int n = static_cast<int>(std::lround((vbb_env_max(vdd) - kVbbEnvMinV) / 0.05));
    for (double temp : {-20.0, 25.0, 80.0}) {
        for (int k = 0; k <= n; ++k) {
            const ChipEnvironment env{{vdd, temp}, kVbbEnvMinV + 0.05 * k};
            samples.push_back({to_string(twin.corner), env.op, env.vbb,
                               pmb_read_mhz(quiet, env, 0),
                               fmax_true(quiet, env)});
        }
    }
    return samples;
}

/// The know-nothing model: pooled fit over the whole default corner family
/// across temperatures. This is what a controller uses before calibration.
inline LinearPmbModel process_unaware_model(double vdd) {
    std::vector<CalibrationSample> pool;
    for (ProcessCorner c : {ProcessCorner::Fast, ProcessCorner::Typical,
                            ProcessCorner::Slow}) {
        auto part = characterization_sweep(default_twin(c), vdd);
        pool.insert(pool.end(), part.begin(), part.end());
    }
    return fit_linear(pool, Awareness::ProcUnawareTempUnaware);
}

/// Grid-search tuned (tools/pid_tuner): fastest settling with zero
/// steady-state undershoot and full convergence across the
/// set-point/temperature/noise battery. The voltage conversion already
/// inverts the plant, so the loop is mostly proportional and damped; the
/// small integral and derivative terms settle the noisy quantized plant.
inline PidGains default_gains() { return PidGains{0.6, 0.05, 0.05, 50.0}; }

inline CalibrationPlan default_plan() { return CalibrationPlan{}; }

/// Regulation setup for a die whose model line is known (e.g. after boot
/// calibration), with the policy margin for the given awareness level.
inline RegulationConfig default_regulation(const LinearPmbModel& model,
                                           Awareness awareness,
                                           const MarginPolicy& policy) {
    RegulationConfig cfg;
    cfg.model = model;
    cfg.model.awareness = awareness;
    cfg.slope = default_slope(model.vdd);
    cfg.margin_v = policy.lookup(awareness, model.vdd).vbb_margin_v;
    cfg.gains = default_gains();
    return cfg;
}

} // namespace bbsim

#endif
