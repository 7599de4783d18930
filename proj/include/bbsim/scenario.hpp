#ifndef BBSIM_SCENARIO_HPP
#define BBSIM_SCENARIO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bbsim/controller.hpp"

namespace bbsim {

/// Piecewise-linear package temperature enforced from outside (the twin has
/// no thermal feedback). Clamps before the first and after the last point.
struct TemperatureProfile {
    std::vector<std::pair<double, double>> points; ///< (t_s, temp_c)

    void validate() const {
        if (points.empty())
            throw std::domain_error("temperature profile has no breakpoints");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i > 0 && points[i].first <= points[i - 1].first)
                throw std::domain_error("temperature profile times must strictly increase");
            if (points[i].second < kTempMinC || points[i].second > kTempMaxC)
                throw std::domain_error("profile temperature " +
                                        std::to_string(points[i].second) +
                                        " degC outside [-20, 80]");
        }
    }

    double at(double t_s) const {
        if (t_s <= points.front().first) return points.front().second;
        if (t_s >= points.back().first) return points.back().second;
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (t_s <= points[i].first) {
                const auto& [t0, y0] = points[i - 1];
                const auto& [t1, y1] = points[i];
                return y0 + (y1 - y0) * (t_s - t0) / (t1 - t0);
            }
        }
        return points.back().second;
    }

    double end_time() const { return points.back().first; }
};

/// Step schedule of frequency set-points.
struct SetpointSchedule {
    std::vector<std::pair<double, double>> points; ///< (t_s, f_target_mhz)

    void validate() const {
        if (points.empty())
            throw std::domain_error("set-point schedule is empty");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i > 0 && points[i].first <= points[i - 1].first)
                throw std::domain_error("schedule times must strictly increase");
            if (points[i].second <= 0.0)
                throw std::domain_error("schedule target " +
                                        std::to_string(points[i].second) +
                                        " MHz must be positive");
        }
    }

    double at(double t_s) const {
        double v = points.front().second;
        for (const auto& [t, f] : points)
            if (t <= t_s + 1e-12) v = f;
        return v;
    }

    double end_time() const { return points.back().first; }
};

enum class ControlMode { Policy, Off, Ideal };

inline const char* to_string(ControlMode m) {
    switch (m) {
    case ControlMode::Policy: return "policy";
    case ControlMode::Off: return "off";
    case ControlMode::Ideal: return "ideal";
    }
    return "?";
}

inline ControlMode control_mode_from_string(const std::string& s) {
    if (s == "policy") return ControlMode::Policy;
    if (s == "off") return ControlMode::Off;
    if (s == "ideal") return ControlMode::Ideal;
    throw std::domain_error("unknown control mode '" + s + "' (policy|off|ideal)");
}

struct ScenarioConfig {
    RegulationConfig reg;
    ControlMode mode = ControlMode::Policy;
    double tick_s = 0.1;
    double duration_s = 0.0; ///< 0 = run to the last profile/schedule breakpoint
};

struct TraceRow {
    double t_s, temp_c, f_target_mhz, vbb_v, f_pmb_mhz, f_pred_mhz, f_true_mhz;
    double i_lkg_ua, p_dyn_mw, p_tot_mw;
    std::string event;
};

/// Energy accounting over one run, mJ. `total_mj` is accumulated as its own
/// running sum so ledger closure (total = sum of parts) is a real check.
struct EnergyLedger {
    double dynamic_mj = 0.0;
    double leakage_mj = 0.0;
    double gen_idle_mj = 0.0;
    double gen_transition_mj = 0.0;
    double total_mj = 0.0;
};

struct ScenarioSummary {
    double duration_s = 0.0;
    EnergyLedger energy;
    double mean_chip_power_mw = 0.0;
    double leakage_energy_fraction = 0.0;
    int regulation_events = 0;
    int converged_events = 0;
    int unconverged_events = 0;
    bool sustained_nonconvergence = false;
    double min_fmax_margin_mhz = 0.0; ///< min over ticks of f_true - f_target
    double controller_busy_s = 0.0;   ///< summed regulation-event time
};

struct ScenarioResult {
    std::vector<TraceRow> trace;
    ScenarioSummary summary;
};

/// Exact body bias solving fmax_true = f_target at temperature T, clamped to
/// the valid range: the margin-free "ideally compensated" reference.
inline double ideal_vbb(const ChipTwin& twin, const OperatingPoint& op,
                        double f_target_mhz, const BbSlope& slope) {
    const double base = fmax_true(twin, {op, 0.0});
    const double v = (f_target_mhz / base - 1.0) / slope.gain_per_100mv * 0.1;
    return std::clamp(v, kVbbEnvMinV, vbb_env_max(op.vdd));
}

/// Time-stepped run: temperature follows the profile, set-point changes reset
/// the controller, regulation events fire at the configured cadence (0.5 Hz
/// default), every tick is recorded. Controller-off pins VBB at 0; ideal mode
/// applies the exact unquantized, unmargined voltage each tick.
inline ScenarioResult run_scenario(const ChipTwin& twin, const ScenarioConfig& cfg,
                                   const TemperatureProfile& profile,
                                   const SetpointSchedule& schedule,
                                   std::uint64_t seed) {
    profile.validate();
    schedule.validate();
    if (cfg.tick_s <= 0.0)
        throw std::domain_error("tick must be positive");
    const double duration =
        cfg.duration_s > 0.0 ? cfg.duration_s
                             : std::max(profile.end_time(), schedule.end_time());
    if (duration <= 0.0)
        throw std::domain_error("scenario duration must be positive");

    const double vdd = cfg.reg.model.vdd;
    const long n_ticks = std::lround(duration / cfg.tick_s);
    const long period_ticks =
        std::max<long>(1, std::lround(cfg.reg.regulation_period_s / cfg.tick_s));

    ScenarioResult res;
    res.trace.reserve(n_ticks + 1);
    ScenarioSummary& sum = res.summary;
    sum.duration_s = n_ticks * cfg.tick_s;
    sum.min_fmax_margin_mhz = std::numeric_limits<double>::infinity();

    BbGenState gen{vdd};
    ControllerState ctl;
    RegulationConfig reg = cfg.reg;
    double current_target = -1.0;
    double ideal_vbb_now = 0.0;
    std::uint64_t event_index = 0;
    double prev_trans_energy_nj = 0.0;

    for (long k = 0; k <= n_ticks; ++k) {
        const double t = k * cfg.tick_s;
        const OperatingPoint op{vdd, profile.at(t)};
        const double target = schedule.at(t);
        std::string event;

        const bool setpoint_changed = target != current_target;
        current_target = target;
        reg.f_target_mhz = target;

        switch (cfg.mode) {
        case ControlMode::Policy: {
            const bool periodic = (k % period_ticks) == 0;
            if (setpoint_changed || periodic) {
                if (setpoint_changed) {
                    on_new_setpoint(ctl, gen);
                    event = "reset;";
                }
                const RegulationOutcome o = regulate_once(
                    reg, ctl, gen, twin, op, derive_seed(seed, 2, event_index++));
                sum.regulation_events += 1;
                sum.controller_busy_s += o.elapsed_s;
                if (o.converged) {
                    sum.converged_events += 1;
                } else {
                    sum.unconverged_events += 1;
                    sum.sustained_nonconvergence = true;
                }
                event += "regulate:" + std::to_string(o.iterations) +
                         (o.converged ? ":converged" : ":unconverged");
            }
            break;
        }
        case ControlMode::Ideal:
            ideal_vbb_now = ideal_vbb(twin, op, target, cfg.reg.slope);
            if (fmax_true(twin, {op, ideal_vbb_now}) < target - 1e-9)
                sum.sustained_nonconvergence = true; // unreachable even at full FBB
            break;
        case ControlMode::Off:
            break;
        }

        const double vbb_now = cfg.mode == ControlMode::Policy ? gen.applied_vbb
                               : cfg.mode == ControlMode::Ideal ? ideal_vbb_now
                                                                : 0.0;
        const ChipEnvironment env{op, vbb_now};
        TraceRow row;
        row.t_s = t;
        row.temp_c = op.temp_c;
        row.f_target_mhz = target;
        row.vbb_v = vbb_now;
        row.f_true_mhz = fmax_true(twin, env);
        row.f_pmb_mhz = pmb_read_mhz(twin, env, derive_seed(seed, 1, k));
        row.f_pred_mhz = predict_fmax(cfg.reg.model, row.f_pmb_mhz);
        row.i_lkg_ua = leakage_ua(twin, env);
        row.p_dyn_mw = dynamic_power_mw(twin, op, target);
        row.p_tot_mw = row.p_dyn_mw + row.i_lkg_ua * vdd / 1000.0;
        row.event = event;
        sum.min_fmax_margin_mhz =
            std::min(sum.min_fmax_margin_mhz, row.f_true_mhz - target);

        // Piecewise-constant integration over [t, t+tick), plus generator
        // transition lumps charged in the tick they occur.
        const double d_trans_mj =
            (gen.cum_transition_energy_nj - prev_trans_energy_nj) * 1e-6;
        prev_trans_energy_nj = gen.cum_transition_energy_nj;
        sum.energy.gen_transition_mj += d_trans_mj;
        sum.energy.total_mj += d_trans_mj;
        if (k < n_ticks) {
            const double e_dyn = row.p_dyn_mw * cfg.tick_s;
            const double e_lkg = row.i_lkg_ua * vdd / 1000.0 * cfg.tick_s;
            const double e_idle = gen.cfg.idle_power_uw / 1000.0 * cfg.tick_s;
            sum.energy.dynamic_mj += e_dyn;
            sum.energy.leakage_mj += e_lkg;
            sum.energy.gen_idle_mj += e_idle;
            sum.energy.total_mj += e_dyn + e_lkg + e_idle;
        }
        res.trace.push_back(std::move(row));
    }

    const double chip_energy = sum.energy.dynamic_mj + sum.energy.leakage_mj;
    sum.mean_chip_power_mw = chip_energy / sum.duration_s;
    sum.leakage_energy_fraction =
        chip_energy > 0.0 ? sum.energy.leakage_mj / chip_energy : 0.0;
    return res;
}

struct EnergyReport {
    double duration_s = 0.0;
    double energy_mj = 0.0;
    double mean_power_mw = 0.0;
    double leakage_fraction = 0.0;
};

/// Integrate chip power over a recorded trace.
inline EnergyReport energy_report(const std::vector<TraceRow>& trace) {
    if (trace.size() < 2)
        throw std::domain_error("trace too short to integrate (need at least 2 rows)");
    EnergyReport rep;
    double e_lkg = 0.0;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        const double dt = trace[i + 1].t_s - trace[i].t_s;
        if (dt <= 0.0)
            throw std::domain_error("trace times must strictly increase");
        rep.energy_mj += trace[i].p_tot_mw * dt;
        e_lkg += (trace[i].p_tot_mw - trace[i].p_dyn_mw) * dt;
    }
    rep.duration_s = trace.back().t_s - trace.front().t_s;
    rep.mean_power_mw = rep.energy_mj / rep.duration_s;
    rep.leakage_fraction = rep.energy_mj > 0.0 ? e_lkg / rep.energy_mj : 0.0;
    return rep;
}

struct EnergyComparison {
    EnergyReport baseline;
    EnergyReport candidate;
    double improvement_pct = 0.0; ///< (baseline - candidate)/baseline * 100
};

/// Compare two equally long traces (baseline first).
inline EnergyComparison energy_report(const std::vector<TraceRow>& baseline,
                                      const std::vector<TraceRow>& candidate) {
    EnergyComparison cmp;
    cmp.baseline = energy_report(baseline);
    cmp.candidate = energy_report(candidate);
    if (std::abs(cmp.baseline.duration_s - cmp.candidate.duration_s) > 1e-9)
        throw std::domain_error("compared traces cover different durations (" +
                                std::to_string(cmp.baseline.duration_s) + " s vs " +
                                std::to_string(cmp.candidate.duration_s) + " s)");
    cmp.improvement_pct = (cmp.baseline.mean_power_mw - cmp.candidate.mean_power_mw) /
                          cmp.baseline.mean_power_mw * 100.0;
    return cmp;
}

} // namespace bbsim

#endif
