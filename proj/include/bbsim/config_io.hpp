#ifndef BBSIM_CONFIG_IO_HPP
#define BBSIM_CONFIG_IO_HPP

#include <cmath>
#include <string>

#include "bbsim/calibration.hpp"
#include "bbsim/config.hpp"
#include "bbsim/controller.hpp"
#include "bbsim/defaults.hpp"
#include "bbsim/scenario.hpp"

namespace bbsim {

inline std::string vdd_tag(double vdd) {
    const int mv = static_cast<int>(std::lround(vdd * 1000.0));
    return std::to_string(mv / 1000) + "v" + std::to_string((mv % 1000) / 100);
}

// --- twin ---------------------------------------------------------------

inline Config twin_to_config(const ChipTwin& t) {
    Config c;
    c.set("corner", to_string(t.corner));
    c.set_double("speed_factor", t.speed_factor,
                 "die speed multiplier; +/-6% corner spread is a calibrated default");
    c.set_double("leak_v_slope_v", t.leak_v_slope_v,
                 "exponential VBB leakage constant; least-squares fit to the "
                 "0.7 V margin/overhead characterization rows");
    c.set_double("leak_t_slope_c", t.leak_t_slope_c,
                 "calibrated default: doubles leakage from 25 to 80 degC");
    c.set_double("c_eff_nf", t.c_eff_nf,
                 "calibrated default: 15% on/off total-power gap at 80 degC, "
                 "170 MHz, 0.7 V");
    c.set_double("pmb_err_bound", t.pmb_err_bound,
                 "worst-case relative sensor-induced prediction error");
    for (const VddParams& p : t.per_vdd) {
        const std::string s = "_" + vdd_tag(p.vdd);
        const bool anchored = std::abs(p.vdd - 0.7) < 1e-9;
        c.set_double("f_base_mhz" + s, p.f_base_mhz,
                     anchored ? "silicon anchor: 175 MHz at 25 degC, VBB=0"
                              : "non-silicon calibrated default");
        c.set_double("bb_gain_per_100mv" + s, p.bb_gain);
        c.set_double("temp_coeff_per_c" + s, p.temp_coeff,
                     anchored ? "anchored: exactly 170 MHz at 17 degC"
                              : "non-silicon calibrated default");
        c.set_double("leak_i0_ua" + s, p.leak_i0_ua,
                     anchored ? "" : "non-silicon calibrated default");
        c.set_double("pmb_c_corr" + s, p.pmb_c_corr);
        c.set_double("pmb_f0_mhz" + s, p.pmb_f0_mhz);
    }
    return c;
}

inline ChipTwin twin_from_config(const Config& c) {
    ChipTwin t = default_twin(corner_from_string(c.get_string("corner")));
    t.speed_factor = c.get_double_or("speed_factor", t.speed_factor);
    t.leak_v_slope_v = c.get_double_or("leak_v_slope_v", t.leak_v_slope_v);
    t.leak_t_slope_c = c.get_double_or("leak_t_slope_c", t.leak_t_slope_c);
    t.c_eff_nf = c.get_double_or("c_eff_nf", t.c_eff_nf);
    t.pmb_err_bound = c.get_double_or("pmb_err_bound", t.pmb_err_bound);
    for (VddParams& p : t.per_vdd) {
        const std::string s = "_" + vdd_tag(p.vdd);
        p.f_base_mhz = c.get_double_or("f_base_mhz" + s, p.f_base_mhz);
        p.bb_gain = c.get_double_or("bb_gain_per_100mv" + s, p.bb_gain);
        p.temp_coeff = c.get_double_or("temp_coeff_per_c" + s, p.temp_coeff);
        p.leak_i0_ua = c.get_double_or("leak_i0_ua" + s, p.leak_i0_ua);
        p.pmb_c_corr = c.get_double_or("pmb_c_corr" + s, p.pmb_c_corr);
        p.pmb_f0_mhz = c.get_double_or("pmb_f0_mhz" + s, p.pmb_f0_mhz);
    }
    return t;
}

// --- fitted model ---------------------------------------------------------

inline Config model_to_config(const LinearPmbModel& m) {
    Config c;
    c.set_double("c_corr", m.c_corr);
    c.set_double("f0_mhz", m.f0_mhz);
    c.set_double("r_square", m.r_square);
    c.set_double("max_rel_error", m.max_rel_error);
    c.set("awareness", to_string(m.awareness));
    c.set_double("vdd_v", m.vdd);
    return c;
}

inline LinearPmbModel model_from_config(const Config& c) {
    LinearPmbModel m;
    m.c_corr = c.get_double("c_corr");
    m.f0_mhz = c.get_double("f0_mhz");
    m.r_square = c.get_double_or("r_square", 0.0);
    m.max_rel_error = c.get_double_or("max_rel_error", 0.0);
    m.awareness = awareness_from_string(
        c.get_string_or("awareness", "proc_aware_temp_unaware"));
    m.vdd = c.get_double("vdd_v");
    return m;
}

// --- margin policy override ------------------------------------------------

/// Rows keyed `policy_<awareness>_<vdd>_{f_err,margin_mv,overhead_pct}`.
inline MarginPolicy policy_from_config(const Config& c) {
    MarginPolicy p = default_policy();
    for (const PolicyTableRow& row : kMarginPolicyTable) {
        const std::string base =
            std::string("policy_") + to_string(row.awareness) + "_" + vdd_tag(row.vdd);
        if (!c.has(base + "_margin_mv")) continue;
        p.set(row.awareness, row.vdd,
              {c.get_double_or(base + "_f_err", row.f_err),
               c.get_double(base + "_margin_mv") / 1000.0,
               c.get_double_or(base + "_overhead_pct", row.overhead * 100.0) / 100.0});
    }
    return p;
}

// --- calibration plan --------------------------------------------------------

inline Config plan_to_config(const CalibrationPlan& p) {
    Config c;
    c.set_double("vbb_min_v", p.vbb_min_v,
                 "sweep floor chosen so every corner still boots at the "
                 "100 MHz start frequency");
    c.set_double("vbb_max_v", p.vbb_max_v);
    c.set_double("vbb_step_v", p.vbb_step_v);
    c.set("search", to_string(p.method));
    c.set_double("freq_step_mhz", p.freq_step_mhz);
    c.set_long("benchmark_iterations", p.benchmark_iterations);
    c.set_double("start_freq_mhz", p.start_freq_mhz);
    c.set_double("cycles_per_iteration", p.cycles_per_iteration,
                 "bookkeeping constant calibrated so the default plan lasts "
                 "about 6 s");
    return c;
}

inline CalibrationPlan plan_from_config(const Config& c) {
    CalibrationPlan p;
    p.vbb_min_v = c.get_double_or("vbb_min_v", p.vbb_min_v);
    p.vbb_max_v = c.get_double_or("vbb_max_v", p.vbb_max_v);
    p.vbb_step_v = c.get_double_or("vbb_step_v", p.vbb_step_v);
    p.method = search_method_from_string(c.get_string_or("search", "linear"));
    p.freq_step_mhz = c.get_double_or("freq_step_mhz", p.freq_step_mhz);
    p.benchmark_iterations =
        c.get_long_or("benchmark_iterations", p.benchmark_iterations);
    p.start_freq_mhz = c.get_double_or("start_freq_mhz", p.start_freq_mhz);
    p.cycles_per_iteration =
        c.get_double_or("cycles_per_iteration", p.cycles_per_iteration);
    return p;
}

// --- controller + scenario ---------------------------------------------------

inline Config scenario_to_config(const ScenarioConfig& s) {
    Config c;
    c.set("mode", to_string(s.mode));
    c.set_double("f_target_mhz", s.reg.f_target_mhz,
                 "fallback target; the run schedule overrides it");
    c.set("awareness", to_string(s.reg.model.awareness));
    c.set_double("model_c_corr", s.reg.model.c_corr);
    c.set_double("model_f0_mhz", s.reg.model.f0_mhz);
    c.set_double("vdd_v", s.reg.model.vdd);
    c.set_double("margin_v", s.reg.margin_v);
    c.set_double("kp", s.reg.gains.kp, "grid-search tuned (see pid_tuner)");
    c.set_double("ki", s.reg.gains.ki);
    c.set_double("kd", s.reg.gains.kd);
    c.set_double("integral_clamp_mhz", s.reg.gains.integral_clamp_mhz);
    c.set_long("max_iterations", s.reg.max_iterations);
    c.set_double("convergence_band_mhz", s.reg.convergence_band_mhz,
                 "0 = one 50 mV generator step's frequency effect");
    c.set_double("regulation_period_s", s.reg.regulation_period_s);
    c.set_double("tick_s", s.tick_s);
    c.set_double("duration_s", s.duration_s,
                 "0 = run to the last profile/schedule breakpoint");
    return c;
}

inline ScenarioConfig scenario_from_config(const Config& c,
                                           const MarginPolicy& policy) {
    ScenarioConfig s;
    s.mode = control_mode_from_string(c.get_string_or("mode", "policy"));
    const double vdd = c.get_double("vdd_v");
    const Awareness aw = awareness_from_string(
        c.get_string_or("awareness", "proc_aware_temp_unaware"));

    LinearPmbModel model;
    model.vdd = vdd;
    model.awareness = aw;
    if (c.has("model_c_corr")) {
        model.c_corr = c.get_double("model_c_corr");
        model.f0_mhz = c.get_double("model_f0_mhz");
    } else if (aw == Awareness::ProcUnawareTempUnaware) {
        model = process_unaware_model(vdd);
        model.awareness = aw;
    } else {
        // Proc-aware without explicit parameters: Typical reference line.
        model = reference_models(vdd).at(ProcessCorner::Typical);
        model.awareness = aw;
    }

    s.reg = default_regulation(model, aw, policy);
    s.reg.f_target_mhz = c.get_double_or("f_target_mhz", 0.0);
    s.reg.margin_v = c.get_double_or("margin_v", s.reg.margin_v);
    s.reg.gains.kp = c.get_double_or("kp", s.reg.gains.kp);
    s.reg.gains.ki = c.get_double_or("ki", s.reg.gains.ki);
    s.reg.gains.kd = c.get_double_or("kd", s.reg.gains.kd);
    s.reg.gains.integral_clamp_mhz =
        c.get_double_or("integral_clamp_mhz", s.reg.gains.integral_clamp_mhz);
    s.reg.max_iterations =
        static_cast<int>(c.get_long_or("max_iterations", s.reg.max_iterations));
    s.reg.convergence_band_mhz =
        c.get_double_or("convergence_band_mhz", s.reg.convergence_band_mhz);
    s.reg.regulation_period_s =
        c.get_double_or("regulation_period_s", s.reg.regulation_period_s);
    s.tick_s = c.get_double_or("tick_s", s.tick_s);
    s.duration_s = c.get_double_or("duration_s", s.duration_s);
    return s;
}

// --- scenario summary --------------------------------------------------------

inline Config summary_to_config(const ScenarioSummary& s) {
    Config c;
    c.set_double("duration_s", s.duration_s);
    c.set_double("energy_total_mj", s.energy.total_mj);
    c.set_double("energy_dynamic_mj", s.energy.dynamic_mj);
    c.set_double("energy_leakage_mj", s.energy.leakage_mj);
    c.set_double("energy_gen_idle_mj", s.energy.gen_idle_mj);
    c.set_double("energy_gen_transition_mj", s.energy.gen_transition_mj);
    c.set_double("mean_chip_power_mw", s.mean_chip_power_mw);
    c.set_double("leakage_energy_fraction", s.leakage_energy_fraction);
    c.set_long("regulation_events", s.regulation_events);
    c.set_long("converged_events", s.converged_events);
    c.set_long("unconverged_events", s.unconverged_events);
    c.set("sustained_nonconvergence", s.sustained_nonconvergence ? "true" : "false");
    c.set_double("min_fmax_margin_mhz", s.min_fmax_margin_mhz);
    c.set_double("controller_busy_s", s.controller_busy_s);
    return c;
}

} // namespace bbsim

#endif
