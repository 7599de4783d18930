#ifndef BBSIM_CONTROLLER_HPP
#define BBSIM_CONTROLLER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "bbsim/bb_gen.hpp"
#include "bbsim/chip_twin.hpp"
#include "bbsim/margining.hpp"
#include "bbsim/model_fit.hpp"

namespace bbsim {

struct PidGains {
    double kp = 1.0;
    double ki = 0.0;
    double kd = 0.0;
    double integral_clamp_mhz = 50.0; ///< anti-windup bound on the integral term
};

struct PidState {
    double integral = 0.0; ///< MHz * steps, clamped
    double previous_error = 0.0;
};

/// One positional PID step: kp*e + ki*clamp(sum e) + kd*(e - e_prev).
inline double pid_step(const PidGains& g, PidState& s, double error_mhz) {
    if (!std::isfinite(error_mhz))
        throw std::domain_error("non-finite frequency error");
    s.integral = std::clamp(s.integral + error_mhz, -g.integral_clamp_mhz,
                            g.integral_clamp_mhz);
    const double correction = g.kp * error_mhz + g.ki * s.integral +
                              g.kd * (error_mhz - s.previous_error);
    s.previous_error = error_mhz;
    return correction;
}

/// Invert the relative-variation body-bias model: the voltage change that
/// closes a frequency gap at the current operating estimate.
inline double freq_gap_to_dvbb(double gap_mhz, double current_fmax_est_mhz,
                               const BbSlope& slope) {
    if (!(current_fmax_est_mhz > 0.0))
        throw std::domain_error("non-positive fmax estimate " +
                                std::to_string(current_fmax_est_mhz) + " MHz");
    return (gap_mhz / current_fmax_est_mhz) / slope.gain_per_100mv * 0.1;
}

struct RegulationConfig {
    double f_target_mhz = 0.0;
    LinearPmbModel model;
    BbSlope slope;
    double margin_v = 0.0;  ///< FBB safety margin added on top of the loop command
    PidGains gains;
    int max_iterations = 16;
    double convergence_band_mhz = 0.0; ///< 0 = auto: one 50 mV step's frequency effect
    double regulation_period_s = 2.0;  ///< 0.5 Hz regulation cadence
};

/// Loop memory that persists across regulation events: the PID state and the
/// unmargined voltage command the loop converged to last time.
struct ControllerState {
    PidState pid;
    double cmd_v = 0.0;
};

struct RegulationOutcome {
    bool converged = false;
    int iterations = 0;       ///< PMB reads issued (one per iteration)
    double applied_vbb_v = 0.0; ///< operational voltage programmed on exit
    double elapsed_s = 0.0;    ///< PMB read latency plus generator transitions
    double last_pred_mhz = 0.0;
    double last_pmb_mhz = 0.0;
};

/// Reset the generator to 0 V in a single step, the starting point for the
/// first regulation of a new set-point. Costs nothing if already there.
inline ApplyResult on_new_setpoint(ControllerState& ctl, BbGenState& gen) {
    ctl.pid = PidState{};
    ctl.cmd_v = 0.0;
    return request_vbb(gen, 0.0);
}

/// One regulation event of the closed loop: read the sensor, convert through
/// the model, compare with the set-point, PID, convert the correction to a
/// voltage step, reprogram the generator; at most max_iterations times.
///
/// The loop iterates with the generator at the *unmargined* command so the
/// feedback never measures the margin away; convergence requires the estimate
/// at or above the set-point (within one quantizer step above it). On exit the
/// margin is added to the absolute command and programmed as the operational
/// voltage, so the no-undershoot guarantee margin >= f_err/gain * 100 mV
/// survives the loop.
inline RegulationOutcome regulate_once(const RegulationConfig& cfg,
                                       ControllerState& ctl, BbGenState& gen,
                                       const ChipTwin& twin,
                                       const OperatingPoint& op,
                                       std::uint64_t seed) {
    if (std::abs(cfg.model.vdd - op.vdd) > 1e-9)
        throw std::runtime_error("controller model characterized at " +
                                 std::to_string(cfg.model.vdd) +
                                 " V but the chip operates at " +
                                 std::to_string(op.vdd) + " V");
    if (cfg.margin_v < 0.0)
        throw std::domain_error("negative margin");

    // Simulations honor the tighter silicon sweep floor, not the generator's.
    // The ceiling is the last grid point that still leaves room for the
    // margin (quantizing the command up must not eat into it).
    const double cmd_lo = kVbbEnvMinV;
    const double top = std::min(vbb_env_max(op.vdd), gen.vbb_max()) - cfg.margin_v;
    const double cmd_hi =
        std::floor(top / gen.cfg.step_v + 1e-9) * gen.cfg.step_v;

    const double busy0 = gen.cum_busy_time_s;
    RegulationOutcome out;
    ctl.cmd_v = std::clamp(ctl.cmd_v, cmd_lo, cmd_hi);

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const ApplyResult loop_point = request_vbb(gen, ctl.cmd_v);
        const ChipEnvironment env{op, loop_point.applied_vbb};
        const double f_pmb =
            pmb_read_mhz(twin, env, derive_seed(seed, 0, static_cast<std::uint64_t>(it)));
        out.iterations = it;
        out.elapsed_s += kPmbReadLatencyS;
        out.last_pmb_mhz = f_pmb;
        out.last_pred_mhz = predict_fmax(cfg.model, f_pmb);

        const double error = cfg.f_target_mhz - out.last_pred_mhz;
        // Auto band: the frequency effect of one generator step. The
        // relative slope applies to the unbiased frequency, so de-rate the
        // estimate by the known bias factor of the current loop point.
        const double bias_factor = std::max(
            0.2, 1.0 + cfg.slope.gain_per_100mv * (loop_point.applied_vbb / 0.1));
        const double band =
            cfg.convergence_band_mhz > 0.0
                ? cfg.convergence_band_mhz
                : cfg.slope.gain_per_100mv * (gen.cfg.step_v / 0.1) *
                      (out.last_pred_mhz / bias_factor);
        // Converged: estimate at or above the set-point, less than one
        // quantizer step above it. The top edge is exclusive so a point
        // sitting exactly one step high still walks down to the cheaper one.
        if (error <= 0.0 && error > -band) {
            out.converged = true;
            break;
        }
        const double correction = pid_step(cfg.gains, ctl.pid, error);
        // Climbing: the applied voltage is known-insufficient, so the next
        // command starts from it. Otherwise a sub-step correction is
        // absorbed by the upward quantizer and the loop stalls below target.
        if (error > 0.0) ctl.cmd_v = std::max(ctl.cmd_v, loop_point.applied_vbb);
        ctl.cmd_v += freq_gap_to_dvbb(correction, out.last_pred_mhz, cfg.slope);
        ctl.cmd_v = std::clamp(ctl.cmd_v, cmd_lo, cmd_hi);
    }

    // Margin applied to the absolute command; quantization rounds up, so the
    // programmed voltage is never below command + margin.
    const ApplyResult op_point = request_vbb(gen, gen.applied_vbb + cfg.margin_v);
    out.applied_vbb_v = op_point.applied_vbb;
    out.elapsed_s += gen.cum_busy_time_s - busy0;
    return out;
}

} // namespace bbsim

#endif
