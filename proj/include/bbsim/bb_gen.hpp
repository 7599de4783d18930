#ifndef BBSIM_BB_GEN_HPP
#define BBSIM_BB_GEN_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bbsim {

/// Electrical characteristics of the on-chip body-bias generator.
struct BbGenConfig {
    double step_v = 0.05;              ///< minimum programmable step
    double vbb_min_v = -1.5;           ///< generator floor (sims clamp tighter)
    double fbb_headroom_v = 0.3;       ///< ceiling is vdd/2 + headroom
    double transition_time_nwell_s = 23e-6;
    double transition_time_pwell_s = 11.5e-6;
    double transition_energy_nj = 25.0;
    double idle_power_uw = 4.15;
};

/// Generator state: the quantized voltage currently applied to the wells plus
/// transition accounting. Owned by exactly one regulation loop at a time.
struct BbGenState {
    double vdd;
    BbGenConfig cfg{};
    double applied_vbb = 0.0; ///< always a multiple of cfg.step_v
    double cum_transition_energy_nj = 0.0;
    double cum_busy_time_s = 0.0;
    long transitions = 0;

    double vbb_max() const { return vdd / 2.0 + cfg.fbb_headroom_v; }
};

/// Round up to the next step multiple (k*step with integer k, so repeated
/// requests normalize to identical doubles; negative zero collapses to zero).
inline double quantize_up(double v, double step_v) {
    const double k = std::ceil(v / step_v - 1e-9);
    return k == 0.0 ? 0.0 : k * step_v;
}

struct ApplyResult {
    double applied_vbb;
    bool changed;
};

/// Program the generator. The target is clamped to the generator range and
/// rounded up to the next 50 mV multiple when that stays in range, otherwise
/// down; rounding up is the undershoot-safe direction since more FBB only
/// speeds the chip. A no-op request charges nothing.
inline ApplyResult request_vbb(BbGenState& state, double target_v) {
    if (!std::isfinite(target_v))
        throw std::domain_error("non-finite vbb request");
    const double lo = state.cfg.vbb_min_v;
    const double hi = state.vbb_max();
    const double clamped = std::clamp(target_v, lo, hi);
    double applied = quantize_up(clamped, state.cfg.step_v);
    if (applied > hi + 1e-12)
        applied -= state.cfg.step_v; // rounding up would leave the range
    if (std::abs(applied - state.applied_vbb) < 1e-12)
        return {state.applied_vbb, false};
    state.applied_vbb = applied;
    state.cum_busy_time_s += std::max(state.cfg.transition_time_nwell_s,
                                      state.cfg.transition_time_pwell_s);
    state.cum_transition_energy_nj += state.cfg.transition_energy_nj;
    state.transitions += 1;
    return {applied, true};
}

/// Duty-cycled standby consumption over `duration_s`, in uJ.
inline double idle_energy_uj(const BbGenState& state, double duration_s) {
    if (duration_s < 0.0)
        throw std::domain_error("negative duration " + std::to_string(duration_s));
    return state.cfg.idle_power_uw * duration_s;
}

} // namespace bbsim

#endif
