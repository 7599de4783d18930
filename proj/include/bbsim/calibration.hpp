#ifndef BBSIM_CALIBRATION_HPP
#define BBSIM_CALIBRATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbsim/bb_gen.hpp"
#include "bbsim/chip_twin.hpp"
#include "bbsim/model_fit.hpp"

namespace bbsim {

enum class SearchMethod { LinearSweep, BinarySearch };

inline const char* to_string(SearchMethod m) {
    return m == SearchMethod::LinearSweep ? "linear" : "binary";
}

inline SearchMethod search_method_from_string(const std::string& s) {
    if (s == "linear") return SearchMethod::LinearSweep;
    if (s == "binary") return SearchMethod::BinarySearch;
    throw std::domain_error("unknown search method '" + s + "' (linear|binary)");
}

/// Boot-time calibration plan: which body-bias points to visit and how to
/// find the failure frequency at each of them.
struct CalibrationPlan {
    double vbb_min_v = -0.75;
    double vbb_max_v = 0.65;
    double vbb_step_v = 0.05;
    SearchMethod method = SearchMethod::LinearSweep;
    double freq_step_mhz = 1.0;
    long benchmark_iterations = 10000;
    double start_freq_mhz = 100.0;
    double cycles_per_iteration = 40.0; ///< bookkeeping constant, tuned so the
                                        ///< default plan lasts about 6 s

    int point_count() const {
        return static_cast<int>(std::lround((vbb_max_v - vbb_min_v) / vbb_step_v)) + 1;
    }
    double point(int k) const { return vbb_min_v + k * vbb_step_v; }
};

inline void validate_plan(const CalibrationPlan& p, double vdd) {
    if (p.vbb_step_v <= 0.0 || p.vbb_min_v > p.vbb_max_v)
        throw std::domain_error("calibration vbb grid is empty or reversed");
    if (p.freq_step_mhz < 1.0)
        throw std::domain_error("frequency search step below 1 MHz");
    if (p.benchmark_iterations <= 0 || p.start_freq_mhz <= 0.0 ||
        p.cycles_per_iteration <= 0.0)
        throw std::domain_error("calibration plan has non-positive constants");
    for (int k = 0; k < p.point_count(); ++k) {
        const double v = p.point(k);
        if (std::abs(v / 0.05 - std::lround(v / 0.05)) > 1e-6)
            throw std::domain_error("calibration vbb point " + std::to_string(v) +
                                    " is off the 50 mV generator grid");
        if (v < kVbbEnvMinV - 1e-9 || v > vbb_env_max(vdd) + 1e-9)
            throw std::domain_error("calibration vbb point " + std::to_string(v) +
                                    " outside the valid range");
    }
}

/// Accumulates simulated benchmark cost across search calls.
struct BenchmarkMeter {
    double elapsed_s = 0.0;
    long calls = 0;
};

/// Run the pass/fail benchmark once at `freq_mhz`. Passes exactly when the
/// clock does not exceed the die's true maximum frequency (the boundary
/// frequency itself passes). Costs iterations * cycles / freq of simulated
/// time whether it passes or fails.
inline bool benchmark_passes(const ChipTwin& twin, const ChipEnvironment& env,
                             double freq_mhz, const CalibrationPlan& plan,
                             BenchmarkMeter& meter) {
    meter.elapsed_s += static_cast<double>(plan.benchmark_iterations) *
                       plan.cycles_per_iteration / (freq_mhz * 1e6);
    meter.calls += 1;
    return freq_mhz <= fmax_true(twin, env) + 1e-9;
}

/// Largest frequency on the plan's MHz grid that still passes the benchmark.
/// LinearSweep and BinarySearch return identical values on the same grid;
/// binary issues far fewer benchmark runs.
inline double search_fmax(const ChipTwin& twin, const ChipEnvironment& env,
                          const CalibrationPlan& plan, BenchmarkMeter& meter) {
    auto freq_at = [&](long k) { return plan.start_freq_mhz + k * plan.freq_step_mhz; };
    if (!benchmark_passes(twin, env, freq_at(0), plan, meter))
        throw std::runtime_error(
            "fmax search failed at the start frequency " +
            std::to_string(plan.start_freq_mhz) + " MHz (vdd=" +
            std::to_string(env.op.vdd) + " V, T=" + std::to_string(env.op.temp_c) +
            " degC, vbb=" + std::to_string(env.vbb) + " V)");

    if (plan.method == SearchMethod::LinearSweep) {
        long k = 0;
        while (benchmark_passes(twin, env, freq_at(k + 1), plan, meter)) ++k;
        return freq_at(k);
    }

    // Exponential bracket then bisection over the same grid.
    long lo = 0, hi = 1;
    while (benchmark_passes(twin, env, freq_at(hi), plan, meter)) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (benchmark_passes(twin, env, freq_at(mid), plan, meter))
            lo = mid;
        else
            hi = mid;
    }
    return freq_at(lo);
}

struct CalibrationResult {
    LinearPmbModel model; ///< awareness = ProcAwareTempUnaware
    ProcessCorner corner = ProcessCorner::Typical;
    double elapsed_s = 0.0;
    std::vector<CalibrationSample> samples;
    BenchmarkMeter meter;
};

/// The boot procedure: sweep the body bias over the plan grid, find the true
/// maximum frequency at each point, read the sensor, fit the per-chip linear
/// model and classify the die against the per-corner references. Temperature
/// is held constant for the whole procedure.
inline CalibrationResult calibrate(
    const ChipTwin& twin, const OperatingPoint& op, const CalibrationPlan& plan,
    const std::map<ProcessCorner, LinearPmbModel>& references,
    std::uint64_t seed, const std::string& chip_id = "dut") {
    validate_op(twin, op);
    validate_plan(plan, op.vdd);

    CalibrationResult result;
    BbGenState gen{op.vdd};
    for (int k = 0; k < plan.point_count(); ++k) {
        const ApplyResult applied = request_vbb(gen, plan.point(k));
        const ChipEnvironment env{op, applied.applied_vbb};
        const double f_max = search_fmax(twin, env, plan, result.meter);
        const double f_pmb =
            pmb_read_mhz(twin, env, derive_seed(seed, 3, static_cast<std::uint64_t>(k)));
        result.elapsed_s += kPmbReadLatencyS;
        result.samples.push_back({chip_id, op, applied.applied_vbb, f_pmb, f_max});
    }
    result.elapsed_s += result.meter.elapsed_s + gen.cum_busy_time_s;

    result.model = fit_linear(result.samples, Awareness::ProcAwareTempUnaware);
    double x_lo = result.samples.front().f_pmb_mhz, x_hi = x_lo;
    for (const auto& s : result.samples) {
        x_lo = std::min(x_lo, s.f_pmb_mhz);
        x_hi = std::max(x_hi, s.f_pmb_mhz);
    }
    result.corner = classify_corner(result.model, references, x_lo, x_hi);
    return result;
}

} // namespace bbsim

#endif
