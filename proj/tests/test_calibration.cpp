#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bbsim/calibration.hpp"
#include "bbsim/defaults.hpp"

using namespace bbsim;
using Catch::Approx;

namespace {

ChipTwin quiet_twin(ProcessCorner c = ProcessCorner::Typical) {
    ChipTwin t = default_twin(c);
    t.pmb_err_bound = 0.0;
    return t;
}

} // namespace

TEST_CASE("benchmark pass boundary is inclusive", "[calibration]") {
    const ChipTwin twin = quiet_twin();
    const ChipEnvironment env{{0.7, 25.0}, 0.0};
    const CalibrationPlan plan;
    BenchmarkMeter meter;
    CHECK(benchmark_passes(twin, env, 175.0, plan, meter));
    CHECK_FALSE(benchmark_passes(twin, env, 176.0, plan, meter));
    CHECK(benchmark_passes(twin, env, 100.0, plan, meter));
    CHECK(meter.calls == 3);
    CHECK(meter.elapsed_s > 0.0);
}

TEST_CASE("linear sweep and binary search agree", "[calibration]") {
    const ChipTwin twin = quiet_twin();
    const ChipEnvironment env{{0.7, 25.0}, 0.0};
    CalibrationPlan plan;
    BenchmarkMeter linear_meter, binary_meter;

    plan.method = SearchMethod::LinearSweep;
    const double f_linear = search_fmax(twin, env, plan, linear_meter);
    plan.method = SearchMethod::BinarySearch;
    const double f_binary = search_fmax(twin, env, plan, binary_meter);

    CHECK(f_linear == Approx(175.0).epsilon(1e-12));
    CHECK(f_binary == f_linear);
    CHECK(binary_meter.calls < linear_meter.calls);
}

TEST_CASE("search equivalence over random environments", "[calibration][property]") {
    const ChipTwin twin = quiet_twin();
    Rng rng(88);
    for (int i = 0; i < 300; ++i) {
        const double temp = -20.0 + 100.0 * rng.uniform01();
        const double vbb = -0.6 + 1.2 * rng.uniform01();
        const ChipEnvironment env{{0.7, temp}, vbb};
        if (fmax_true(twin, env) < 101.0) continue;
        CalibrationPlan plan;
        BenchmarkMeter m1, m2;
        plan.method = SearchMethod::LinearSweep;
        const double a = search_fmax(twin, env, plan, m1);
        plan.method = SearchMethod::BinarySearch;
        const double b = search_fmax(twin, env, plan, m2);
        REQUIRE(a == b);
    }
}

TEST_CASE("failing start frequency reports the environment", "[calibration]") {
    const ChipTwin twin = quiet_twin();
    const ChipEnvironment env{{0.7, 25.0}, -1.0}; // fmax 87.5 MHz < 100 MHz start
    CalibrationPlan plan;
    BenchmarkMeter meter;
    CHECK_THROWS_WITH(search_fmax(twin, env, plan, meter),
                      Catch::Matchers::ContainsSubstring("start frequency") &&
                          Catch::Matchers::ContainsSubstring("vbb"));
}

TEST_CASE("noiseless calibration recovers the die model and corner",
          "[calibration]") {
    for (ProcessCorner corner : {ProcessCorner::Fast, ProcessCorner::Typical,
                                 ProcessCorner::Slow}) {
        const ChipTwin twin = quiet_twin(corner);
        const CalibrationResult r = calibrate(twin, {0.7, 25.0}, default_plan(),
                                              reference_models(0.7), 1);
        // The fitted line deviates from the die parameters only through the
        // 1 MHz floor of the frequency search.
        CHECK(r.model.c_corr == Approx(twin.params(0.7).pmb_c_corr).margin(2e-3));
        CHECK(r.model.f0_mhz == Approx(twin.params(0.7).pmb_f0_mhz).margin(1.0));
        CHECK(r.model.awareness == Awareness::ProcAwareTempUnaware);
        CHECK(r.corner == corner);
    }
}

TEST_CASE("exact-sample fit round-trips the die parameters", "[calibration]") {
    // Bypass the 1 MHz search grid: build samples directly from the twin.
    const ChipTwin twin = quiet_twin();
    std::vector<CalibrationSample> samples;
    for (int k = 0; k < 29; ++k) {
        const ChipEnvironment env{{0.7, 25.0}, -0.75 + 0.05 * k};
        samples.push_back({"dut", env.op, env.vbb, pmb_read_mhz(twin, env, 0),
                           fmax_true(twin, env)});
    }
    const LinearPmbModel m = fit_linear(samples, Awareness::ProcAwareTempUnaware);
    CHECK(m.c_corr == Approx(twin.params(0.7).pmb_c_corr).margin(1e-9));
    CHECK(m.f0_mhz == Approx(twin.params(0.7).pmb_f0_mhz).margin(1e-9));
    CHECK(m.r_square == Approx(1.0).margin(1e-9));
}

TEST_CASE("default plan lasts about six seconds", "[calibration]") {
    const ChipTwin twin = quiet_twin();
    const CalibrationResult r = calibrate(twin, {0.7, 25.0}, default_plan(),
                                          reference_models(0.7), 1);
    CHECK(r.elapsed_s > 3.0);
    CHECK(r.elapsed_s < 12.0);
    // Ledger closure: elapsed is exactly benchmarks + sensor reads + transitions.
    const double reads = r.samples.size() * kPmbReadLatencyS;
    const double transitions = 23e-6 * static_cast<double>(r.samples.size());
    CHECK(r.elapsed_s == Approx(r.meter.elapsed_s + reads + transitions).epsilon(1e-9));
}

TEST_CASE("calibration at two temperatures stays within the spanning envelope",
          "[calibration]") {
    const ChipTwin twin = quiet_twin();
    const auto refs = reference_models(0.7);
    const CalibrationResult a = calibrate(twin, {0.7, 25.0}, default_plan(), refs, 1);
    const CalibrationResult b = calibrate(twin, {0.7, 60.0}, default_plan(), refs, 2);
    for (double x = 150.0; x <= 400.0; x += 10.0) {
        const double pa = predict_fmax(a.model, x);
        const double pb = predict_fmax(b.model, x);
        REQUIRE(std::abs(pa - pb) / pb <= 0.04);
    }
}

TEST_CASE("noisy calibration classifies the corner and halves the error",
          "[calibration]") {
    const auto refs = reference_models(0.7);
    const LinearPmbModel unaware = process_unaware_model(0.7);
    double worst_calibrated = 0.0, worst_unaware = 0.0;
    int correct = 0, runs = 0;
    for (ProcessCorner corner : {ProcessCorner::Fast, ProcessCorner::Typical,
                                 ProcessCorner::Slow}) {
        const ChipTwin twin = default_twin(corner); // 3% sensor noise
        for (std::uint64_t seed = 1; seed <= 5; ++seed, ++runs) {
            const CalibrationResult r =
                calibrate(twin, {0.7, 25.0}, default_plan(), refs, seed);
            if (r.corner == corner) ++correct;
            worst_calibrated = std::max(worst_calibrated, r.model.max_rel_error);
            worst_unaware = std::max(
                worst_unaware, residual_stats(unaware, r.samples).max_rel_error);
        }
    }
    CHECK(correct == runs);
    CHECK(worst_unaware >= 2.0 * worst_calibrated);
}
