#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bbsim/chip_twin.hpp"
#include "bbsim/defaults.hpp"
#include "bbsim/model_fit.hpp"

using namespace bbsim;
using Catch::Approx;

namespace {

ChipTwin quiet_twin(ProcessCorner c = ProcessCorner::Typical) {
    ChipTwin t = default_twin(c);
    t.pmb_err_bound = 0.0;
    return t;
}

/// Independent oracle for the leakage VBB constant: 1-D grid search
/// minimizing squared relative error against the characterized 0.7 V
/// margin/overhead pairs.
double leak_v_slope_oracle() {
    const double margins[3] = {0.05, 0.10, 0.15};
    const double overheads[3] = {0.10, 0.14, 0.37};
    double best_s = 0.0, best_f = 1e300;
    for (double s = 0.30; s <= 1.20; s += 1e-6) {
        double f = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double rel = (std::exp(margins[i] / s) - 1.0 - overheads[i]) /
                               overheads[i];
            f += rel * rel;
        }
        if (f < best_f) {
            best_f = f;
            best_s = s;
        }
    }
    return best_s;
}

} // namespace

TEST_CASE("fmax anchors at 0.7 V", "[twin]") {
    const ChipTwin t = quiet_twin();
    CHECK(fmax_true(t, {{0.7, 25.0}, 0.0}) == Approx(175.0).epsilon(1e-12));
    CHECK(fmax_true(t, {{0.7, 25.0}, 0.3}) == Approx(201.25).epsilon(1e-12));

    // Temperature coefficient solved from the (25 C, 175 MHz) and
    // (17 C, 170 MHz) anchors: tc = (1 - 170/175)/8 per degC.
    const double tc_oracle = (1.0 - 170.0 / 175.0) / 8.0;
    CHECK(t.params(0.7).temp_coeff == Approx(tc_oracle).epsilon(1e-12));
    CHECK(fmax_true(t, {{0.7, 17.0}, 0.0}) == Approx(170.0).epsilon(1e-12));
}

TEST_CASE("fmax domain errors name the violated bound", "[twin]") {
    const ChipTwin t = quiet_twin();
    CHECK_THROWS_WITH(fmax_true(t, {{0.6, 25.0}, 0.0}),
                      Catch::Matchers::ContainsSubstring("0.5, 0.7, 0.9"));
    CHECK_THROWS_WITH(fmax_true(t, {{0.7, 25.0}, 0.7}),
                      Catch::Matchers::ContainsSubstring("vdd/2 + 0.3"));
    CHECK_THROWS_WITH(fmax_true(t, {{0.7, 90.0}, 0.0}),
                      Catch::Matchers::ContainsSubstring("[-20, 80]"));
    CHECK_THROWS_AS(fmax_true(t, {{0.7, 25.0}, -1.2}), std::domain_error);
}

TEST_CASE("leakage surface", "[twin]") {
    const ChipTwin t = quiet_twin();
    const double i0 = t.params(0.7).leak_i0_ua;

    CHECK(leakage_ua(t, {{0.7, 25.0}, 0.0}) == Approx(i0).epsilon(1e-12));

    // 100 mV of margin costs about the characterized 14% (acceptance
    // tolerance +/-5 percentage points; the fit is a compromise).
    const double oh100 = leakage_ua(t, {{0.7, 25.0}, 0.10}) / i0 - 1.0;
    CHECK(oh100 > 0.09);
    CHECK(oh100 < 0.19);

    // The default slope is the least-squares oracle value.
    const double s = leak_v_slope_oracle();
    CHECK(t.leak_v_slope_v == Approx(s).margin(2e-6));
    CHECK(leakage_ua(t, {{0.7, 25.0}, 0.15}) ==
          Approx(i0 * std::exp(0.15 / t.leak_v_slope_v)).epsilon(1e-12));

    // Calibrated default: leakage doubles from 25 to 80 degC at fixed VBB.
    CHECK(leakage_ua(t, {{0.7, 80.0}, 0.0}) / i0 == Approx(2.0).epsilon(1e-9));
}

TEST_CASE("effective capacitance reproduces the calibrated power balance",
          "[twin]") {
    // Closed-form oracle: c_eff is sized so regulated-vs-off total power at
    // 80 degC, 170 MHz, 0.7 V differs by exactly 15%, given the settled
    // regulated operating point at that temperature.
    const ChipTwin t = quiet_twin();
    RegulationConfig cfg = default_regulation(
        reference_models(0.7).at(ProcessCorner::Typical),
        Awareness::ProcAwareTempUnaware, default_policy());
    cfg.f_target_mhz = 170.0;
    ControllerState ctl;
    BbGenState gen{0.7};
    on_new_setpoint(ctl, gen);
    const RegulationOutcome o = regulate_once(cfg, ctl, gen, t, {0.7, 80.0}, 1);
    REQUIRE(o.converged);

    const double p_lkg_off = leakage_ua(t, {{0.7, 80.0}, 0.0}) * 0.7 / 1000.0;
    const double p_lkg_on =
        leakage_ua(t, {{0.7, 80.0}, o.applied_vbb_v}) * 0.7 / 1000.0;
    const double c_eff_oracle =
        ((p_lkg_off - p_lkg_on) / 0.15 - p_lkg_off) / (0.7 * 0.7 * 170.0);
    CHECK(t.c_eff_nf == Approx(c_eff_oracle).epsilon(1e-9));

    // Simulation route: the same 15% shows up in total power.
    const double off = total_power_mw(t, {{0.7, 80.0}, 0.0}, 170.0);
    const double on = total_power_mw(t, {{0.7, 80.0}, o.applied_vbb_v}, 170.0);
    CHECK((off - on) / off == Approx(0.15).margin(1e-9));
}

TEST_CASE("dynamic and total power", "[twin]") {
    const ChipTwin t = quiet_twin();
    CHECK(dynamic_power_mw(t, {0.7, 25.0}, 0.0) == 0.0);
    const double p1 = dynamic_power_mw(t, {0.7, 25.0}, 100.0);
    CHECK(dynamic_power_mw(t, {0.7, 25.0}, 200.0) == Approx(2.0 * p1).epsilon(1e-12));
    CHECK_THROWS_AS(dynamic_power_mw(t, {0.7, 25.0}, -1.0), std::domain_error);

    const ChipEnvironment env{{0.7, 25.0}, 0.0};
    CHECK(total_power_mw(t, env, 0.0) ==
          Approx(leakage_ua(t, env) * 0.7 / 1000.0).epsilon(1e-12));
    CHECK(total_power_mw(t, env, 170.0) > dynamic_power_mw(t, env.op, 170.0));
}

TEST_CASE("noiseless sensor round trip over a 1000-point grid", "[twin]") {
    const ChipTwin t = quiet_twin();
    const LinearPmbModel matched{t.params(0.7).pmb_c_corr, t.params(0.7).pmb_f0_mhz,
                                 1.0, 0.0, Awareness::ProcAwareTempAware, 0.7};
    int count = 0;
    for (int i = 0; i < 25; ++i) {
        for (int j = 0; j < 40; ++j) {
            const double temp = -20.0 + (80.0 - -20.0) * i / 24.0;
            const double vbb = -1.0 + (vbb_env_max(0.7) - -1.0) * j / 39.0;
            const ChipEnvironment env{{0.7, temp}, vbb};
            const double pred = predict_fmax(matched, pmb_read_mhz(t, env, 7));
            REQUIRE(std::abs(pred - fmax_true(t, env)) < 1e-9);
            ++count;
        }
    }
    CHECK(count == 1000);
}

TEST_CASE("sensor reads are seed-deterministic and bounded", "[twin]") {
    ChipTwin t = default_twin();
    const ChipEnvironment env{{0.7, 25.0}, 0.1};
    CHECK(pmb_read_mhz(t, env, 42) == pmb_read_mhz(t, env, 42));
    CHECK(pmb_read_mhz(t, env, 42) != pmb_read_mhz(t, env, 43));

    // Pushed through the matched model, the prediction error never exceeds
    // the configured bound anywhere in the valid environment space.
    const LinearPmbModel matched{t.params(0.7).pmb_c_corr, t.params(0.7).pmb_f0_mhz,
                                 1.0, 0.0, Awareness::ProcAwareTempAware, 0.7};
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double temp = -20.0 + 100.0 * rng.uniform01();
        const double vbb = -1.0 + (vbb_env_max(0.7) + 1.0) * rng.uniform01();
        const ChipEnvironment e{{0.7, temp}, vbb};
        const double rel =
            std::abs(predict_fmax(matched, pmb_read_mhz(t, e, rng.next())) -
                     fmax_true(t, e)) /
            fmax_true(t, e);
        REQUIRE(rel <= t.pmb_err_bound + 1e-12);
    }
}

TEST_CASE("monotonicity and corner ordering properties", "[twin][property]") {
    const ChipTwin typ = quiet_twin();
    const ChipTwin fast = quiet_twin(ProcessCorner::Fast);
    const ChipTwin slow = quiet_twin(ProcessCorner::Slow);
    Rng rng(123);
    for (int i = 0; i < 10000; ++i) {
        const double temp = -20.0 + 100.0 * rng.uniform01();
        const double hi = vbb_env_max(0.7);
        double v1 = -1.0 + (hi + 1.0) * rng.uniform01();
        double v2 = -1.0 + (hi + 1.0) * rng.uniform01();
        if (v1 > v2) std::swap(v1, v2);
        if (v2 - v1 < 1e-9) continue;
        const ChipEnvironment e1{{0.7, temp}, v1}, e2{{0.7, temp}, v2};
        REQUIRE(fmax_true(typ, e1) < fmax_true(typ, e2));
        REQUIRE(leakage_ua(typ, e1) < leakage_ua(typ, e2));

        double t1 = -20.0 + 100.0 * rng.uniform01();
        double t2 = -20.0 + 100.0 * rng.uniform01();
        if (t1 > t2) std::swap(t1, t2);
        REQUIRE(fmax_true(typ, {{0.7, t1}, v1}) <=
                fmax_true(typ, {{0.7, t2}, v1}) + 1e-12);
        if (t2 - t1 > 1e-9)
            REQUIRE(leakage_ua(typ, {{0.7, t1}, v1}) <
                    leakage_ua(typ, {{0.7, t2}, v1}));

        REQUIRE(fmax_true(fast, e1) > fmax_true(typ, e1));
        REQUIRE(fmax_true(typ, e1) > fmax_true(slow, e1));
    }
}
