// bbsim: desk-scale digital twin of a near-threshold multi-core die with
// performance-aware body-bias regulation. Every run is fully determined by
// its input files, flags and seed.

#include <cstdio>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bbsim/config_io.hpp"
#include "bbsim/csv.hpp"
#include "bbsim/defaults.hpp"

namespace {

using namespace bbsim;

void print_tables(std::ostream& out) {
    out << "# table: linear model parameters, single chip, 25 degC\n";
    out << "# columns: vdd_v,c_corr,f0_mhz,r_square\n";
    for (const ModelTableRow& r : kSingleConditionModels) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%g,%g,%g,%g\n", r.vdd, r.c_corr, r.f0_mhz,
                      r.r_square);
        out << buf;
    }
    out << "# table: linear model, single chip, three temperatures\n";
    out << "# columns: vdd_v,c_corr,f0_mhz,r_square\n";
    {
        const ModelTableRow& r = kTempSpanningModel;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%g,%g,%g,%g\n", r.vdd, r.c_corr, r.f0_mhz,
                      r.r_square);
        out << buf;
    }
    out << "# table: linear model, multiple chips across corners and temperatures\n";
    out << "# columns: vdd_v,c_corr,f0_mhz,r_square\n";
    {
        const ModelTableRow& r = kProcessSpanningModel;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%g,%g,%g,%g\n", r.vdd, r.c_corr, r.f0_mhz,
                      r.r_square);
        out << buf;
    }
    out << "# table: body-bias induced performance gain\n";
    out << "# columns: vdd_v,gain_per_100mv\n";
    for (const BbSlope& s : kBbGainTable) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g,%g\n", s.vdd, s.gain_per_100mv);
        out << buf;
    }
    out << "# table: model frequency error, VBB margin and leakage overhead\n";
    out << "# columns: awareness,vdd_v,f_err,margin_mv,overhead\n";
    for (const PolicyTableRow& r : kMarginPolicyTable) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s,%g,%g,%g,%g\n", to_string(r.awareness),
                      r.vdd, r.f_err, r.margin_mv, r.overhead);
        out << buf;
    }
    out << "# table: body-bias generator\n";
    out << "# columns: parameter,value\n";
    const BbGenConfig g;
    out << "step_v," << g.step_v << "\n";
    out << "range_min_v," << g.vbb_min_v << "\n";
    out << "fbb_headroom_v," << g.fbb_headroom_v << "\n";
    out << "transition_time_nwell_us," << g.transition_time_nwell_s * 1e6 << "\n";
    out << "transition_time_pwell_us," << g.transition_time_pwell_s * 1e6 << "\n";
    out << "transition_energy_nj," << g.transition_energy_nj << "\n";
    out << "idle_power_uw," << g.idle_power_uw << "\n";
}

std::ostream& open_out(std::ofstream& file, const std::string& out_path) {
    if (out_path.empty()) return std::cout;
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write file '" + out_path + "'");
    return file;
}

MarginPolicy policy_from_flag(const std::string& config_path) {
    if (config_path.empty()) return default_policy();
    return policy_from_config(Config::load(config_path));
}

Awareness infer_awareness(const std::vector<CalibrationSample>& samples) {
    std::set<std::string> chips;
    std::set<long> temps;
    for (const auto& s : samples) {
        chips.insert(s.chip_id);
        temps.insert(std::lround(s.op.temp_c * 100.0));
    }
    if (chips.size() > 1) return Awareness::ProcUnawareTempUnaware;
    if (temps.size() > 1) return Awareness::ProcAwareTempUnaware;
    return Awareness::ProcAwareTempAware;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"body-bias regulation digital twin"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string out_path;
    std::string config_path;
    app.fallthrough(); // global flags may follow the subcommand
    app.add_option("--seed", seed, "master random seed");
    app.add_option("--out", out_path, "output file or prefix");
    app.add_option("--config", config_path, "margin-policy override file");

    // twin print-defaults
    auto* twin_cmd = app.add_subcommand("twin", "twin parameter utilities");
    auto* print_defaults =
        twin_cmd->add_subcommand("print-defaults", "emit the calibrated default twin");
    std::string corner_name = "typical";
    print_defaults->add_option("--corner", corner_name, "fast|typical|slow");

    // fit <samples.csv>
    auto* fit_cmd = app.add_subcommand("fit", "fit the linear model to samples");
    std::string samples_path;
    std::string awareness_flag;
    fit_cmd->add_option("samples", samples_path, "samples CSV")->required();
    fit_cmd->add_option("--awareness", awareness_flag,
                        "override the inferred awareness level");

    // calibrate <twin> <plan>  (also accepted as --twin/--plan)
    auto* cal_cmd = app.add_subcommand("calibrate", "boot-time calibration");
    std::string twin_path, plan_path;
    double cal_temp = 25.0;
    double cal_vdd = 0.7;
    cal_cmd->add_option("twin,--twin", twin_path, "twin config")->required();
    cal_cmd->add_option("plan,--plan", plan_path, "calibration plan config")->required();
    cal_cmd->add_option("--temp", cal_temp, "constant calibration temperature, degC");
    cal_cmd->add_option("--vdd", cal_vdd, "supply voltage, V");

    // run <twin> <controller> <profile> <schedule>
    auto* run_cmd = app.add_subcommand("run", "run a regulation scenario");
    std::string run_twin, run_ctl, run_profile, run_schedule, run_model;
    run_cmd->add_option("twin", run_twin, "twin config")->required();
    run_cmd->add_option("controller", run_ctl, "controller config")->required();
    run_cmd->add_option("profile", run_profile, "temperature profile CSV")->required();
    run_cmd->add_option("schedule", run_schedule, "set-point schedule CSV")->required();
    run_cmd->add_option("--model", run_model,
                        "fitted model config (e.g. calibrate output) overriding "
                        "the controller's model parameters");

    // report <traceA> [traceB]
    auto* report_cmd = app.add_subcommand("report", "energy report over traces");
    std::string trace_a, trace_b;
    report_cmd->add_option("traceA", trace_a, "trace CSV (baseline)")->required();
    report_cmd->add_option("traceB", trace_b, "trace CSV to compare against A");

    auto* tables_cmd =
        app.add_subcommand("tables", "print the embedded characterization tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        std::ofstream file;
        if (print_defaults->parsed()) {
            const ChipTwin t = default_twin(corner_from_string(corner_name));
            open_out(file, out_path) << twin_to_config(t).to_string();
        } else if (twin_cmd->parsed()) {
            std::cerr << "error: twin requires a subcommand (print-defaults)\n";
            return 2;
        } else if (fit_cmd->parsed()) {
            const auto samples = read_samples_csv(samples_path);
            const Awareness aw = awareness_flag.empty()
                                     ? infer_awareness(samples)
                                     : awareness_from_string(awareness_flag);
            const LinearPmbModel m = fit_linear(samples, aw);
            open_out(file, out_path) << model_to_config(m).to_string();
        } else if (cal_cmd->parsed()) {
            const ChipTwin twin = twin_from_config(Config::load(twin_path));
            const CalibrationPlan plan = plan_from_config(Config::load(plan_path));
            const OperatingPoint op{cal_vdd, cal_temp};
            const CalibrationResult r =
                calibrate(twin, op, plan, reference_models(cal_vdd), seed);
            const std::string prefix = out_path.empty() ? "calibration" : out_path;
            write_samples_csv(prefix + ".samples.csv", r.samples);
            Config mc = model_to_config(r.model);
            mc.set("classified_corner", to_string(r.corner));
            mc.set_double("elapsed_s", r.elapsed_s);
            mc.set_long("benchmark_calls", r.meter.calls);
            mc.save(prefix + ".model.cfg");
            std::cout << "corner = " << to_string(r.corner) << "\n"
                      << "elapsed_s = " << r.elapsed_s << "\n"
                      << "max_rel_error = " << r.model.max_rel_error << "\n";
        } else if (run_cmd->parsed()) {
            const ChipTwin twin = twin_from_config(Config::load(run_twin));
            const MarginPolicy policy = policy_from_flag(config_path);
            ScenarioConfig cfg = scenario_from_config(Config::load(run_ctl), policy);
            if (!run_model.empty()) {
                LinearPmbModel m = model_from_config(Config::load(run_model));
                m.awareness = cfg.reg.model.awareness;
                cfg.reg.model = m;
            }
            TemperatureProfile profile{read_timeseries_csv(run_profile)};
            SetpointSchedule schedule{read_timeseries_csv(run_schedule)};
            const ScenarioResult r = run_scenario(twin, cfg, profile, schedule, seed);
            const std::string trace_path = out_path.empty() ? "trace.csv" : out_path;
            write_trace_csv(trace_path, r.trace);
            summary_to_config(r.summary).save(trace_path + ".summary");
            std::cout << summary_to_config(r.summary).to_string();
        } else if (report_cmd->parsed()) {
            Config c;
            if (trace_b.empty()) {
                const EnergyReport rep = energy_report(read_trace_csv(trace_a));
                c.set_double("duration_s", rep.duration_s);
                c.set_double("energy_mj", rep.energy_mj);
                c.set_double("mean_power_mw", rep.mean_power_mw);
                c.set_double("leakage_fraction", rep.leakage_fraction);
            } else {
                const EnergyComparison cmp =
                    energy_report(read_trace_csv(trace_a), read_trace_csv(trace_b));
                c.set_double("duration_s", cmp.baseline.duration_s);
                c.set_double("mean_power_a_mw", cmp.baseline.mean_power_mw);
                c.set_double("mean_power_b_mw", cmp.candidate.mean_power_mw);
                c.set_double("energy_a_mj", cmp.baseline.energy_mj);
                c.set_double("energy_b_mj", cmp.candidate.energy_mj);
                c.set_double("leakage_fraction_a", cmp.baseline.leakage_fraction);
                c.set_double("leakage_fraction_b", cmp.candidate.leakage_fraction);
                c.set_double("improvement_pct", cmp.improvement_pct);
            }
            open_out(file, out_path) << c.to_string();
        } else if (tables_cmd->parsed()) {
            std::ofstream tf;
            print_tables(open_out(tf, out_path));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
