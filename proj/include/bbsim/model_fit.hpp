#ifndef BBSIM_MODEL_FIT_HPP
#define BBSIM_MODEL_FIT_HPP

#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbsim/chip_twin.hpp"

namespace bbsim {

/// Which operating conditions the predictive model is conditioned on.
/// Lower awareness means a larger error bound and a wider FBB margin.
enum class Awareness {
    ProcAwareTempAware,
    ProcAwareTempUnaware,
    ProcUnawareTempUnaware,
};

inline const char* to_string(Awareness a) {
    switch (a) {
    case Awareness::ProcAwareTempAware: return "proc_aware_temp_aware";
    case Awareness::ProcAwareTempUnaware: return "proc_aware_temp_unaware";
    case Awareness::ProcUnawareTempUnaware: return "proc_unaware_temp_unaware";
    }
    return "?";
}

inline Awareness awareness_from_string(const std::string& s) {
    if (s == "proc_aware_temp_aware") return Awareness::ProcAwareTempAware;
    if (s == "proc_aware_temp_unaware") return Awareness::ProcAwareTempUnaware;
    if (s == "proc_unaware_temp_unaware") return Awareness::ProcUnawareTempUnaware;
    throw std::domain_error("unknown awareness level '" + s + "'");
}

/// One simultaneous measurement of the sensor and the true maximum frequency.
struct CalibrationSample {
    std::string chip_id;
    OperatingPoint op;
    double vbb;        ///< V
    double f_pmb_mhz;  ///< sensor reading
    double f_max_mhz;  ///< measured maximum frequency
};

/// The linear predictive model: f_max = c_corr * f_pmb + f0.
struct LinearPmbModel {
    double c_corr = 0.0;
    double f0_mhz = 0.0;
    double r_square = 0.0;
    double max_rel_error = 0.0;
    Awareness awareness = Awareness::ProcAwareTempAware;
    double vdd = 0.0;
};

inline double predict_fmax(const LinearPmbModel& m, double f_pmb_mhz) {
    if (f_pmb_mhz < 0.0)
        throw std::domain_error("negative sensor reading " +
                                std::to_string(f_pmb_mhz) + " MHz");
    return m.c_corr * f_pmb_mhz + m.f0_mhz;
}

struct ResidualStats {
    double max_rel_error;
    double r_square;
};

/// Worst relative residual and coefficient of determination of `m` over the
/// sample set. Pure recomputation; idempotent.
inline ResidualStats residual_stats(const LinearPmbModel& m,
                                    std::span<const CalibrationSample> samples) {
    if (samples.empty())
        throw std::domain_error("residual statistics over an empty sample set");
    double mean_y = 0.0;
    for (const auto& s : samples) mean_y += s.f_max_mhz;
    mean_y /= static_cast<double>(samples.size());

    double max_rel = 0.0, ss_res = 0.0, ss_tot = 0.0;
    for (const auto& s : samples) {
        const double pred = m.c_corr * s.f_pmb_mhz + m.f0_mhz;
        const double resid = pred - s.f_max_mhz;
        max_rel = std::max(max_rel, std::abs(resid) / s.f_max_mhz);
        ss_res += resid * resid;
        ss_tot += (s.f_max_mhz - mean_y) * (s.f_max_mhz - mean_y);
    }
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot
                                   : (ss_res == 0.0 ? 1.0 : 0.0);
    return {max_rel, r2};
}

/// Ordinary least squares of f_max on f_pmb. Requires at least two distinct
/// abscissae; equal weighting of all samples.
inline LinearPmbModel fit_linear(std::span<const CalibrationSample> samples,
                                 Awareness awareness = Awareness::ProcAwareTempAware) {
    if (samples.size() < 2)
        throw std::domain_error("linear fit needs at least 2 samples, got " +
                                std::to_string(samples.size()));
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& s : samples) {
        mean_x += s.f_pmb_mhz;
        mean_y += s.f_max_mhz;
    }
    const double n = static_cast<double>(samples.size());
    mean_x /= n;
    mean_y /= n;

    double sxx = 0.0, sxy = 0.0;
    for (const auto& s : samples) {
        const double dx = s.f_pmb_mhz - mean_x;
        sxx += dx * dx;
        sxy += dx * (s.f_max_mhz - mean_y);
    }
    if (sxx <= 0.0)
        throw std::domain_error("degenerate fit: all sensor readings identical");

    LinearPmbModel m;
    m.c_corr = sxy / sxx;
    m.f0_mhz = mean_y - m.c_corr * mean_x;
    m.awareness = awareness;
    m.vdd = samples.front().op.vdd;
    const ResidualStats st = residual_stats(m, samples);
    m.max_rel_error = st.max_rel_error;
    m.r_square = st.r_square;
    return m;
}

/// Pick the corner whose reference model disagrees least with the calibrated
/// one, as mean squared prediction difference integrated over the observed
/// sensor range. Ties break toward Slow, the safe assumption.
inline ProcessCorner classify_corner(
    const LinearPmbModel& calibrated,
    const std::map<ProcessCorner, LinearPmbModel>& references,
    double f_pmb_lo, double f_pmb_hi) {
    for (ProcessCorner c : {ProcessCorner::Fast, ProcessCorner::Typical,
                            ProcessCorner::Slow}) {
        auto it = references.find(c);
        if (it == references.end())
            throw std::runtime_error(std::string("reference model set is missing the ") +
                                     to_string(c) + " corner");
        if (std::abs(it->second.vdd - calibrated.vdd) > 1e-9)
            throw std::runtime_error(std::string("reference model for ") + to_string(c) +
                                     " is characterized at a different vdd");
    }

    constexpr int kGridPoints = 101;
    auto disagreement = [&](const LinearPmbModel& ref) {
        double acc = 0.0;
        for (int i = 0; i < kGridPoints; ++i) {
            const double x = f_pmb_lo + (f_pmb_hi - f_pmb_lo) * i / (kGridPoints - 1);
            const double d = (calibrated.c_corr - ref.c_corr) * x +
                             (calibrated.f0_mhz - ref.f0_mhz);
            acc += d * d;
        }
        return acc / kGridPoints;
    };

    // Evaluate Slow last so that exact ties resolve toward it.
    ProcessCorner best = ProcessCorner::Slow;
    double best_d = disagreement(references.at(ProcessCorner::Slow));
    for (ProcessCorner c : {ProcessCorner::Typical, ProcessCorner::Fast}) {
        const double d = disagreement(references.at(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

} // namespace bbsim

#endif
