#ifndef BBSIM_MARGINING_HPP
#define BBSIM_MARGINING_HPP

#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>

#include "bbsim/model_fit.hpp"

namespace bbsim {

/// Body-bias induced performance gain at one supply, as a fraction per 100 mV.
struct BbSlope {
    double vdd;            ///< V
    double gain_per_100mv; ///< e.g. 0.05 at 0.7 V
};

/// FBB margin that compensates a relative frequency-estimation error `err`:
/// err/gain * 100 mV, rounded up to the margin grid. Rounding is always
/// upward; undershoot is the failure mode the margin exists to prevent.
inline double margin_from_error(double err, const BbSlope& slope,
                                double granularity_v = 0.025) {
    if (err < 0.0)
        throw std::domain_error("negative error bound " + std::to_string(err));
    if (granularity_v <= 0.0)
        throw std::domain_error("margin granularity must be positive");
    const double raw = err / slope.gain_per_100mv * 0.1;
    const long steps = static_cast<long>(std::ceil(raw / granularity_v - 1e-9));
    return static_cast<double>(steps < 0 ? 0 : steps) * granularity_v;
}

/// Margins for independent error sources sum.
inline double compose_margins(std::span<const double> margins_v) {
    double total = 0.0;
    for (double m : margins_v) {
        if (m < 0.0)
            throw std::domain_error("negative margin " + std::to_string(m));
        total += m;
    }
    return total;
}

/// One row of the characterized margin table.
struct PolicyEntry {
    double f_err;            ///< worst-case relative frequency error
    double vbb_margin_v;     ///< FBB margin applied by the controller
    double leakage_overhead; ///< extra leakage vs ideal compensation
};

/// Awareness level -> (error bound, margin, leakage overhead) per supply.
/// These verbatim table entries are the controller's operative margins; the
/// slope-based margin_from_error path serves custom error budgets.
class MarginPolicy {
  public:
    void set(Awareness a, double vdd, PolicyEntry e) {
        table_[key(a, vdd)] = e;
    }

    const PolicyEntry& lookup(Awareness a, double vdd) const {
        auto it = table_.find(key(a, vdd));
        if (it == table_.end())
            throw std::domain_error(std::string("no margin policy for (") +
                                    to_string(a) + ", " + std::to_string(vdd) +
                                    " V)");
        return it->second;
    }

    bool has(Awareness a, double vdd) const {
        return table_.count(key(a, vdd)) != 0;
    }

  private:
    static std::pair<int, int> key(Awareness a, double vdd) {
        return {static_cast<int>(a), static_cast<int>(std::lround(vdd * 1000.0))};
    }
    std::map<std::pair<int, int>, PolicyEntry> table_;
};

} // namespace bbsim

#endif
