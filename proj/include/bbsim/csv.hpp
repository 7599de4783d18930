#ifndef BBSIM_CSV_HPP
#define BBSIM_CSV_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bbsim/model_fit.hpp"
#include "bbsim/scenario.hpp"

namespace bbsim {

inline constexpr const char* kSampleCsvHeader =
    "chip_id,vdd_v,temp_c,vbb_v,f_pmb_mhz,f_max_mhz";
inline constexpr const char* kTraceCsvHeader =
    "t_s,temp_c,f_target_mhz,vbb_v,f_pmb_mhz,f_pred_mhz,f_true_mhz,"
    "i_lkg_ua,p_dyn_mw,p_tot_mw,event";

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double csv_number(const std::string& s, const std::string& origin, long line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error(origin + ":" + std::to_string(line) +
                                 ": not a number: '" + s + "'");
    }
}

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file '" + path + "'");
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    return out;
}

} // namespace detail

// --- calibration samples ----------------------------------------------------

inline void write_samples_csv(std::ostream& out,
                              const std::vector<CalibrationSample>& samples) {
    out << kSampleCsvHeader << "\n";
    for (const auto& s : samples)
        out << s.chip_id << ',' << detail::fmt(s.op.vdd) << ','
            << detail::fmt(s.op.temp_c) << ',' << detail::fmt(s.vbb) << ','
            << detail::fmt(s.f_pmb_mhz) << ',' << detail::fmt(s.f_max_mhz) << "\n";
}

inline void write_samples_csv(const std::string& path,
                              const std::vector<CalibrationSample>& samples) {
    auto out = detail::open_output(path);
    write_samples_csv(out, samples);
}

inline std::vector<CalibrationSample> read_samples_csv(std::istream& in,
                                                       const std::string& origin) {
    std::vector<CalibrationSample> samples;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = detail::split_csv_line(line);
        if (line_no == 1 && f.size() >= 2 && f[1] == "vdd_v") continue; // header
        if (f.size() != 6)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": expected 6 columns, got " +
                                     std::to_string(f.size()));
        CalibrationSample s;
        s.chip_id = f[0];
        s.op.vdd = detail::csv_number(f[1], origin, line_no);
        s.op.temp_c = detail::csv_number(f[2], origin, line_no);
        s.vbb = detail::csv_number(f[3], origin, line_no);
        s.f_pmb_mhz = detail::csv_number(f[4], origin, line_no);
        s.f_max_mhz = detail::csv_number(f[5], origin, line_no);
        samples.push_back(std::move(s));
    }
    return samples;
}

inline std::vector<CalibrationSample> read_samples_csv(const std::string& path) {
    auto in = detail::open_input(path);
    return read_samples_csv(in, path);
}

// --- scenario traces ---------------------------------------------------------

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
    out << kTraceCsvHeader << "\n";
    char buf[256];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof(buf),
                      "%.3f,%.4f,%.4f,%.4f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,", r.t_s,
                      r.temp_c, r.f_target_mhz, r.vbb_v, r.f_pmb_mhz, r.f_pred_mhz,
                      r.f_true_mhz, r.i_lkg_ua, r.p_dyn_mw, r.p_tot_mw);
        out << buf << r.event << "\n";
    }
}

inline void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
    auto out = detail::open_output(path);
    write_trace_csv(out, trace);
}

inline std::vector<TraceRow> read_trace_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::vector<TraceRow> trace;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line_no == 1 && line.rfind("t_s,", 0) == 0) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 11)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 11 columns, got " +
                                     std::to_string(f.size()));
        TraceRow r;
        r.t_s = detail::csv_number(f[0], path, line_no);
        r.temp_c = detail::csv_number(f[1], path, line_no);
        r.f_target_mhz = detail::csv_number(f[2], path, line_no);
        r.vbb_v = detail::csv_number(f[3], path, line_no);
        r.f_pmb_mhz = detail::csv_number(f[4], path, line_no);
        r.f_pred_mhz = detail::csv_number(f[5], path, line_no);
        r.f_true_mhz = detail::csv_number(f[6], path, line_no);
        r.i_lkg_ua = detail::csv_number(f[7], path, line_no);
        r.p_dyn_mw = detail::csv_number(f[8], path, line_no);
        r.p_tot_mw = detail::csv_number(f[9], path, line_no);
        r.event = f[10];
        trace.push_back(std::move(r));
    }
    return trace;
}

// --- two-column time series (profiles, schedules) ----------------------------

inline std::vector<std::pair<double, double>> read_timeseries_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::vector<std::pair<double, double>> points;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 2)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 2 columns, got " +
                                     std::to_string(f.size()));
        if (line_no == 1 && f[0] == "t_s") continue; // optional header
        points.emplace_back(detail::csv_number(f[0], path, line_no),
                            detail::csv_number(f[1], path, line_no));
    }
    if (points.empty())
        throw std::runtime_error(path + ": no data rows");
    return points;
}

inline void write_timeseries_csv(const std::string& path, const char* header,
                                 const std::vector<std::pair<double, double>>& points) {
    auto out = detail::open_output(path);
    out << header << "\n";
    for (const auto& [t, v] : points)
        out << detail::fmt(t) << ',' << detail::fmt(v) << "\n";
}

} // namespace bbsim

#endif
