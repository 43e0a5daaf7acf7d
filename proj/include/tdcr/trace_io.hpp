#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "tdcr/scenario.hpp"

namespace tdcr {

inline constexpr const char* kTraceHeader =
    "iteration,t_s,tip_x_mm,tip_y_mm,tip_z_mm,tension_N,displacement_mm,error_mm,"
    "lyapunov,shoot_iters,shoot_residual";

// Shortest round-trip decimal form; locale-independent, so repeated runs
// produce byte-identical files.
inline std::string fmt(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

inline void write_trace_csv(const std::string& path, const SimTrace& trace) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open trace file for writing: " + path);
    out << kTraceHeader << "\n";
    for (const TraceRecord& r : trace.rows) {
        out << r.iteration << ',' << fmt(r.t) << ',' << fmt(r.tip_mm.x()) << ','
            << fmt(r.tip_mm.y()) << ',' << fmt(r.tip_mm.z()) << ',' << fmt(r.tension_n) << ','
            << fmt(r.displacement_mm) << ',' << fmt(r.error_mm) << ',' << fmt(r.lyapunov) << ','
            << r.shoot_iterations << ',' << fmt(r.shoot_residual) << "\n";
    }
}

namespace io_detail {

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

inline double parse_double(const std::string& s, int line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw TraceParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

inline int parse_int(const std::string& s, int line_no) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw TraceParseError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    return v;
}

}  // namespace io_detail

/// Read a trace CSV back. The initial (pre-run) tip position is not part of
/// the file, so the result is suitable for plotting, not for recomputing TPL.
inline SimTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TraceParseError("cannot open trace file: " + path);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw TraceParseError("line 1: empty trace file");
    ++line_no;
    if (line != kTraceHeader)
        throw TraceParseError("line 1: unexpected header '" + line + "'");

    SimTrace trace;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = io_detail::split(line);
        if (f.size() != 11)
            throw TraceParseError("line " + std::to_string(line_no) + ": expected 11 fields, got " +
                                  std::to_string(f.size()));
        TraceRecord r;
        r.iteration = io_detail::parse_int(f[0], line_no);
        r.t = io_detail::parse_double(f[1], line_no);
        r.tip_mm = Vec3(io_detail::parse_double(f[2], line_no),
                        io_detail::parse_double(f[3], line_no),
                        io_detail::parse_double(f[4], line_no));
        r.tension_n = io_detail::parse_double(f[5], line_no);
        r.displacement_mm = io_detail::parse_double(f[6], line_no);
        r.error_mm = io_detail::parse_double(f[7], line_no);
        r.lyapunov = io_detail::parse_double(f[8], line_no);
        r.shoot_iterations = io_detail::parse_int(f[9], line_no);
        r.shoot_residual = io_detail::parse_double(f[10], line_no);
        trace.rows.push_back(r);
    }
    if (trace.rows.empty()) throw TraceParseError("line 1: trace has no data rows");
    return trace;
}

inline void write_shapes_csv(const std::string& path, const SimTrace& trace) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open shapes file for writing: " + path);
    out << "iteration,node,x_mm,y_mm,z_mm\n";
    for (std::size_t k = 0; k < trace.shapes.size(); ++k)
        for (std::size_t j = 0; j < trace.shapes[k].size(); ++j) {
            const Vec3& p = trace.shapes[k][j];
            out << k << ',' << j << ',' << fmt(p.x()) << ',' << fmt(p.y()) << ','
                << fmt(p.z()) << "\n";
        }
}

/// Shape centerlines indexed by iteration (0 = initial configuration).
inline std::vector<std::vector<Vec3>> read_shapes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TraceParseError("cannot open shapes file: " + path);
    std::string line;
    int line_no = 1;
    if (!std::getline(in, line) || line != "iteration,node,x_mm,y_mm,z_mm")
        throw TraceParseError("line 1: unexpected shapes header");
    std::vector<std::vector<Vec3>> shapes;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = io_detail::split(line);
        if (f.size() != 5)
            throw TraceParseError("line " + std::to_string(line_no) + ": expected 5 fields");
        const std::size_t k = static_cast<std::size_t>(io_detail::parse_int(f[0], line_no));
        if (shapes.size() <= k) shapes.resize(k + 1);
        shapes[k].emplace_back(io_detail::parse_double(f[2], line_no),
                               io_detail::parse_double(f[3], line_no),
                               io_detail::parse_double(f[4], line_no));
    }
    if (shapes.empty()) throw TraceParseError("shapes file has no data rows");
    return shapes;
}

inline nlohmann::json metrics_to_json(const MetricsReport& m) {
    return {{"tpl_mm", m.tpl_mm},
            {"settling_iterations", m.settling_iterations},
            {"overshoot_percent", m.overshoot_percent},
            {"rise_iterations", m.rise_iterations},
            {"steady_state_error_mm", m.steady_state_error_mm}};
}

inline void write_summary_json(const std::string& path, const nlohmann::json& resolved_config,
                               const MetricsReport& metrics, const SimTrace& trace,
                               const std::string& trace_file) {
    int max_iters = 0;
    double max_residual = 0.0;
    for (const TraceRecord& r : trace.rows) {
        max_iters = std::max(max_iters, r.shoot_iterations);
        max_residual = std::max(max_residual, r.shoot_residual);
    }
    nlohmann::json doc;
    doc["config"] = resolved_config;
    doc["metrics"] = metrics_to_json(metrics);
    doc["trace_file"] = trace_file;
    doc["initial_tip_mm"] = {trace.initial_tip_mm.x(), trace.initial_tip_mm.y(),
                             trace.initial_tip_mm.z()};
    const TraceRecord& last = trace.rows.back();
    doc["final"] = {{"iteration", last.iteration},
                    {"tip_mm", {last.tip_mm.x(), last.tip_mm.y(), last.tip_mm.z()}},
                    {"tension_n", last.tension_n},
                    {"displacement_mm", last.displacement_mm},
                    {"error_mm", last.error_mm}};
    doc["solver"] = {{"max_shoot_iterations", max_iters}, {"max_residual", max_residual}};
    std::ofstream out(path);
    if (!out) throw Error("cannot open summary file for writing: " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace tdcr
