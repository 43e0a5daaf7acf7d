// Command-line front end: closed-loop simulation runs, controller comparison
// tables, and SVG plots of traces and rod shapes.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdcr/tdcr.hpp"

namespace fs = std::filesystem;
using namespace tdcr;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct SimulateResult {
    SimTrace trace;
    MetricsReport metrics;
    RunConfig config;
};

SimulateResult run_from_config(const RunConfig& cfg) {
    SimulateResult res;
    res.config = cfg;
    res.trace = run_closed_loop(cfg.control, cfg.scenario, cfg.horizon, cfg.rod, cfg.tendons,
                                cfg.dt, cfg.alpha, cfg.reference, cfg.shooting,
                                cfg.store_shapes);
    res.metrics = compute_metrics(res.trace, 1000.0 * cfg.reference.amplitude);
    return res;
}

void apply_overrides(RunConfig& cfg, int horizon, const std::string& out_dir, bool store_shapes) {
    if (horizon > 0) {
        cfg.horizon = horizon;
        cfg.resolved["horizon"] = horizon;
    }
    if (!out_dir.empty()) {
        cfg.out_dir = out_dir;
        cfg.resolved["output"]["dir"] = out_dir;
    }
    if (store_shapes) {
        cfg.store_shapes = true;
        cfg.resolved["output"]["store_shapes"] = true;
    }
}

void print_metrics_table(const std::vector<std::string>& names,
                         const std::vector<MetricsReport>& reports) {
    std::printf("%-28s", "criteria");
    for (const std::string& n : names) std::printf("  %18s", n.c_str());
    std::printf("\n");
    auto row = [&](const char* label, auto getter, const char* fmt_spec) {
        std::printf("%-28s", label);
        for (const MetricsReport& r : reports) std::printf(fmt_spec, getter(r));
        std::printf("\n");
    };
    row("TPL (mm)", [](const MetricsReport& r) { return r.tpl_mm; }, "  %18.2f");
    row("settling (5%, iterations)",
        [](const MetricsReport& r) { return double(r.settling_iterations); }, "  %18.0f");
    row("overshoot (%)", [](const MetricsReport& r) { return r.overshoot_percent; }, "  %18.1f");
    row("rise 0-90% (iterations)",
        [](const MetricsReport& r) { return double(r.rise_iterations); }, "  %18.0f");
    row("steady-state error (mm)",
        [](const MetricsReport& r) { return r.steady_state_error_mm; }, "  %18.3f");
}

int cmd_simulate(const std::string& config_path, int horizon, const std::string& out_dir,
                 bool store_shapes, bool dry_run) {
    RunConfig cfg = load_run_config(config_path);
    apply_overrides(cfg, horizon, out_dir, store_shapes);
    if (dry_run) {
        std::cout << cfg.resolved.dump(2) << "\n";
        return 0;
    }

    SimulateResult res = run_from_config(cfg);

    fs::create_directories(cfg.out_dir);
    const std::string trace_file = (fs::path(cfg.out_dir) / (cfg.name + ".csv")).string();
    write_trace_csv(trace_file, res.trace);
    if (cfg.store_shapes)
        write_shapes_csv((fs::path(cfg.out_dir) / (cfg.name + "_shapes.csv")).string(),
                         res.trace);
    write_summary_json((fs::path(cfg.out_dir) / (cfg.name + "_summary.json")).string(),
                       cfg.resolved, res.metrics, res.trace, trace_file);

    const TraceRecord& last = res.trace.rows.back();
    std::printf("%s: %d iterations, final tip (%.2f, %.2f, %.2f) mm, error %.3f mm\n",
                cfg.name.c_str(), last.iteration, last.tip_mm.x(), last.tip_mm.y(),
                last.tip_mm.z(), last.error_mm);
    print_metrics_table({cfg.name}, {res.metrics});
    std::printf("trace written to %s\n", trace_file.c_str());
    return 0;
}

int cmd_compare(const std::string& config_a, const std::string& config_b, int horizon,
                const std::string& out_dir) {
    RunConfig a = load_run_config(config_a);
    RunConfig b = load_run_config(config_b);
    apply_overrides(a, horizon, out_dir, false);
    apply_overrides(b, horizon, out_dir, false);
    if (a.resolved.at("scenario") != b.resolved.at("scenario"))
        throw ConfigError("compare: configs must share a scenario");

    SimulateResult ra = run_from_config(a);
    SimulateResult rb = run_from_config(b);

    print_metrics_table({a.name, b.name}, {ra.metrics, rb.metrics});

    fs::create_directories(a.out_dir);
    nlohmann::json doc;
    doc["a"] = {{"name", a.name}, {"config", a.resolved}, {"metrics", metrics_to_json(ra.metrics)}};
    doc["b"] = {{"name", b.name}, {"config", b.resolved}, {"metrics", metrics_to_json(rb.metrics)}};
    const std::string out_file =
        (fs::path(a.out_dir) / ("compare_" + a.name + "_vs_" + b.name + ".json")).string();
    std::ofstream out(out_file);
    out << doc.dump(2) << "\n";
    std::printf("comparison written to %s\n", out_file.c_str());
    return 0;
}

int cmd_plot(const std::vector<std::string>& trace_paths, const std::string& out_dir) {
    struct Panel {
        const char* suffix;
        const char* title;
        const char* ylabel;
        double TraceRecord::*scalar;
        bool from_tip_x, from_tip_z;
    };
    const Panel panels[] = {
        {"tip_x", "Tip x vs. iteration", "x (mm)", nullptr, true, false},
        {"tip_z", "Tip z vs. iteration", "z (mm)", nullptr, false, true},
        {"displacement", "Tendon displacement", "displacement (mm)",
         &TraceRecord::displacement_mm, false, false},
        {"error", "Position error", "error (mm)", &TraceRecord::error_mm, false, false},
    };

    std::vector<SimTrace> traces;
    std::vector<std::string> stems;
    for (const std::string& p : trace_paths) {
        traces.push_back(read_trace_csv(p));
        stems.push_back(fs::path(p).stem().string());
    }

    const std::string base = traces.size() == 1 ? stems[0] : "overlay";
    fs::create_directories(out_dir.empty() ? "." : out_dir);
    for (const Panel& panel : panels) {
        std::vector<PlotSeries> series;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            PlotSeries s;
            s.label = stems[i];
            for (const TraceRecord& r : traces[i].rows) {
                s.x.push_back(r.iteration);
                if (panel.from_tip_x) s.y.push_back(r.tip_mm.x());
                else if (panel.from_tip_z) s.y.push_back(r.tip_mm.z());
                else s.y.push_back(r.*panel.scalar);
            }
            series.push_back(std::move(s));
        }
        const std::string file =
            (fs::path(out_dir.empty() ? "." : out_dir) / (base + "_" + panel.suffix + ".svg"))
                .string();
        write_line_plot_svg(file, panel.title, "iteration", panel.ylabel, series);
        std::printf("wrote %s\n", file.c_str());
    }
    return 0;
}

int cmd_rodshape(const std::string& trace_path, const std::string& config_path, int every,
                 const std::string& out_dir) {
    RunConfig cfg = load_run_config(config_path);
    fs::path shapes_path = trace_path;
    shapes_path.replace_filename(fs::path(trace_path).stem().string() + "_shapes.csv");
    if (!fs::exists(shapes_path))
        throw Error("no stored shapes for this trace (" + shapes_path.string() +
                    "); rerun simulate with --store-shapes");
    const auto shapes = read_shapes_csv(shapes_path.string());

    std::vector<std::pair<int, std::vector<Vec3>>> selected;
    const int last = static_cast<int>(shapes.size()) - 1;
    for (int k = 0; k <= last; k += every)
        selected.emplace_back(k, shapes[k]);
    if (selected.empty() || selected.back().first != last)
        selected.emplace_back(last, shapes[last]);
    if (every > last && last > 0) {
        // single final shape when the stride exceeds the horizon
        selected.clear();
        selected.emplace_back(last, shapes[last]);
    }

    fs::create_directories(out_dir.empty() ? "." : out_dir);
    const std::string file = (fs::path(out_dir.empty() ? "." : out_dir) /
                              (fs::path(trace_path).stem().string() + "_shapes.svg"))
                                 .string();
    write_rodshape_svg(file, selected,
                       "Rod configurations every " + std::to_string(every) + " iterations (" +
                           cfg.name + ")");
    std::printf("wrote %s\n", file.c_str());
    return 0;
}

int cmd_validate(const std::string& config_path) {
    RunConfig cfg = load_run_config(config_path);
    std::cout << cfg.resolved.dump(2) << "\n";
    std::printf("config ok: %s\n", cfg.name.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tendon-driven continuum robot dynamics and tip control"};
    app.require_subcommand(1);

    std::string config_path, out_dir, config_a, config_b, trace_path;
    std::vector<std::string> trace_paths;
    int horizon = 0, every = 5;
    bool store_shapes = false, dry_run = false;

    CLI::App* sim = app.add_subcommand("simulate", "Run one closed-loop simulation");
    sim->add_option("--config", config_path, "JSON run configuration")->required();
    sim->add_option("--out", out_dir, "output directory override");
    sim->add_option("--horizon", horizon, "iteration count override");
    sim->add_flag("--store-shapes", store_shapes, "store full rod centerlines");
    sim->add_flag("--dry-run", dry_run, "validate and print the resolved config only");

    CLI::App* cmp = app.add_subcommand("compare", "Run two configs and tabulate the metrics");
    cmp->add_option("config_a", config_a, "first config")->required();
    cmp->add_option("config_b", config_b, "second config")->required();
    cmp->add_option("--out", out_dir, "output directory override");
    cmp->add_option("--horizon", horizon, "iteration count override");

    CLI::App* plt = app.add_subcommand("plot", "Emit the four SVG panels for trace file(s)");
    plt->add_option("traces", trace_paths, "trace CSV file(s)")->required();
    plt->add_option("--out", out_dir, "output directory");

    CLI::App* rs = app.add_subcommand("rodshape", "Overlay rod centerlines from stored shapes");
    rs->add_option("trace", trace_path, "trace CSV (with sibling _shapes.csv)")->required();
    rs->add_option("--config", config_path, "JSON run configuration")->required();
    rs->add_option("--every", every, "stride in iterations")->check(CLI::PositiveNumber);
    rs->add_option("--out", out_dir, "output directory");

    CLI::App* val = app.add_subcommand("validate", "Validate a config and print it resolved");
    val->add_option("--config", config_path, "JSON run configuration")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, horizon, out_dir, store_shapes, dry_run);
        if (cmp->parsed()) return cmd_compare(config_a, config_b, horizon, out_dir);
        if (plt->parsed()) return cmd_plot(trace_paths, out_dir);
        if (rs->parsed()) return cmd_rodshape(trace_path, config_path, every, out_dir);
        if (val->parsed()) return cmd_validate(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NonConvergenceError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const SingularSystemError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const DivergenceError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
