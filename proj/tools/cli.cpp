#include "gwpcor/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gwpcor/analysis.hpp"
#include "gwpcor/memory_probe.hpp"
#include "gwpcor/service.hpp"
#include "gwpcor/synth.hpp"

namespace gwpcor::cli {

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int)
{
    g_interrupted = true;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MalformedInput, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::MalformedInput, "cannot write '" + path + "'");
    out << contents;
    if (!out) throw Error(ErrorKind::MalformedInput, "failed writing '" + path + "'");
}

bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

struct ComputeFlags {
    std::string input;
    std::string pair;
    std::vector<std::string> controls;
    std::string mode;
    std::string method;
    std::string kernel;
    double bandwidth = 0.0;
    double alpha = 0.01;
    std::string output;
    std::string x_col = "x";
    std::string y_col = "y";
    bool assume_planar = false;
    int threads = 0;
};

int cmd_compute(const ComputeFlags& f, std::ostream& out, std::ostream& err)
{
    AnalysisSpec spec;
    try {
        const auto pair = parse_pair(f.pair);
        spec.var_a = pair.first;
        spec.var_b = pair.second;
        spec.controls = f.controls;
        spec.mode = parse_mode(f.mode);
        spec.method = parse_method(f.method);
        spec.kernel = parse_kernel(f.kernel);
        spec.bandwidth = BandwidthSpec(f.bandwidth);
        spec.validate();
        if (f.alpha != 0.01 && f.alpha != 0.05) throw Error(ErrorKind::InvalidSpec, "--alpha must be 0.01 or 0.05");
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    const auto mode = f.assume_planar ? CoordinateMode::Planar : CoordinateMode::Auto;
    Dataset dataset;
    try {
        const std::string bytes = read_file(f.input);
        dataset = ends_with(f.input, ".csv") ? parse_point_csv(bytes, f.x_col, f.y_col, mode)
                                             : parse_geojson(bytes, mode);
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return kExitData;
    }

    try {
        ComputeOptions options;
        options.threads = f.threads;
        const auto outcome = run_analysis(dataset, spec, options);
        const NamePair shown{spec.var_a, spec.var_b};
        const auto summary = summarize(outcome, shown);
        write_file(f.output, serialize_result(dataset, outcome.surface, shown.first, shown.second, outcome.kept));
        out << summary_to_text(summary, spec);
        out << "significant at alpha=" << f.alpha << ": "
            << (f.alpha == 0.01 ? summary.significant_001 : summary.significant_005) << " of " << summary.n_valid
            << '\n';
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code(e.kind());
    }
    return kExitOk;
}

struct ServeFlags {
    std::string host = "0.0.0.0";
    int port = 8080;
    std::string tiles_url;
    std::string static_dir;
    double max_body_mb = 64.0;
    double timeout_s = 120.0;
    std::size_t datasets = 8;
    int threads = 0;
};

int cmd_serve(const ServeFlags& f, std::ostream& out, std::ostream& err)
{
    ServiceConfig config;
    config.tiles_url = f.tiles_url;
    config.max_body_bytes = static_cast<std::size_t>(f.max_body_mb * 1024.0 * 1024.0);
    config.timeout = std::chrono::milliseconds(static_cast<long long>(f.timeout_s * 1000.0));
    config.dataset_capacity = f.datasets;
    config.threads = f.threads;

    Service service(config);
    HttpServer server(service, f.static_dir);
    const auto port = server.bind(f.host, f.port);
    if (!port) {
        err << "error: cannot bind " << f.host << ':' << f.port << '\n';
        return kExitData;
    }
    out << "serving on http://" << f.host << ':' << *port << '\n' << std::flush;

    g_interrupted = false;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::thread watcher([&server] {
        while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        server.stop();
    });
    server.listen_after_bind();
    g_interrupted = true;
    watcher.join();
    std::signal(SIGINT, SIG_DFL);
    std::signal(SIGTERM, SIG_DFL);
    out << "shut down\n";
    return kExitOk;
}

std::vector<std::size_t> parse_sizes(const std::string& text)
{
    std::vector<std::size_t> sizes;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &pos);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidSpec, "bad size '" + item + "'");
        }
        if (pos != item.size() || v < 10) throw Error(ErrorKind::InvalidSpec, "sizes must be integers >= 10");
        if (!sizes.empty() && static_cast<std::size_t>(v) <= sizes.back()) {
            throw Error(ErrorKind::InvalidSpec, "sizes must be strictly increasing");
        }
        sizes.push_back(static_cast<std::size_t>(v));
    }
    if (sizes.empty()) throw Error(ErrorKind::InvalidSpec, "no sizes given");
    return sizes;
}

} // namespace

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidSpec:
        return kExitUsage;
    case ErrorKind::MalformedInput:
    case ErrorKind::MixedGeometry:
    case ErrorKind::EmptyCollection:
    case ErrorKind::FewerThanThreeFeatures:
    case ErrorKind::MissingColumn:
    case ErrorKind::NonNumericCoordinate:
    case ErrorKind::SpecMismatch:
    case ErrorKind::TooFewComplete:
        return kExitData;
    default:
        return kExitCompute;
    }
}

std::vector<BenchRow> run_bench(const BenchOptions& options)
{
    std::vector<BenchRow> rows;
    for (std::size_t n : options.sizes) {
        const Dataset dataset = synth_dataset(n, options.vars, options.seed);
        const DataMatrix data(dataset.variable_names(), dataset.columns);
        const auto names = dataset.variable_names();
        ComputeOptions compute;
        compute.threads = options.threads;

        PeakMemoryProbe probe;
        probe.reset();
        const auto start = std::chrono::steady_clock::now();
        for (const auto& pair : all_pairs(names.size())) {
            AnalysisSpec spec;
            spec.var_a = names[pair.first];
            spec.var_b = names[pair.second];
            spec.kernel = options.kernel;
            spec.bandwidth = BandwidthSpec(options.bandwidth);
            const auto surface = compute_surface(data, dataset.coords, spec, compute);
            if (surface.per_location.size() != n) throw Error(ErrorKind::IndexMismatch, "surface length mismatch");
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back({n, wall, probe.peak_delta_mb()});
    }
    return rows;
}

double fit_power_exponent(std::span<const BenchRow> rows)
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double k = static_cast<double>(rows.size());
    for (const auto& r : rows) {
        const double x = std::log(static_cast<double>(r.n));
        const double y = std::log(r.wall_s);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

std::string bench_csv(std::span<const BenchRow> rows)
{
    std::ostringstream out;
    out << "n,wall_s,peak_mb\n";
    out << std::setprecision(6);
    for (const auto& r : rows) out << r.n << ',' << r.wall_s << ',' << r.peak_mb << '\n';
    return out.str();
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Geographically weighted correlation and partial correlation surfaces"};
    app.require_subcommand(1);

    ComputeFlags cf;
    auto* compute = app.add_subcommand("compute", "Compute a GW surface and write a GeoJSON result");
    compute->add_option("--input", cf.input, "GeoJSON or CSV (.csv) input")->required();
    compute->add_option("--pair", cf.pair, "Variable pair A,B")->required();
    compute->add_option("--control", cf.controls, "Control variable (repeatable)");
    compute->add_option("--mode", cf.mode, "corr | pcorr")->required();
    compute->add_option("--method", cf.method, "pearson | spearman")->required();
    compute->add_option("--kernel", cf.kernel, "gaussian | exponential | boxcar | bisquare | tricube")->required();
    compute->add_option("--bandwidth", cf.bandwidth, "Adaptive bandwidth proportion in (0, 1]")->required();
    compute->add_option("--alpha", cf.alpha, "Significance level reported in the summary (0.01 | 0.05)");
    compute->add_option("--output", cf.output, "Result GeoJSON path")->required();
    compute->add_option("--x-col", cf.x_col, "CSV x column");
    compute->add_option("--y-col", cf.y_col, "CSV y column");
    compute->add_flag("--assume-planar", cf.assume_planar, "Never treat coordinates as lon/lat");
    compute->add_option("--threads", cf.threads, "Worker threads (0 = all)");

    ServeFlags sf;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API and web UI");
    serve->add_option("--host", sf.host);
    serve->add_option("--port", sf.port);
    serve->add_option("--tiles-url", sf.tiles_url, "Base-map tile URL relayed to the UI");
    serve->add_option("--static-dir", sf.static_dir, "Directory with the built web UI");
    serve->add_option("--max-body-mb", sf.max_body_mb);
    serve->add_option("--timeout-s", sf.timeout_s);
    serve->add_option("--datasets", sf.datasets, "Datasets kept in memory (LRU)");
    serve->add_option("--threads", sf.threads);

    BenchOptions bo;
    std::string sizes = "100,1000,10000";
    std::string bench_kernel = "bisquare";
    std::string bench_output;
    auto* bench = app.add_subcommand("bench", "Time surface computation on synthetic data");
    bench->add_option("--sizes", sizes, "Comma-separated, strictly increasing, each >= 10");
    bench->add_option("--vars", bo.vars);
    bench->add_option("--kernel", bench_kernel);
    bench->add_option("--bandwidth", bo.bandwidth);
    bench->add_option("--seed", bo.seed);
    bench->add_option("--threads", bo.threads);
    bench->add_option("--output", bench_output, "CSV report path");

    std::size_t synth_n = 500;
    std::size_t synth_m = 3;
    std::uint64_t synth_seed = 1;
    std::string synth_format = "geojson";
    std::string synth_output;
    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
    synth->add_option("--n", synth_n);
    synth->add_option("--vars", synth_m);
    synth->add_option("--seed", synth_seed);
    synth->add_option("--format", synth_format)->check(CLI::IsMember({"geojson", "csv"}));
    synth->add_option("--output", synth_output)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (compute->parsed()) return cmd_compute(cf, out, err);
    if (serve->parsed()) return cmd_serve(sf, out, err);

    if (bench->parsed()) {
        try {
            bo.sizes = parse_sizes(sizes);
            bo.kernel = parse_kernel(bench_kernel);
            BandwidthSpec check(bo.bandwidth);
            if (bo.vars < 2) throw Error(ErrorKind::InvalidSpec, "--vars must be at least 2");
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return kExitUsage;
        }
        try {
            const auto rows = run_bench(bo);
            out << std::setw(8) << "n" << std::setw(12) << "wall_s" << std::setw(12) << "peak_mb" << '\n';
            for (const auto& r : rows) {
                out << std::setw(8) << r.n << std::setw(12) << std::setprecision(4) << r.wall_s << std::setw(12)
                    << r.peak_mb << '\n';
            }
            if (rows.size() >= 2) out << "fitted exponent: " << fit_power_exponent(rows) << '\n';
            if (!bench_output.empty()) write_file(bench_output, bench_csv(rows));
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return exit_code(e.kind());
        }
        return kExitOk;
    }

    if (synth->parsed()) {
        try {
            const auto dataset = synth_dataset(synth_n, synth_m, synth_seed);
            write_file(synth_output, synth_format == "csv" ? write_point_csv(dataset) : write_geojson(dataset));
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return exit_code(e.kind());
        }
        return kExitOk;
    }
    return kExitUsage;
}

} // namespace gwpcor::cli
