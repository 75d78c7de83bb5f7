#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gwpcor/error.hpp"
#include "gwpcor/spatial_weights.hpp"

namespace gwpcor::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitCompute = 4;

/// Exit code for a library error: 2 invalid flags, 3 data errors, 4 compute errors.
int exit_code(ErrorKind kind);

struct BenchOptions {
    std::vector<std::size_t> sizes{100, 1000, 10000};
    std::size_t vars = 3;
    KernelKind kernel = KernelKind::Bisquare;
    double bandwidth = 0.2;
    std::uint64_t seed = 1;
    int threads = 0;
};

struct BenchRow {
    std::size_t n = 0;
    double wall_s = 0.0;
    double peak_mb = 0.0;
};

/// Times GW correlation over every variable pair of synth_dataset(n, vars, seed)
/// for each size. Data generation is excluded from the timing.
std::vector<BenchRow> run_bench(const BenchOptions& options);

/// Least-squares slope of log(wall_s) against log(n).
double fit_power_exponent(std::span<const BenchRow> rows);

std::string bench_csv(std::span<const BenchRow> rows);

/// Entry point behind the gwpcor executable.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace gwpcor::cli
