#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nd/io.hpp"

namespace ndcli {

enum ExitCode : int {
    kExitPass = 0,
    kExitFailure = 1,
    kExitSoftViolation = 2,
    kExitUsage = 64,
    kExitFileError = 66,
};

/// Everything a run depends on. Embedded in every report, so a report can be
/// re-executed from itself. Thread count is deliberately absent.
struct RunConfig {
    std::string verb;  // "space gen", "verify theorem", ...

    std::string space_file;
    std::string builtin;  // "kind:param"
    std::string kind;     // space gen
    long size = 0;

    std::optional<double> n;
    double alpha = 0.25;
    double beta = 0.5;
    double gamma = 1.0;
    double delta = 0.5;
    std::optional<double> r_min;
    std::optional<double> epsilon;
    std::optional<double> r0;
    double tolerance = 1e-10;
    std::uint64_t triple_budget = 512ull * 512ull * 512ull;

    std::string kernel;
    std::string table_file;
    std::string op;
    std::string function_file;
    std::optional<long> function_index;
    double constant = 1.0;
    std::optional<long> x0;

    std::string family = "distance_powers";
    long count = 8;
    std::uint64_t seed = 1;
    long grid_count = 16;
    int theorem = 0;

    std::vector<long> bench_sizes{64, 128, 256};
    std::vector<long> bench_threads{1, 2, 4, 8};
    long repeats = 3;

    std::string report_file;  // replay
};

nd::Json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nd::Json& document);

struct Outcome {
    nd::Json report;
    std::string csv;  // plot-ready extract
    int exit_code = kExitPass;
    std::vector<std::string> messages;  // for stderr
    std::string timings_csv;            // bench only; nondeterministic
};

/// Runs one configured command. Library errors propagate as exceptions.
Outcome execute(const RunConfig& config);

/// Full command-line entry point: parsing, dispatch, output files, exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ndcli
