#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "billiard/statistics.hpp"

namespace billiard {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitUsage = 2 };

struct RunOptions {
    std::size_t n = 5000;
    std::uint64_t seed = 0;
    std::size_t checkpoints = 50;
    CheckpointSpacing spacing = CheckpointSpacing::log;
    std::size_t bootstrap = kDefaultBootstrapResamples;
    double ci_level = kDefaultCiLevel;
    unsigned workers = 0;  // 0 = all cores
    std::filesystem::path out_dir = "out";
};

struct RunRequest {
    std::string scenario;                       // builtin name
    std::optional<std::filesystem::path> config;  // or a config file
    RunOptions options;
};

struct CompareRequest {
    std::vector<std::string> scenarios;  // builtin names or config paths
    RunOptions options;
};

/// CSV with header `n,p1,p2,p12,p1p2`, 17 significant digits, LF endings.
std::string format_trace_csv(const ConvergenceTrace& trace);
void write_trace_csv(const ConvergenceTrace& trace, const std::filesystem::path& path);

using LabelledReport = std::pair<std::string, CorrelationReport>;

/// CSV with header
/// `scenario,n,p1,p2,p12,p1p2,delta,ci_halfwidth,ci_level,significant`.
std::string format_report_csv(const std::vector<LabelledReport>& rows);
void write_report_csv(const std::vector<LabelledReport>& rows, const std::filesystem::path& path);

/// Runs one scenario; writes trace.csv and report.csv into out_dir.
int cmd_run(const RunRequest& request, std::ostream& out, std::ostream& err);

/// Runs each scenario with the same N and seed; writes compare.csv plus one
/// trace_<label>.csv per scenario.
int cmd_compare(const CompareRequest& request, std::ostream& out, std::ostream& err);

/// Lists the builtin scenarios and their parameters.
int cmd_scenarios(std::ostream& out);

/// Full command-line entry point. Returns 0, 1 (internal error) or 2 (usage
/// or configuration error).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace billiard
