#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "heatlab/config.hpp"

namespace heatlab {

enum ExitCode { exit_ok = 0, exit_config = 1, exit_numeric = 2, exit_verify = 3 };

struct TaskOutcome {
    int exit_code = exit_ok;
    std::string message;
    std::string report_json;  // serialized report.json contents ("{}" on failure)
    std::string out_dir;
};

// HEATLAB_OUT, when set and non-empty, replaces cfg.out_dir.
std::string resolve_out_dir(const TaskConfig& cfg);

// Runs the configured task, writing its files into out_dir.
TaskOutcome execute_task(const TaskConfig& cfg, const std::string& out_dir);
TaskOutcome run_config_file(const std::string& path);

// Runs every *.cfg in dir (sorted by name) into <out>/<config hash>/ and merges
// the reports into <out>/sweep.json; returns the largest child exit code.
int sweep(const std::string& dir, std::ostream& log);

struct VerifyLine {
    std::string module;
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<VerifyLine> run_verify_suites(std::uint64_t seed);
void print_verify_table(const std::vector<VerifyLine>& lines, std::ostream& os);

}  // namespace heatlab
