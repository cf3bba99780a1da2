#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "heatlab/heat_solver.hpp"

namespace heatlab {

enum class TaskKind { geometry, iso, fk, bounds, solve, pipeline, verify };
enum class WeightKind { none, two_end };
enum class OutputFormat { csv, json };

const char* to_string(TaskKind k);

// Sectioned key=value configuration. Sections: [model] [minus] [task] [grid]
// [time] [output] [calibration] [verify]; tokens may follow the section header
// on the same line, `#` starts a comment. Unset optionals take task defaults.
struct TaskConfig {
    std::string model = "family=exp_alpha alpha=0.5 n=2";
    std::string minus = "family=hyperbolic n=2";
    WeightKind weight = WeightKind::none;
    TaskKind task = TaskKind::geometry;
    double source = 0.0;  // delta position for task=solve

    std::optional<double> r_min, r_max, dt, ratio;
    std::optional<int> nodes, rannacher_startup_steps;
    Spacing spacing = Spacing::uniform;
    Scheme scheme = Scheme::crank_nicolson;
    BoundaryCondition left_bc = BoundaryCondition::neumann;
    BoundaryCondition far_bc = BoundaryCondition::dirichlet;
    bool auto_extend = false;

    std::optional<double> t_start, t_end;
    std::optional<int> t_steps;
    bool log_spaced = true;

    std::string out_dir = "heatlab_out";
    OutputFormat format = OutputFormat::csv;

    std::optional<double> anchor;
    double fk_c = 1.0;
    double fk_Q = 1.05;

    std::uint64_t seed = 42;

    bool operator==(const TaskConfig&) const = default;
};

// Throws ConfigError (with the line number when one applies).
TaskConfig parse_config(const std::string& text);
TaskConfig load_config(const std::string& path);
std::string render_config(const TaskConfig& cfg);

// Time grid from the [time] keys; empty when they are absent.
std::vector<double> config_times(const TaskConfig& cfg);

// FNV-1a 64 of the rendered config, as 16 hex digits.
std::string config_hash(const TaskConfig& cfg);

}  // namespace heatlab
