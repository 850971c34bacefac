#pragma once

#include "bregbox/bregman.hpp"
#include "bregbox/problems.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace bregbox {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& msg)
        : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct ScheduleSpec {
    std::string kind = "constant";  // constant | polynomial | explicit
    double c_alpha = 1.0;
    double s = 0.0;
    std::vector<double> values;
};

/// One experiment: benchmark, schedule, solver, stopping, output.
/// benchmark.name selects the canonical parameter set; explicit benchmark.*
/// keys override individual fields.
struct RunConfig {
    BenchmarkSpec benchmark = canonical_benchmark("bang_bang_asc");
    ScheduleSpec schedule;
    std::string solver = "pg";  // pg | pdas
    double tol = 1e-10;
    int k_max = 10000;
    double epsilon = -1.0;          // <0: auto (1e-8 ||z||)
    std::string theta_mode = "auto";  // auto | value
    double theta = -1.0;
    std::string output = "out";
    std::string mode = "bregman";  // bregman | ppm | both
    std::vector<double> sweep_s_values;  // sweep variants (polynomial exponents)
};

/// Flat "key = value" format with dotted sections and '#' comments. Unknown
/// or duplicate keys are rejected with a ConfigError naming the key.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Serializes a config (17 significant digits, lossless double round-trip).
std::string config_to_text(const RunConfig& cfg);

Schedule make_schedule(const ScheduleSpec& spec);
SolverConfig make_solver_config(const RunConfig& cfg);
StopRule make_stop_rule(const RunConfig& cfg);

}  // namespace bregbox
