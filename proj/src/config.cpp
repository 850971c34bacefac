#include "bregbox/config.hpp"

#include "bregbox/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace bregbox {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError(key, "expected a number, got '" + value + "'");
    return v;
}

long parse_int(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError(key, "expected an integer, got '" + value + "'");
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError(key, "empty list entry");
        out.push_back(parse_number(key, item));
    }
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
        if (kv.count(key)) throw ConfigError(key, "duplicate key");
        kv[key] = value;
    }

    RunConfig cfg;
    // benchmark.name first: it selects the canonical defaults the remaining
    // benchmark.* keys override
    if (auto it = kv.find("benchmark.name"); it != kv.end()) {
        try {
            cfg.benchmark = canonical_benchmark(it->second);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("benchmark.name", e.what());
        }
        kv.erase(it);
    }

    for (const auto& [key, value] : kv) {
        if (key == "benchmark.n") {
            const long n = parse_int(key, value);
            if (n < 2) throw ConfigError(key, "grid size must be >= 2");
            cfg.benchmark.n = static_cast<int>(n);
        } else if (key == "benchmark.op") {
            if (value != "poisson1d" && value != "fredholm")
                throw ConfigError(key, "unknown operator kind '" + value + "'");
            cfg.benchmark.op_kind = value;
        } else if (key == "benchmark.box_lower") {
            cfg.benchmark.box_lo = parse_number(key, value);
        } else if (key == "benchmark.box_upper") {
            cfg.benchmark.box_hi = parse_number(key, value);
        } else if (key == "benchmark.amplitude") {
            cfg.benchmark.amplitude = parse_number(key, value);
        } else if (key == "benchmark.plateau_lo") {
            cfg.benchmark.plateau_lo = parse_number(key, value);
        } else if (key == "benchmark.plateau_hi") {
            cfg.benchmark.plateau_hi = parse_number(key, value);
        } else if (key == "benchmark.kernel_sigma") {
            const double s = parse_number(key, value);
            if (!(s > 0)) throw ConfigError(key, "kernel width must be positive");
            cfg.benchmark.kernel_sigma = s;
        } else if (key == "benchmark.v_frequency") {
            cfg.benchmark.v_frequency = parse_number(key, value);
        } else if (key == "benchmark.seed") {
            cfg.benchmark.seed = static_cast<std::uint64_t>(parse_int(key, value));
        } else if (key == "schedule.kind") {
            if (value != "constant" && value != "polynomial" && value != "explicit")
                throw ConfigError(key, "unknown schedule kind '" + value + "'");
            cfg.schedule.kind = value;
        } else if (key == "schedule.c_alpha") {
            cfg.schedule.c_alpha = parse_number(key, value);
            if (!(cfg.schedule.c_alpha > 0)) throw ConfigError(key, "c_alpha must be positive");
        } else if (key == "schedule.s") {
            cfg.schedule.s = parse_number(key, value);
            if (cfg.schedule.s < 0) throw ConfigError(key, "s must be >= 0");
        } else if (key == "schedule.values") {
            cfg.schedule.values = parse_list(key, value);
            for (double a : cfg.schedule.values)
                if (!(a > 0)) throw ConfigError(key, "all alpha_k must be positive");
        } else if (key == "solver") {
            if (value != "pg" && value != "pdas")
                throw ConfigError(key, "unknown solver '" + value + "'");
            cfg.solver = value;
        } else if (key == "tol") {
            cfg.tol = parse_number(key, value);
            if (!(cfg.tol > 0)) throw ConfigError(key, "tol must be positive");
        } else if (key == "k_max") {
            const long k = parse_int(key, value);
            if (k < 0) throw ConfigError(key, "k_max must be >= 0");
            cfg.k_max = static_cast<int>(k);
        } else if (key == "epsilon") {
            if (value == "auto")
                cfg.epsilon = -1.0;
            else {
                cfg.epsilon = parse_number(key, value);
                if (cfg.epsilon < 0) throw ConfigError(key, "epsilon must be >= 0 or auto");
            }
        } else if (key == "theta_mode") {
            if (value != "auto" && value != "value")
                throw ConfigError(key, "theta_mode must be auto or value");
            cfg.theta_mode = value;
        } else if (key == "theta") {
            cfg.theta = parse_number(key, value);
            if (!(cfg.theta > 0)) throw ConfigError(key, "theta must be positive");
        } else if (key == "output") {
            if (value.empty()) throw ConfigError(key, "output path must not be empty");
            cfg.output = value;
        } else if (key == "mode") {
            if (value != "bregman" && value != "ppm" && value != "both")
                throw ConfigError(key, "mode must be bregman, ppm, or both");
            cfg.mode = value;
        } else if (key == "sweep.s_values") {
            cfg.sweep_s_values = parse_list(key, value);
            for (double s : cfg.sweep_s_values)
                if (s < 0) throw ConfigError(key, "sweep exponents must be >= 0");
        } else {
            throw ConfigError(key, "unknown key");
        }
    }

    if (cfg.schedule.kind == "explicit" && cfg.schedule.values.empty())
        throw ConfigError("schedule.values", "explicit schedule needs a value list");
    if (cfg.theta_mode == "value" && !(cfg.theta > 0))
        throw ConfigError("theta", "theta_mode = value requires a positive theta");
    if (!(cfg.benchmark.box_lo <= cfg.benchmark.box_hi))
        throw ConfigError("benchmark.box_lower", "box_lower must not exceed box_upper");
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "benchmark.name = " << cfg.benchmark.name << "\n";
    out << "benchmark.n = " << cfg.benchmark.n << "\n";
    out << "benchmark.op = " << cfg.benchmark.op_kind << "\n";
    out << "benchmark.box_lower = " << format_double(cfg.benchmark.box_lo) << "\n";
    out << "benchmark.box_upper = " << format_double(cfg.benchmark.box_hi) << "\n";
    out << "benchmark.amplitude = " << format_double(cfg.benchmark.amplitude) << "\n";
    out << "benchmark.plateau_lo = " << format_double(cfg.benchmark.plateau_lo) << "\n";
    out << "benchmark.plateau_hi = " << format_double(cfg.benchmark.plateau_hi) << "\n";
    out << "benchmark.kernel_sigma = " << format_double(cfg.benchmark.kernel_sigma) << "\n";
    out << "benchmark.v_frequency = " << format_double(cfg.benchmark.v_frequency) << "\n";
    out << "benchmark.seed = " << cfg.benchmark.seed << "\n";
    out << "schedule.kind = " << cfg.schedule.kind << "\n";
    out << "schedule.c_alpha = " << format_double(cfg.schedule.c_alpha) << "\n";
    out << "schedule.s = " << format_double(cfg.schedule.s) << "\n";
    if (!cfg.schedule.values.empty()) {
        out << "schedule.values = ";
        for (size_t i = 0; i < cfg.schedule.values.size(); ++i)
            out << (i ? "," : "") << format_double(cfg.schedule.values[i]);
        out << "\n";
    }
    out << "solver = " << cfg.solver << "\n";
    out << "tol = " << format_double(cfg.tol) << "\n";
    out << "k_max = " << cfg.k_max << "\n";
    out << "epsilon = " << (cfg.epsilon < 0 ? std::string("auto") : format_double(cfg.epsilon))
        << "\n";
    out << "theta_mode = " << cfg.theta_mode << "\n";
    if (cfg.theta_mode == "value") out << "theta = " << format_double(cfg.theta) << "\n";
    out << "output = " << cfg.output << "\n";
    out << "mode = " << cfg.mode << "\n";
    if (!cfg.sweep_s_values.empty()) {
        out << "sweep.s_values = ";
        for (size_t i = 0; i < cfg.sweep_s_values.size(); ++i)
            out << (i ? "," : "") << format_double(cfg.sweep_s_values[i]);
        out << "\n";
    }
    return out.str();
}

Schedule make_schedule(const ScheduleSpec& spec) {
    try {
        if (spec.kind == "constant") return Schedule::constant(spec.c_alpha);
        if (spec.kind == "polynomial") return Schedule::polynomial(spec.c_alpha, spec.s);
        return Schedule::explicit_list(spec.values);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("schedule", e.what());
    }
}

SolverConfig make_solver_config(const RunConfig& cfg) {
    SolverConfig sc;
    sc.method = cfg.solver == "pdas" ? SolverConfig::Method::pdas : SolverConfig::Method::pg;
    sc.tol = cfg.tol;
    return sc;
}

StopRule make_stop_rule(const RunConfig& cfg) {
    StopRule stop;
    stop.epsilon = cfg.epsilon;
    stop.k_max = cfg.k_max;
    stop.theta = cfg.theta_mode == "value" ? cfg.theta : -1.0;
    return stop;
}

}  // namespace bregbox
