#include "bregbox/runner.hpp"

#include "bregbox/config.hpp"
#include "bregbox/csv.hpp"
#include "bregbox/diagnostics.hpp"
#include "bregbox/verify.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

namespace bregbox {

namespace {

std::string slope_line(const std::vector<MetricRow>& history, const std::string& metric,
                       int k_final) {
    try {
        const RateFit fit = fit_rate(history, metric, 10, k_final);
        std::ostringstream out;
        out << "slope_" << metric << " = " << format_double(fit.slope)
            << " (r2 = " << format_double(fit.r2) << ")";
        return out.str();
    } catch (const std::invalid_argument&) {
        return "slope_" + metric + " = n/a";
    }
}

std::string summarize(const std::string& mode, const RunResult& result) {
    std::ostringstream out;
    const auto& history = result.state.history;
    out << "mode = " << mode << "\n";
    out << "final_k = " << result.state.k << "\n";
    out << "stop_reason = " << result.stop_reason << "\n";
    for (const char* metric :
         {"H_uk", "H_gap", "u_err_L2_sq", "u_err_L1_A", "breg_dist_ref", "lambda_avg_err_sq"})
        out << slope_line(history, metric, result.state.k) << "\n";
    return out.str();
}

struct VariantOutcome {
    double s = 0.0;
    RunResult result;
    std::string error;
    bool solver_failure = false;
};

int max_threads() {
    if (const char* env = std::getenv("BREGBOX_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

std::string sweep_field(const std::vector<MetricRow>& history, const std::string& metric,
                        int k_final) {
    try {
        return format_double(fit_rate(history, metric, 10, k_final).slope);
    } catch (const std::invalid_argument&) {
        return "";
    }
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_override) {
    RunConfig cfg;
    ProblemInstance* instance = nullptr;
    std::optional<ProblemInstance> holder;
    try {
        cfg = parse_config(config_path);
        if (!out_override.empty()) cfg.output = out_override;
        holder.emplace(make_benchmark(cfg.benchmark));
        instance = &*holder;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConstructionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    const Schedule sched = make_schedule(cfg.schedule);
    const SolverConfig solver = make_solver_config(cfg);
    const StopRule stop = make_stop_rule(cfg);
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output);

    std::ostringstream summary;
    try {
        if (cfg.mode == "bregman" || cfg.mode == "both") {
            const RunResult r = run(*instance, sched, stop, solver);
            const std::string name = cfg.mode == "both" ? "history.bregman.csv" : "history.csv";
            write_history_csv((fs::path(cfg.output) / name).string(), r.state.history);
            summary << summarize("bregman", r);
        }
        if (cfg.mode == "ppm" || cfg.mode == "both") {
            const RunResult r = run_ppm(*instance, sched, stop, solver);
            const std::string name = cfg.mode == "both" ? "history.ppm.csv" : "history.csv";
            write_history_csv((fs::path(cfg.output) / name).string(), r.state.history);
            if (cfg.mode == "both") summary << "\n";
            summary << summarize("ppm", r);
        }
    } catch (const SolveError& e) {
        std::cerr << "solver non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    write_text_file((fs::path(cfg.output) / "summary.txt").string(), summary.str());
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override) {
    RunConfig cfg;
    std::optional<ProblemInstance> instance;
    try {
        cfg = parse_config(config_path);
        if (!out_override.empty()) cfg.output = out_override;
        if (cfg.sweep_s_values.empty())
            throw ConfigError("sweep.s_values", "sweep requires schedule variants");
        instance.emplace(make_benchmark(cfg.benchmark));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConstructionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    const SolverConfig solver = make_solver_config(cfg);
    const StopRule stop = make_stop_rule(cfg);
    const bool ppm = cfg.mode == "ppm";

    std::vector<VariantOutcome> outcomes(cfg.sweep_s_values.size());
    for (size_t i = 0; i < outcomes.size(); ++i) outcomes[i].s = cfg.sweep_s_values[i];

    const int workers = std::min<int>(max_threads(), static_cast<int>(outcomes.size()));
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t i = next.fetch_add(1); i < outcomes.size(); i = next.fetch_add(1)) {
            VariantOutcome& out = outcomes[i];
            try {
                const Schedule sched = Schedule::polynomial(cfg.schedule.c_alpha, out.s);
                out.result = ppm ? run_ppm(*instance, sched, stop, solver)
                                 : run(*instance, sched, stop, solver);
            } catch (const SolveError& e) {
                out.error = e.what();
                out.solver_failure = true;
            } catch (const std::exception& e) {
                out.error = e.what();
            }
        }
    };
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    namespace fs = std::filesystem;
    std::ostringstream agg;
    agg << "s,c_alpha,final_k,stop_reason,slope_H_gap,slope_u_err_L2_sq,slope_u_err_L1_A,"
           "slope_lambda_avg_err_sq\n";
    for (const VariantOutcome& out : outcomes) {
        if (!out.error.empty()) {
            std::cerr << "sweep variant s=" << out.s << " failed: " << out.error << "\n";
            return out.solver_failure ? 3 : 2;
        }
        std::ostringstream dir;
        dir << "s_" << out.s;
        write_history_csv((fs::path(cfg.output) / dir.str() / "history.csv").string(),
                          out.result.state.history);
        const auto& h = out.result.state.history;
        const int kf = out.result.state.k;
        agg << format_double(out.s) << ',' << format_double(cfg.schedule.c_alpha) << ',' << kf
            << ',' << out.result.stop_reason << ',' << sweep_field(h, "H_gap", kf) << ','
            << sweep_field(h, "u_err_L2_sq", kf) << ',' << sweep_field(h, "u_err_L1_A", kf) << ','
            << sweep_field(h, "lambda_avg_err_sq", kf) << "\n";
    }
    write_text_file((fs::path(cfg.output) / "sweep.csv").string(), agg.str());
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    std::vector<CheckResult> results;
    try {
        results = verify_suite(suite, seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return 2;
    }
    bool all_pass = true;
    for (const CheckResult& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
        if (!r.detail.empty()) std::cout << ": " << r.detail;
        std::cout << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "all checks passed" : "FAILURES present") << " ("
              << results.size() << " checks)\n";
    return all_pass ? 0 : 1;
}

}  // namespace bregbox
