#include "bregbox/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bregbox {

std::string metric_csv_header() {
    return "k,alpha_k,gamma_k,H_uk,H_gap,stat_res,u_err_L2_sq,u_err_L1_A,breg_dist_ref,"
           "v_k_norm,lambda_avg_err_sq,subproblem_iters,wall_ms";
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

}  // namespace

std::string metric_csv_line(const MetricRow& row) {
    std::ostringstream out;
    out << row.k << ',' << format_double(row.alpha_k) << ',' << format_double(row.gamma_k) << ','
        << format_double(row.H_uk) << ',' << opt_field(row.H_gap) << ','
        << format_double(row.stat_res) << ',' << opt_field(row.u_err_L2_sq) << ','
        << opt_field(row.u_err_L1_A) << ',' << opt_field(row.breg_dist_ref) << ','
        << opt_field(row.v_k_norm) << ',' << opt_field(row.lambda_avg_err_sq) << ','
        << row.subproblem_iters << ',' << format_double(row.wall_ms);
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("write_text_file: cannot open " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write_text_file: write failed for " + tmp.string());
    }
    fs::rename(tmp, target);  // atomic replace
}

void write_history_csv(const std::string& path, std::span<const MetricRow> rows) {
    std::ostringstream out;
    out << metric_csv_header() << '\n';
    for (const MetricRow& row : rows) out << metric_csv_line(row) << '\n';
    write_text_file(path, out.str());
}

}  // namespace bregbox
