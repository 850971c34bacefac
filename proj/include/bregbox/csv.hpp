#pragma once

#include "bregbox/reference.hpp"

#include <span>
#include <string>

namespace bregbox {

/// Fixed history schema; absent reference metrics serialize as empty fields.
std::string metric_csv_header();
std::string metric_csv_line(const MetricRow& row);

/// Formats a double with 17 significant digits (lossless round-trip).
std::string format_double(double v);

/// Writes header + one line per row, atomically (temp file + rename).
void write_history_csv(const std::string& path, std::span<const MetricRow> rows);

/// Atomic small-file write used for summaries and aggregates.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bregbox
