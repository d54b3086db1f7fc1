// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "llrecall/harness.hpp"

namespace llrecall {

struct DescriptiveStats {
    double min = 0.0;
    double q1 = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

/// Quartiles are medians of the lower and upper halves; for an odd count the
/// median belongs to both halves. Throws ValidationError when empty.
DescriptiveStats describe(std::span<const double> values);

struct RankedConfig {
    std::size_t rank = 0;  // 1-based within the family
    std::string config_id;
    std::string parameters;  // e.g. "stemming+tf-idf+cosine"
    double value = 0.0;
};

/// Human-readable parameter values of a config, pipeline first.
std::string parameter_summary(const ClassifierConfig& config);

/// Successful configs of one family, best first; ties by config id.
std::vector<RankedConfig> rank_family(const SweepReport& report, ModelKind family, Metric metric);

std::string csv_field(std::string_view text);
/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

// Sweep directory files. Numbers are written with 17 significant digits so a
// reload reproduces every double exactly.
std::string sweep_report_csv(const SweepReport& report, bool omit_timing = false);
std::string sweep_queries_csv(const SweepReport& report);
std::string sweep_rankings_csv(const SweepReport& report);
std::string sweep_errors_csv(const SweepReport& report);
std::string sweep_meta_json(const SweepReport& report);

/// Writes sweep_report.csv, sweep_queries.csv, sweep_rankings.csv,
/// sweep_errors.csv and sweep_meta.json into `dir` (created if needed).
std::vector<std::filesystem::path> write_sweep(const SweepReport& report, const std::filesystem::path& dir,
                                               bool omit_timing = false);
/// Inverse of write_sweep. Throws IoError or FormatError.
SweepReport load_sweep(const std::filesystem::path& dir);

/// Columns: group, mean, value.
std::string hsd_csv(const HsdResult& result);
/// Columns: comparison, treated, baseline, n_effective, statistic, p_value, method.
std::string wilcoxon_csv(std::span<const TopPerformerComparison> comparisons);

std::string hsd_file_name(ModelKind family, Parameter parameter, Metric metric);
std::string wilcoxon_file_name(ModelKind family, Metric metric);

/// Ranked best/worst tables, descriptive statistics, HSD letter tables and
/// Wilcoxon tables for top-20 and MAP.
std::string render_markdown(const SweepReport& report);

enum class ReportFormat { csv, markdown };
ReportFormat parse_report_format(std::string_view text);

/// csv: ranked_<metric>.csv, descriptive.csv plus every HSD and Wilcoxon
/// table; markdown: report.md. Returns the files written.
std::vector<std::filesystem::path> emit_report(const SweepReport& report, ReportFormat format,
                                               const std::filesystem::path& dir);

}  // namespace llrecall
