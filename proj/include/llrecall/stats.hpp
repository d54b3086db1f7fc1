// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace llrecall {

struct SampleGroup {
    std::string label;
    std::vector<double> samples;
};

struct HsdGroup {
    std::string label;
    double mean = 0.0;
    std::string letters;  // e.g. "A", "AB"
};

struct HsdResult {
    std::vector<HsdGroup> groups;  // sorted by mean, descending
    double alpha = 0.05;
    double q_critical = 0.0;
    double mse = 0.0;
    std::size_t df_error = 0;
    std::size_t samples_per_group = 0;
    double critical_difference = 0.0;

    const HsdGroup& group(std::string_view label) const;
    bool share_letter(std::string_view a, std::string_view b) const;
};

/// Upper-alpha critical values of the studentized range, from a bundled table
/// (k = 2..20; df = 2..30, 40, 60, 120, inf). Between tabulated rows the value
/// is interpolated linearly in 1/df.
class StudentizedRangeTable {
public:
    /// The bundled alpha = 0.05 table (data/qtable_0.05.csv).
    static const StudentizedRangeTable& bundled();
    /// Header "df,2,3,...", then one row per df; "inf" marks the limit row.
    static StudentizedRangeTable parse(std::string_view csv, double alpha);

    double alpha() const { return alpha_; }
    std::size_t min_groups() const { return ks_.front(); }
    std::size_t max_groups() const { return ks_.back(); }
    const std::vector<double>& df_rows() const { return dfs_; }
    /// Throws ConfigError outside the tabulated range.
    double critical_value(std::size_t k_groups, double df) const;

private:
    double alpha_ = 0.05;
    std::vector<std::size_t> ks_;
    std::vector<double> dfs_;                 // ascending, last may be +inf
    std::vector<std::vector<double>> values_; // [row][k index]
};

double studentized_range_q(double alpha, std::size_t k_groups, double df);

/// Letters for treatments listed in display order (highest mean first), given
/// the symmetric matrix of significant differences. Insert-and-absorb: each
/// significant pair splits every letter column holding both, then columns
/// contained in another are dropped. Letters are assigned in order of each
/// column's first member.
std::vector<std::string> compact_letter_display(const std::vector<std::vector<bool>>& different);

/// Balanced one-way Tukey HSD. Two groups differ iff their mean difference is
/// nonzero and at least q(alpha, groups, N - groups) * sqrt(MSE / n).
HsdResult tukey_hsd(std::span<const SampleGroup> groups, double alpha = 0.05);

struct WilcoxonResult {
    enum class Method { exact, normal_approximation };

    std::size_t n_effective = 0;
    double statistic = 0.0;  // min(W+, W-)
    double w_plus = 0.0;
    double w_minus = 0.0;
    double p_value = 1.0;    // two-sided
    Method method = Method::exact;
};

std::string_view to_string(WilcoxonResult::Method method);

/// Largest effective sample size that uses the exact null distribution.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Two-sided paired signed-rank test of a - b. Zero differences are dropped;
/// tied magnitudes get average ranks.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Standard normal upper tail probability.
double normal_upper_tail(double z);

}  // namespace llrecall
