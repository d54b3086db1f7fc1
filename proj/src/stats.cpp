// SPDX-License-Identifier: Apache-2.0
#include "llrecall/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "llrecall/embedded_data.hpp"
#include "llrecall/error.hpp"

namespace llrecall {

const HsdGroup& HsdResult::group(std::string_view label) const {
    for (const auto& g : groups) {
        if (g.label == label) return g;
    }
    throw ConfigError(fmt::format("no HSD group labelled '{}'", label));
}

bool HsdResult::share_letter(std::string_view a, std::string_view b) const {
    const auto& la = group(a).letters;
    const auto& lb = group(b).letters;
    return std::any_of(la.begin(), la.end(), [&](char c) { return lb.find(c) != std::string::npos; });
}

// ---------------------------------------------------------------------------
// Studentized range table

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    return out;
}

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
}

}  // namespace

StudentizedRangeTable StudentizedRangeTable::parse(std::string_view csv, double alpha) {
    StudentizedRangeTable t;
    t.alpha_ = alpha;
    std::istringstream in{std::string(csv)};
    std::string line;
    bool header = true;
    try {
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            if (header) {
                if (cells.size() < 2 || cells[0] != "df") throw ValidationError("q-table header must start with 'df'");
                for (std::size_t i = 1; i < cells.size(); ++i)
                    t.ks_.push_back(static_cast<std::size_t>(parse_number(cells[i])));
                header = false;
                continue;
            }
            if (cells.size() != t.ks_.size() + 1) throw ValidationError("q-table row has the wrong number of cells");
            const double df = cells[0] == "inf" ? std::numeric_limits<double>::infinity() : parse_number(cells[0]);
            if (!t.dfs_.empty() && !(df > t.dfs_.back())) throw ValidationError("q-table df rows must ascend");
            t.dfs_.push_back(df);
            std::vector<double> row;
            for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(parse_number(cells[i]));
            t.values_.push_back(std::move(row));
        }
    } catch (const std::invalid_argument& e) {
        throw ValidationError(fmt::format("q-table: bad number '{}'", e.what()));
    }
    if (t.ks_.empty() || t.dfs_.empty()) throw ValidationError("q-table is empty");
    for (std::size_t i = 1; i < t.ks_.size(); ++i) {
        if (t.ks_[i] != t.ks_[i - 1] + 1) throw ValidationError("q-table group counts must be consecutive");
    }
    return t;
}

const StudentizedRangeTable& StudentizedRangeTable::bundled() {
    static const StudentizedRangeTable table = parse(embedded::qtable_csv(), 0.05);
    return table;
}

double StudentizedRangeTable::critical_value(std::size_t k_groups, double df) const {
    if (k_groups < ks_.front() || k_groups > ks_.back())
        throw ConfigError(fmt::format("q-table covers {}..{} groups, got {}", ks_.front(), ks_.back(), k_groups));
    if (!(df >= dfs_.front()))
        throw ConfigError(fmt::format("q-table starts at df = {}, got {}", dfs_.front(), df));
    if (df > dfs_.back()) throw ConfigError(fmt::format("df {} beyond the q-table", df));
    const std::size_t col = k_groups - ks_.front();

    auto hi = std::lower_bound(dfs_.begin(), dfs_.end(), df);
    const auto row = static_cast<std::size_t>(hi - dfs_.begin());
    if (*hi == df) return values_[row][col];
    const double df_lo = dfs_[row - 1];
    const double df_hi = dfs_[row];
    const double x = 1.0 / df;
    const double x_lo = 1.0 / df_lo;
    const double x_hi = std::isinf(df_hi) ? 0.0 : 1.0 / df_hi;
    const double frac = (x_lo - x) / (x_lo - x_hi);
    return values_[row - 1][col] + frac * (values_[row][col] - values_[row - 1][col]);
}

double studentized_range_q(double alpha, std::size_t k_groups, double df) {
    const auto& table = StudentizedRangeTable::bundled();
    if (std::abs(alpha - table.alpha()) > 1e-12)
        throw ConfigError(fmt::format("only alpha = {} is tabulated, got {}", table.alpha(), alpha));
    return table.critical_value(k_groups, df);
}

// ---------------------------------------------------------------------------
// Compact letter display

std::vector<std::string> compact_letter_display(const std::vector<std::vector<bool>>& different) {
    const std::size_t n = different.size();
    for (const auto& row : different) {
        if (row.size() != n) throw ConfigError("significance matrix must be square");
    }
    using Column = std::vector<bool>;
    std::vector<Column> columns;
    if (n > 0) columns.emplace_back(n, true);

    auto absorb = [](std::vector<Column>& cols) {
        std::vector<Column> kept;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            bool redundant = false;
            for (std::size_t j = 0; j < cols.size() && !redundant; ++j) {
                if (i == j) continue;
                bool subset = true;
                for (std::size_t t = 0; t < cols[i].size() && subset; ++t) subset = !cols[i][t] || cols[j][t];
                // Drop i if contained in j; for identical columns keep the first.
                if (subset && (cols[i] != cols[j] || j < i)) redundant = true;
            }
            if (!redundant) kept.push_back(cols[i]);
        }
        cols = std::move(kept);
    };

    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (!different[a][b]) continue;
            std::vector<Column> next;
            bool split = false;
            for (const auto& col : columns) {
                if (col[a] && col[b]) {
                    Column without_a = col;
                    without_a[a] = false;
                    Column without_b = col;
                    without_b[b] = false;
                    next.push_back(std::move(without_b));
                    next.push_back(std::move(without_a));
                    split = true;
                } else {
                    next.push_back(col);
                }
            }
            columns = std::move(next);
            if (split) absorb(columns);
        }
    }

    // Order columns by their first member, then by their next members.
    std::sort(columns.begin(), columns.end(), [](const Column& x, const Column& y) {
        for (std::size_t t = 0; t < x.size(); ++t) {
            if (x[t] != y[t]) return static_cast<bool>(x[t]);
        }
        return false;
    });
    if (columns.size() > 26) throw ConfigError("compact letter display needs more than 26 letters");

    std::vector<std::string> letters(n);
    for (std::size_t c = 0; c < columns.size(); ++c) {
        for (std::size_t t = 0; t < n; ++t) {
            if (columns[c][t]) letters[t].push_back(static_cast<char>('A' + c));
        }
    }
    return letters;
}

// ---------------------------------------------------------------------------
// Tukey HSD

HsdResult tukey_hsd(std::span<const SampleGroup> groups, double alpha) {
    if (groups.size() < 2) throw ConfigError("Tukey HSD needs at least two groups");
    const std::size_t n = groups.front().samples.size();
    for (const auto& g : groups) {
        if (g.samples.size() != n)
            throw ConfigError(fmt::format("Tukey HSD needs balanced groups; '{}' has {} samples, expected {}",
                                          g.label, g.samples.size(), n));
    }
    if (n < 2) throw ConfigError("Tukey HSD needs at least two samples per group");

    const std::size_t k = groups.size();
    std::vector<double> means(k);
    double ss_within = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& s = groups[i].samples;
        means[i] = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
        for (double x : s) ss_within += (x - means[i]) * (x - means[i]);
    }

    HsdResult r;
    r.alpha = alpha;
    r.samples_per_group = n;
    r.df_error = k * n - k;
    r.mse = ss_within / static_cast<double>(r.df_error);
    r.q_critical = studentized_range_q(alpha, k, static_cast<double>(r.df_error));
    r.critical_difference = r.q_critical * std::sqrt(r.mse / static_cast<double>(n));

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (means[a] != means[b]) return means[a] > means[b];
        return groups[a].label < groups[b].label;
    });

    std::vector<std::vector<bool>> different(k, std::vector<bool>(k, false));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            const double diff = std::abs(means[order[a]] - means[order[b]]);
            different[a][b] = diff > 0.0 && diff >= r.critical_difference;
        }
    }
    const auto letters = compact_letter_display(different);
    for (std::size_t a = 0; a < k; ++a) r.groups.push_back({groups[order[a]].label, means[order[a]], letters[a]});
    return r;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank

std::string_view to_string(WilcoxonResult::Method method) {
    return method == WilcoxonResult::Method::exact ? "exact" : "normal-approximation";
}

double normal_upper_tail(double z) {
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ConfigError(fmt::format("paired samples differ in length ({} vs {})", a.size(), b.size()));
    if (a.empty()) throw ConfigError("paired samples must not be empty");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    WilcoxonResult r;
    r.n_effective = diffs.size();
    if (diffs.empty()) return r;

    // Average ranks of |d|, kept doubled so they stay integral.
    const std::size_t n = diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
    std::vector<std::size_t> rank2(n);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        for (std::size_t t = i; t <= j; ++t) rank2[order[t]] = (i + 1) + (j + 1);
        const double ties = static_cast<double>(j - i + 1);
        tie_term += ties * ties * ties - ties;
        i = j + 1;
    }

    std::size_t w_plus2 = 0;
    std::size_t total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += rank2[i];
        if (diffs[i] > 0) w_plus2 += rank2[i];
    }
    r.w_plus = static_cast<double>(w_plus2) / 2.0;
    r.w_minus = static_cast<double>(total2 - w_plus2) / 2.0;
    r.statistic = std::min(r.w_plus, r.w_minus);

    const double nd = static_cast<double>(n);
    if (n <= kWilcoxonExactLimit) {
        r.method = WilcoxonResult::Method::exact;
        // Null distribution of doubled W+ over all 2^n sign assignments.
        std::vector<double> count(total2 + 1, 0.0);
        count[0] = 1.0;
        std::size_t reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t s = reach + 1; s-- > 0;) {
                if (count[s] != 0.0) count[s + rank2[i]] += count[s];
            }
            reach += rank2[i];
        }
        double lower = 0.0;
        double upper = 0.0;
        for (std::size_t s = 0; s <= total2; ++s) {
            if (s <= w_plus2) lower += count[s];
            if (s >= w_plus2) upper += count[s];
        }
        const double assignments = std::ldexp(1.0, static_cast<int>(n));
        r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / assignments);
    } else {
        r.method = WilcoxonResult::Method::normal_approximation;
        const double mean = nd * (nd + 1.0) / 4.0;
        const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
        const double dev = std::max(0.0, std::abs(r.w_plus - mean) - 0.5);
        r.p_value = var > 0.0 ? std::min(1.0, 2.0 * normal_upper_tail(dev / std::sqrt(var))) : 1.0;
    }
    return r;
}

}  // namespace llrecall
