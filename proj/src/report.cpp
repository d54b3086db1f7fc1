// SPDX-License-Identifier: Apache-2.0
#include "llrecall/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "llrecall/error.hpp"
#include "llrecall/persist.hpp"

namespace llrecall {

using nlohmann::json;

namespace {

constexpr std::array<ModelKind, 3> kFamilies{ModelKind::vsm, ModelKind::lsi, ModelKind::lda};
constexpr std::array<Metric, 2> kReportMetrics{Metric::top_k, Metric::map};

std::string num(double v) {
    return fmt::format("{:.17g}", v);
}

double median_of(std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    return n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

std::string family_title(ModelKind family) {
    switch (family) {
        case ModelKind::vsm: return "VSM";
        case ModelKind::lsi: return "LSI";
        case ModelKind::lda: return "LDA";
    }
    return "?";
}

std::string metric_title(Metric metric) {
    switch (metric) {
        case Metric::top_k: return "Top-20";
        case Metric::map: return "MAP";
        case Metric::precision: return "P@10";
        case Metric::recall: return "R@10";
    }
    return "?";
}

std::string parameter_title(Parameter parameter) {
    switch (parameter) {
        case Parameter::pipeline: return "Preprocessing steps";
        case Parameter::weight: return "Term weight";
        case Parameter::similarity: return "Similarity";
        case Parameter::topics: return "Number of topics";
    }
    return "?";
}

bool has_family(const SweepReport& report, ModelKind family) {
    return std::any_of(report.results.begin(), report.results.end(),
                       [&](const ConfigResult& r) { return r.config.model == family; });
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string source;

    std::size_t column(std::string_view name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw FormatError(fmt::format("{}: missing column '{}'", source, name));
        return static_cast<std::size_t>(it - header.begin());
    }
};

CsvTable read_csv(const std::filesystem::path& path) {
    CsvTable t;
    t.source = path.string();
    std::istringstream in(read_file(path));
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (first) {
            t.header = std::move(fields);
            first = false;
            continue;
        }
        if (fields.size() != t.header.size())
            throw FormatError(fmt::format("{}:{}: expected {} fields, found {}", t.source, line_no,
                                          t.header.size(), fields.size()));
        t.rows.push_back(std::move(fields));
    }
    if (first) throw FormatError(fmt::format("{}: empty file", t.source));
    return t;
}

double parse_double(const std::string& text, const std::string& source) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw FormatError(fmt::format("{}: '{}' is not a number", source, text));
    return v;
}

std::size_t parse_size(const std::string& text, const std::string& source) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw FormatError(fmt::format("{}: '{}' is not a count", source, text));
    return v;
}

}  // namespace

DescriptiveStats describe(std::span<const double> values) {
    if (values.empty()) throw ValidationError("descriptive statistics need at least one value");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    DescriptiveStats d;
    d.min = v.front();
    d.max = v.back();
    d.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
    d.median = median_of(v);
    const std::size_t half = (n + 1) / 2;  // odd n: median shared by both halves
    d.q1 = median_of(std::span<const double>(v.data(), half));
    d.q3 = median_of(std::span<const double>(v.data() + (n - half), half));
    return d;
}

std::string parameter_summary(const ClassifierConfig& config) {
    std::string s(config.pipeline.label());
    if (config.weight) s += fmt::format("+{}", to_string(*config.weight));
    if (config.model != ModelKind::lda) s += fmt::format("+{}", config.similarity_label());
    if (config.topics) s += fmt::format("+{} topics", *config.topics);
    return s;
}

std::vector<RankedConfig> rank_family(const SweepReport& report, ModelKind family, Metric metric) {
    std::vector<RankedConfig> out;
    for (const auto& r : report.results) {
        if (r.config.model != family || !r.ok()) continue;
        out.push_back({0, r.config.id(), parameter_summary(r.config), aggregate_value(*r.eval, metric)});
    }
    std::sort(out.begin(), out.end(), [](const RankedConfig& a, const RankedConfig& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.config_id < b.config_id;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
    return out;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw FormatError("unterminated quoted CSV field");
    fields.push_back(std::move(cur));
    return fields;
}

std::string sweep_report_csv(const SweepReport& report, bool omit_timing) {
    std::string out = "config_id,model,pipeline,weight,similarity,topics,seed,top20,map,p_at_10,r_at_10,wall_ms\n";
    for (const auto& r : report.results) {
        const auto& c = r.config;
        out += fmt::format("{},{},{},{},{},{},{},", csv_field(c.id()), to_string(c.model), c.pipeline.name(),
                           c.weight ? std::string(to_string(*c.weight)) : "", c.similarity_label(),
                           c.topics ? std::to_string(*c.topics) : "", c.lda ? std::to_string(c.lda->seed) : "");
        if (r.ok()) {
            out += fmt::format("{},{},{},{},", num(r.eval->top_k), num(r.eval->map), num(r.eval->mean_precision),
                               num(r.eval->mean_recall));
        } else {
            out += "NA,NA,NA,NA,";
        }
        out += omit_timing ? "0" : fmt::format("{:.3f}", r.wall_ms);
        out += '\n';
    }
    return out;
}

std::string sweep_queries_csv(const SweepReport& report) {
    std::string out = "config_id,query_id,avp,hit,precision,recall\n";
    for (const auto& r : report.results) {
        if (!r.ok()) continue;
        const std::string id = csv_field(r.config.id());
        for (const auto& q : r.eval->per_query)
            out += fmt::format("{},{},{},{},{},{}\n", id, csv_field(q.query_id), num(q.avp), q.hit, num(q.precision),
                               num(q.recall));
    }
    return out;
}

std::string sweep_rankings_csv(const SweepReport& report) {
    std::string out = "config_id,query_id,rank,lesson_id,score\n";
    for (const auto& r : report.results) {
        if (!r.ok()) continue;
        const std::string id = csv_field(r.config.id());
        for (const auto& list : r.rankings) {
            for (std::size_t i = 0; i < list.entries.size(); ++i)
                out += fmt::format("{},{},{},{},{}\n", id, csv_field(list.query_id), i + 1,
                                   csv_field(list.entries[i].lesson_id), num(list.entries[i].score));
        }
    }
    return out;
}

std::string sweep_errors_csv(const SweepReport& report) {
    std::string out = "config_id,error\n";
    for (const auto& r : report.results) {
        if (!r.ok()) out += fmt::format("{},{}\n", csv_field(r.config.id()), csv_field(r.error));
    }
    return out;
}

std::string sweep_meta_json(const SweepReport& report) {
    const auto& m = report.metadata;
    json configs = json::array();
    for (const auto& r : report.results)
        configs.push_back({{"config", json::parse(config_to_json_text(r.config))}, {"warnings", r.warnings}});
    const json j = {{"tool_version", m.tool_version},
                    {"corpus_hash", m.corpus_hash},
                    {"query_hash", m.query_hash},
                    {"gold_hash", m.gold_hash},
                    {"lesson_count", m.lesson_count},
                    {"query_count", m.query_count},
                    {"top_k_cutoff", m.metrics.top_k_cutoff},
                    {"pr_cutoff", m.metrics.pr_cutoff},
                    {"limit", m.limit},
                    {"configs", configs}};
    return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_sweep(const SweepReport& report, const std::filesystem::path& dir,
                                               bool omit_timing) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", dir.string(), ec.message()));
    const std::vector<std::pair<std::string, std::string>> files{
        {"sweep_report.csv", sweep_report_csv(report, omit_timing)},
        {"sweep_queries.csv", sweep_queries_csv(report)},
        {"sweep_rankings.csv", sweep_rankings_csv(report)},
        {"sweep_errors.csv", sweep_errors_csv(report)},
        {"sweep_meta.json", sweep_meta_json(report)},
    };
    std::vector<std::filesystem::path> written;
    for (const auto& [name, bytes] : files) {
        write_file(dir / name, bytes);
        written.push_back(dir / name);
    }
    return written;
}

SweepReport load_sweep(const std::filesystem::path& dir) {
    const auto meta_path = dir / "sweep_meta.json";
    json meta;
    try {
        meta = json::parse(read_file(meta_path));
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("{}: {}", meta_path.string(), e.what()));
    }

    SweepReport report;
    std::map<std::string, std::size_t> by_id;
    try {
        auto& m = report.metadata;
        m.tool_version = meta.at("tool_version").get<std::string>();
        m.corpus_hash = meta.at("corpus_hash").get<std::string>();
        m.query_hash = meta.at("query_hash").get<std::string>();
        m.gold_hash = meta.at("gold_hash").get<std::string>();
        m.lesson_count = meta.at("lesson_count").get<std::size_t>();
        m.query_count = meta.at("query_count").get<std::size_t>();
        m.metrics.top_k_cutoff = meta.at("top_k_cutoff").get<std::size_t>();
        m.metrics.pr_cutoff = meta.at("pr_cutoff").get<std::size_t>();
        m.limit = meta.at("limit").get<std::size_t>();
        for (const auto& c : meta.at("configs")) {
            ConfigResult r;
            r.config = config_from_json_text(c.at("config").dump());
            r.warnings = c.at("warnings").get<std::vector<std::string>>();
            by_id[r.config.id()] = report.results.size();
            report.results.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw FormatError(fmt::format("{}: {}", meta_path.string(), e.what()));
    }

    auto result_for = [&](const std::string& id, const std::string& source) -> ConfigResult& {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw FormatError(fmt::format("{}: unknown config '{}'", source, id));
        return report.results[it->second];
    };

    const CsvTable summary = read_csv(dir / "sweep_report.csv");
    {
        const auto c_id = summary.column("config_id"), c_top = summary.column("top20"), c_map = summary.column("map"),
                   c_p = summary.column("p_at_10"), c_r = summary.column("r_at_10"), c_ms = summary.column("wall_ms");
        for (const auto& row : summary.rows) {
            auto& r = result_for(row[c_id], summary.source);
            r.wall_ms = parse_double(row[c_ms], summary.source);
            if (row[c_top] == "NA") continue;
            EvalReport e;
            e.config_id = row[c_id];
            e.top_k = parse_double(row[c_top], summary.source);
            e.map = parse_double(row[c_map], summary.source);
            e.mean_precision = parse_double(row[c_p], summary.source);
            e.mean_recall = parse_double(row[c_r], summary.source);
            r.eval = std::move(e);
        }
    }

    const CsvTable queries = read_csv(dir / "sweep_queries.csv");
    {
        const auto c_id = queries.column("config_id"), c_q = queries.column("query_id"), c_avp = queries.column("avp"),
                   c_hit = queries.column("hit"), c_p = queries.column("precision"), c_r = queries.column("recall");
        for (const auto& row : queries.rows) {
            auto& r = result_for(row[c_id], queries.source);
            if (!r.eval) throw FormatError(fmt::format("{}: per-query rows for failed config '{}'", queries.source, row[c_id]));
            QueryEvaluation q;
            q.query_id = row[c_q];
            q.avp = parse_double(row[c_avp], queries.source);
            q.hit = static_cast<int>(parse_size(row[c_hit], queries.source));
            q.precision = parse_double(row[c_p], queries.source);
            q.recall = parse_double(row[c_r], queries.source);
            r.eval->per_query.push_back(std::move(q));
            r.rankings.push_back(RankedList{row[c_q], {}});
        }
    }

    const CsvTable rankings = read_csv(dir / "sweep_rankings.csv");
    {
        const auto c_id = rankings.column("config_id"), c_q = rankings.column("query_id"),
                   c_rank = rankings.column("rank"), c_l = rankings.column("lesson_id"),
                   c_s = rankings.column("score");
        for (const auto& row : rankings.rows) {
            auto& r = result_for(row[c_id], rankings.source);
            auto it = std::find_if(r.rankings.begin(), r.rankings.end(),
                                   [&](const RankedList& l) { return l.query_id == row[c_q]; });
            if (it == r.rankings.end())
                throw FormatError(fmt::format("{}: ranking for unknown query '{}'", rankings.source, row[c_q]));
            if (parse_size(row[c_rank], rankings.source) != it->entries.size() + 1)
                throw FormatError(fmt::format("{}: ranks out of sequence for {} / {}", rankings.source, row[c_id],
                                              row[c_q]));
            it->entries.push_back({row[c_l], parse_double(row[c_s], rankings.source)});
        }
    }

    const CsvTable errors = read_csv(dir / "sweep_errors.csv");
    {
        const auto c_id = errors.column("config_id"), c_e = errors.column("error");
        for (const auto& row : errors.rows) result_for(row[c_id], errors.source).error = row[c_e];
    }

    for (const auto& r : report.results) {
        if (!r.ok() && r.error.empty())
            throw FormatError(fmt::format("{}: config '{}' has neither results nor an error", dir.string(),
                                          r.config.id()));
    }
    return report;
}

std::string hsd_csv(const HsdResult& result) {
    std::string out = "group,mean,value\n";
    for (const auto& g : result.groups) out += fmt::format("{},{},{}\n", g.letters, num(g.mean), csv_field(g.label));
    return out;
}

std::string wilcoxon_csv(std::span<const TopPerformerComparison> comparisons) {
    std::string out = "comparison,treated,baseline,n_effective,statistic,p_value,method\n";
    for (const auto& c : comparisons)
        out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(c.label), csv_field(c.treated_id),
                           csv_field(c.baseline_id), c.test.n_effective, num(c.test.statistic), num(c.test.p_value),
                           to_string(c.test.method));
    return out;
}

std::string hsd_file_name(ModelKind family, Parameter parameter, Metric metric) {
    return fmt::format("hsd_{}_{}_{}.csv", to_string(family), to_string(parameter), to_string(metric));
}

std::string wilcoxon_file_name(ModelKind family, Metric metric) {
    return fmt::format("wilcoxon_{}_{}.csv", to_string(family), to_string(metric));
}

std::string render_markdown(const SweepReport& report) {
    const auto& m = report.metadata;
    std::string out;
    out += "# Lessons-learned classifier sweep\n\n";
    out += fmt::format("- lessons: {} (`{}`)\n- queries: {} (`{}`)\n- gold set: `{}`\n- tool version: {}\n", m.lesson_count,
                       m.corpus_hash, m.query_count, m.query_hash, m.gold_hash, m.tool_version);
    out += fmt::format("- retrieval limit {}, top-k cutoff {}, precision/recall cutoff {}\n\n", m.limit,
                       m.metrics.top_k_cutoff, m.metrics.pr_cutoff);

    std::vector<ModelKind> families;
    for (auto f : kFamilies)
        if (has_family(report, f)) families.push_back(f);

    for (auto metric : kReportMetrics) {
        out += fmt::format("## Best and worst classifiers ({})\n\n", metric_title(metric));
        for (auto f : families) {
            const auto ranked = rank_family(report, f, metric);
            out += fmt::format("### {}\n\n| Rank | Parameter values | {} |\n|---:|---|---:|\n", family_title(f),
                               metric_title(metric));
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                if (ranked.size() > 8 && i >= 4 && i + 4 < ranked.size()) continue;
                out += fmt::format("| {} | {} | {:.3f} |\n", ranked[i].rank, ranked[i].parameters, ranked[i].value);
            }
            out += '\n';
        }
    }

    out += "## Descriptive statistics\n\n| Statistic |";
    std::string rule = "|---|";
    for (auto f : families) {
        for (auto metric : kReportMetrics) {
            out += fmt::format(" {} {} |", family_title(f), metric_title(metric));
            rule += "---:|";
        }
    }
    out += "\n" + rule + "\n";
    std::vector<DescriptiveStats> columns;
    for (auto f : families) {
        for (auto metric : kReportMetrics) {
            std::vector<double> values;
            for (const auto& r : rank_family(report, f, metric)) values.push_back(r.value);
            columns.push_back(values.empty() ? DescriptiveStats{} : describe(values));
        }
    }
    const std::array<std::pair<const char*, double DescriptiveStats::*>, 6> rows{{{"Minimum", &DescriptiveStats::min},
                                                                                 {"1st Quartile", &DescriptiveStats::q1},
                                                                                 {"Mean", &DescriptiveStats::mean},
                                                                                 {"Median", &DescriptiveStats::median},
                                                                                 {"3rd Quartile", &DescriptiveStats::q3},
                                                                                 {"Maximum", &DescriptiveStats::max}}};
    for (const auto& [name, field] : rows) {
        out += fmt::format("| {} |", name);
        for (const auto& d : columns) out += fmt::format(" {:.3f} |", d.*field);
        out += '\n';
    }
    out += '\n';

    for (auto metric : kReportMetrics) {
        out += fmt::format("## Tukey HSD ({})\n\n", metric_title(metric));
        for (auto f : families) {
            for (auto p : parameters_for(f)) {
                out += fmt::format("### {}: {}\n\n", family_title(f), parameter_title(p));
                try {
                    const auto hsd = parameter_impact(report, f, p, metric);
                    out += fmt::format("| Group | Mean | {} |\n|---|---:|---|\n", parameter_title(p));
                    for (const auto& g : hsd.groups) out += fmt::format("| {} | {:.3f} | {} |\n", g.letters, g.mean, g.label);
                    out += fmt::format("\ncritical difference {:.4f} (q = {:.3f}, df = {})\n\n", hsd.critical_difference,
                                       hsd.q_critical, hsd.df_error);
                } catch (const Error& e) {
                    out += fmt::format("not available: {}\n\n", e.what());
                }
            }
        }
    }

    for (auto metric : kReportMetrics) {
        out += fmt::format("## Top performer comparisons ({})\n\n", metric_title(metric));
        for (auto f : families) {
            out += fmt::format("### {}\n\n", family_title(f));
            try {
                const auto cmp = top_performer_comparison(report, f, metric);
                out += "| Top performer classifier | Treated | Baseline | p-value |\n|---|---|---|---:|\n";
                for (const auto& c : cmp)
                    out += fmt::format("| {} | {} | {} | {:.3f} |\n", c.label, c.treated_id, c.baseline_id,
                                       c.test.p_value);
                out += '\n';
            } catch (const Error& e) {
                out += fmt::format("not available: {}\n\n", e.what());
            }
        }
    }

    const bool any_failed =
        std::any_of(report.results.begin(), report.results.end(), [](const ConfigResult& r) { return !r.ok(); });
    if (any_failed) {
        out += "## Failed configurations\n\n| Config | Error |\n|---|---|\n";
        for (const auto& r : report.results)
            if (!r.ok()) out += fmt::format("| {} | {} |\n", r.config.id(), r.error);
        out += '\n';
    }
    return out;
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::csv;
    if (text == "markdown" || text == "md") return ReportFormat::markdown;
    throw ConfigError(fmt::format("unknown report format '{}' (expected csv or markdown)", text));
}

std::vector<std::filesystem::path> emit_report(const SweepReport& report, ReportFormat format,
                                               const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", dir.string(), ec.message()));
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::string& bytes) {
        write_file(dir / name, bytes);
        written.push_back(dir / name);
    };
    if (format == ReportFormat::markdown) {
        emit("report.md", render_markdown(report));
        return written;
    }

    std::vector<ModelKind> families;
    for (auto f : kFamilies)
        if (has_family(report, f)) families.push_back(f);

    for (auto metric : kReportMetrics) {
        std::string csv = "family,rank,config_id,parameters,value\n";
        for (auto f : families)
            for (const auto& r : rank_family(report, f, metric))
                csv += fmt::format("{},{},{},{},{}\n", to_string(f), r.rank, csv_field(r.config_id),
                                   csv_field(r.parameters), num(r.value));
        emit(fmt::format("ranked_{}.csv", to_string(metric)), csv);
    }

    std::string desc = "family,metric,min,q1,mean,median,q3,max\n";
    for (auto f : families) {
        for (auto metric : kReportMetrics) {
            std::vector<double> values;
            for (const auto& r : rank_family(report, f, metric)) values.push_back(r.value);
            if (values.empty()) continue;
            const auto d = describe(values);
            desc += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(f), to_string(metric), num(d.min), num(d.q1),
                                num(d.mean), num(d.median), num(d.q3), num(d.max));
        }
    }
    emit("descriptive.csv", desc);

    for (auto metric : kReportMetrics) {
        for (auto f : families) {
            for (auto p : parameters_for(f)) emit(hsd_file_name(f, p, metric), hsd_csv(parameter_impact(report, f, p, metric)));
            emit(wilcoxon_file_name(f, metric), wilcoxon_csv(top_performer_comparison(report, f, metric)));
        }
    }
    return written;
}

}  // namespace llrecall
