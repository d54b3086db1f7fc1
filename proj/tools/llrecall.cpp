// SPDX-License-Identifier: Apache-2.0
// llrecall: build, query and evaluate lessons-learned classifiers.
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "llrecall/corpus.hpp"
#include "llrecall/error.hpp"
#include "llrecall/harness.hpp"
#include "llrecall/persist.hpp"
#include "llrecall/report.hpp"

namespace {

using namespace llrecall;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("LLRECALL_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    const std::string_view text(raw);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError(fmt::format("LLRECALL_SEED='{}' is not an unsigned integer", text));
    return v;
}

// --seed wins over LLRECALL_SEED; unset leaves the existing value.
void apply_seed(std::optional<std::uint64_t> flag, std::uint64_t& target) {
    if (flag) {
        target = *flag;
    } else if (auto env = env_seed()) {
        target = *env;
    }
}

Stoplist stoplist_from(const std::string& path) {
    return path.empty() ? Stoplist::default_list() : Stoplist::from_file(path);
}

std::string snippet(const std::string& text, std::size_t width = 72) {
    if (text.size() <= width) return text;
    return text.substr(0, width - 3) + "...";
}

// ---------------------------------------------------------------------------

struct IngestArgs {
    std::string lessons, queries, gold;
};

int cmd_ingest(const IngestArgs& a) {
    const auto lessons = load_lessons(a.lessons);
    std::vector<QueryRecord> queries;
    if (!a.queries.empty()) queries = load_queries(a.queries);
    std::optional<GoldSet> gold;
    if (!a.gold.empty()) {
        if (a.queries.empty()) throw ConfigError("--gold needs --queries");
        gold = load_goldset(a.gold, lessons, queries);
    }
    const auto s = summarize(lessons, queries);
    fmt::print("lessons: {}\nqueries: {}\n", s.lesson_count, s.query_count);
    if (gold) fmt::print("gold entries: {}\n", gold->size());
    fmt::print("projects: {}\n", s.project_counts.size());
    for (const auto& [project, n] : s.project_counts) fmt::print("  {}: {} lessons\n", project, n);
    return kExitOk;
}

struct BuildArgs {
    std::string lessons, out, stopwords;
    std::string model = "vsm";
    std::string pipeline = "none";
    std::string weight = "tf-idf";
    std::string similarity = "cosine";
    std::size_t topics = 32;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    double beta = 0.01;
    std::size_t max_iterations = 2000;
};

ClassifierConfig config_from(const BuildArgs& a) {
    const auto model = parse_model_kind(a.model);
    const auto pipeline = PipelineConfig::parse(a.pipeline);
    switch (model) {
        case ModelKind::vsm:
            return ClassifierConfig::make_vsm(pipeline, parse_weight_scheme(a.weight), parse_similarity(a.similarity));
        case ModelKind::lsi: return ClassifierConfig::make_lsi(pipeline, parse_weight_scheme(a.weight), a.topics);
        case ModelKind::lda: {
            LdaParams p;
            p.alpha = a.alpha;
            p.beta = a.beta;
            p.max_iterations = a.max_iterations;
            apply_seed(a.seed, p.seed);
            return ClassifierConfig::make_lda(pipeline, a.topics, p);
        }
    }
    throw ConfigError("unknown model");
}

int cmd_build(const BuildArgs& a) {
    const auto config = config_from(a);
    config.validate();
    const auto lessons = load_lessons(a.lessons);
    const auto classifier = build_classifier(config, lessons, stoplist_from(a.stopwords));
    persist_index(classifier, a.out);
    fmt::print("built {} over {} lessons -> {}\n", config.id(), lessons.size(), a.out);
    return kExitOk;
}

struct QueryArgs {
    std::string index, text, query_file;
    std::size_t limit = 20;
    bool json = false;
};

void print_result(const Classifier& c, const RankedList& list, bool as_json,
                  const std::map<std::string, std::string>& texts) {
    if (as_json) {
        json results = json::array();
        for (std::size_t i = 0; i < list.entries.size(); ++i) {
            const auto& e = list.entries[i];
            results.push_back({{"rank", i + 1}, {"lesson_id", e.lesson_id}, {"score", e.score},
                               {"text", texts.at(e.lesson_id)}});
        }
        std::cout << json{{"query_id", list.query_id}, {"classifier", c.config().id()}, {"results", results}}.dump()
                  << '\n';
        return;
    }
    fmt::print("query {}\n", list.query_id);
    if (list.empty()) {
        fmt::print("  no relevant lessons\n");
        return;
    }
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        const auto& e = list.entries[i];
        fmt::print("  {:>3}. {}  {:.6f}  {}\n", i + 1, e.lesson_id, e.score, snippet(texts.at(e.lesson_id)));
    }
}

int cmd_query(const QueryArgs& a) {
    if (a.text.empty() == a.query_file.empty()) throw ConfigError("give exactly one of --text or --query-file");
    const auto classifier = load_index(a.index);
    std::map<std::string, std::string> texts;
    for (std::size_t i = 0; i < classifier.doc_ids().size(); ++i)
        texts[classifier.doc_ids()[i]] = classifier.doc_texts()[i];
    if (!a.text.empty()) {
        auto list = classifier.query(a.text, a.limit);
        list.query_id = "text";
        print_result(classifier, list, a.json, texts);
        return kExitOk;
    }
    const auto queries = load_queries(a.query_file);
    for (const auto& list : run_queries(classifier, queries, a.limit)) print_result(classifier, list, a.json, texts);
    return kExitOk;
}

struct EvalArgs {
    std::string index, queries, gold;
    std::size_t limit = 20;
    std::size_t top_k = 20;
    std::size_t pr_k = 10;
    bool json = false;
};

int cmd_eval(const EvalArgs& a) {
    const auto classifier = load_index(a.index);
    std::vector<LessonRecord> lessons;
    for (std::size_t i = 0; i < classifier.doc_ids().size(); ++i)
        lessons.push_back({classifier.doc_ids()[i], "", classifier.doc_texts()[i]});
    const auto queries = load_queries(a.queries);
    const auto gold = load_goldset(a.gold, lessons, queries);
    const MetricConfig metrics{a.top_k, a.pr_k};
    metrics.validate();
    const auto lists = run_queries(classifier, queries, a.limit);
    const auto r = evaluate(classifier.config().id(), lists, gold, metrics);
    if (a.json) {
        json per = json::array();
        for (const auto& q : r.per_query)
            per.push_back({{"query_id", q.query_id}, {"avp", q.avp}, {"hit", q.hit}, {"precision", q.precision},
                           {"recall", q.recall}});
        std::cout << json{{"config_id", r.config_id}, {"top_k", r.top_k}, {"map", r.map},
                          {"precision", r.mean_precision}, {"recall", r.mean_recall}, {"per_query", per}}
                         .dump(2)
                  << '\n';
        return kExitOk;
    }
    fmt::print("classifier {}\n", r.config_id);
    fmt::print("{:<12} {:>8} {:>4} {:>8} {:>8}\n", "query", "avp", "hit",
               fmt::format("P@{}", a.pr_k), fmt::format("R@{}", a.pr_k));
    for (const auto& q : r.per_query)
        fmt::print("{:<12} {:>8.4f} {:>4} {:>8.4f} {:>8.4f}\n", q.query_id, q.avp, q.hit, q.precision, q.recall);
    fmt::print("top-{} {:.4f}  MAP {:.4f}  P@{} {:.4f}  R@{} {:.4f}\n", a.top_k, r.top_k, r.map, a.pr_k,
               r.mean_precision, a.pr_k, r.mean_recall);
    return kExitOk;
}

struct SweepArgs {
    std::string lessons, queries, gold, stopwords;
    std::string grid = "paper";
    std::string out = "sweep";
    std::size_t workers = 1;
    std::size_t limit = 20;
    std::size_t top_k = 20;
    std::size_t pr_k = 10;
    std::optional<std::uint64_t> seed;
    bool omit_timing = false;
};

int cmd_sweep(const SweepArgs& a) {
    auto grid = a.grid == "paper" ? ParameterGrid::paper() : ParameterGrid::load(a.grid);
    apply_seed(a.seed, grid.lda.seed);
    const auto lessons = load_lessons(a.lessons);
    const auto queries = load_queries(a.queries);
    const auto gold = load_goldset(a.gold, lessons, queries);
    SweepOptions options;
    options.metrics = {a.top_k, a.pr_k};
    options.limit = a.limit;
    options.workers = a.workers;
    const auto report = run_sweep(lessons, queries, gold, grid, options, stoplist_from(a.stopwords));
    write_sweep(report, a.out, a.omit_timing);
    std::size_t failed = 0;
    for (const auto& r : report.results) {
        if (r.ok()) continue;
        ++failed;
        fmt::print(stderr, "config {} failed: {}\n", r.config.id(), r.error);
    }
    fmt::print("{} configs evaluated ({} failed) -> {}\n", report.results.size(), failed, a.out);
    return kExitOk;
}

struct StatsArgs {
    std::string sweep = "sweep";
    std::string out;
    std::string family = "all";
    std::string param = "all";
    std::string metric = "all";
};

int cmd_stats(const StatsArgs& a) {
    const auto report = load_sweep(a.sweep);
    const std::filesystem::path out = a.out.empty() ? std::filesystem::path(a.sweep) : std::filesystem::path(a.out);
    std::filesystem::create_directories(out);

    std::vector<ModelKind> families;
    if (a.family == "all") {
        for (auto f : {ModelKind::vsm, ModelKind::lsi, ModelKind::lda}) {
            for (const auto& r : report.results) {
                if (r.config.model == f) {
                    families.push_back(f);
                    break;
                }
            }
        }
    } else {
        families.push_back(parse_model_kind(a.family));
    }
    const std::vector<Metric> metrics =
        a.metric == "all" ? std::vector<Metric>{Metric::top_k, Metric::map} : std::vector<Metric>{parse_metric(a.metric)};

    auto write = [&](const std::string& name, const std::string& bytes) {
        std::ofstream f(out / name, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError(fmt::format("cannot write '{}'", (out / name).string()));
        f << bytes;
        fmt::print("wrote {}\n", (out / name).string());
    };

    for (auto family : families) {
        std::vector<Parameter> params;
        if (a.param == "all") {
            params = parameters_for(family);
        } else {
            const auto p = parse_parameter(a.param);
            const auto valid = parameters_for(family);
            if (std::find(valid.begin(), valid.end(), p) == valid.end())
                throw ConfigError(fmt::format("parameter '{}' does not vary within {}", a.param, to_string(family)));
            params.push_back(p);
        }
        for (auto metric : metrics) {
            for (auto p : params) {
                const auto hsd = parameter_impact(report, family, p, metric);
                fmt::print("{} {} {}: critical difference {:.4f}\n", to_string(family), to_string(p),
                           to_string(metric), hsd.critical_difference);
                for (const auto& g : hsd.groups) fmt::print("  {:<4} {:.4f}  {}\n", g.letters, g.mean, g.label);
                write(hsd_file_name(family, p, metric), hsd_csv(hsd));
            }
            if (a.param == "all") {
                const auto cmp = top_performer_comparison(report, family, metric);
                for (const auto& c : cmp) fmt::print("  {:<24} p = {:.4f}\n", c.label, c.test.p_value);
                write(wilcoxon_file_name(family, metric), wilcoxon_csv(cmp));
            }
        }
    }
    return kExitOk;
}

struct ReportArgs {
    std::string sweep = "sweep";
    std::string out;
    std::string format = "markdown";
};

int cmd_report(const ReportArgs& a) {
    const auto format = parse_report_format(a.format);
    const auto report = load_sweep(a.sweep);
    const std::filesystem::path out = a.out.empty() ? std::filesystem::path(a.sweep) : std::filesystem::path(a.out);
    for (const auto& p : emit_report(report, format, out)) fmt::print("wrote {}\n", p.string());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lessons-learned recall: build, query and evaluate IR classifiers"};
    app.set_version_flag("--version", llrecall::tool_version());
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Validate lessons, queries and gold set; print a summary");
    c_ingest->add_option("--lessons", ingest.lessons, "Lessons JSON-Lines file")->required();
    c_ingest->add_option("--queries", ingest.queries, "Queries JSON-Lines file");
    c_ingest->add_option("--gold", ingest.gold, "Gold set JSON file (needs --queries)");

    BuildArgs build;
    auto* c_build = app.add_subcommand("build", "Build one classifier from lessons and persist it");
    c_build->add_option("--lessons", build.lessons, "Lessons JSON-Lines file")->required();
    c_build->add_option("--out", build.out, "Index file to write")->required();
    c_build->add_option("--model", build.model, "vsm, lsi or lda")->capture_default_str();
    c_build->add_option("--pipeline", build.pipeline, "none, stem, stop or stopstem")->capture_default_str();
    c_build->add_option("--weight", build.weight, "boolean, tf-idf or sublinear-tf-idf (vsm, lsi)")
        ->capture_default_str();
    c_build->add_option("--similarity", build.similarity, "cosine or overlap (vsm)")->capture_default_str();
    c_build->add_option("--topics", build.topics, "Topics (lsi, lda)")->capture_default_str();
    c_build->add_option("--seed", build.seed, "LDA seed (default: LLRECALL_SEED, else 42)");
    c_build->add_option("--alpha", build.alpha, "LDA document-topic prior (default: 50/topics)");
    c_build->add_option("--beta", build.beta, "LDA topic-word prior")->capture_default_str();
    c_build->add_option("--max-iterations", build.max_iterations, "LDA Gibbs sweep cap")->capture_default_str();
    c_build->add_option("--stoplist,--stopwords", build.stopwords, "Stop-word file, one word per line (default: bundled list)");

    QueryArgs query;
    auto* c_query = app.add_subcommand("query", "Rank lessons for a query against a persisted index");
    c_query->add_option("--index", query.index, "Index file from build")->required();
    c_query->add_option("--text", query.text, "Query text");
    c_query->add_option("--query-file", query.query_file, "Queries JSON-Lines file; one result block per record");
    c_query->add_option("--limit", query.limit, "Maximum results per query")->capture_default_str();
    c_query->add_flag("--json", query.json, "One JSON object per query instead of text");

    EvalArgs eval;
    auto* c_eval = app.add_subcommand("eval", "Evaluate a persisted index against queries and a gold set");
    c_eval->add_option("--index", eval.index, "Index file from build")->required();
    c_eval->add_option("--queries", eval.queries, "Queries JSON-Lines file")->required();
    c_eval->add_option("--gold", eval.gold, "Gold set JSON file")->required();
    c_eval->add_option("--limit", eval.limit, "Ranked list length")->capture_default_str();
    c_eval->add_option("--top-k", eval.top_k, "Top-k hit cutoff")->capture_default_str();
    c_eval->add_option("--pr-k", eval.pr_k, "Precision/recall cutoff")->capture_default_str();
    c_eval->add_flag("--json", eval.json, "JSON output");

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Build and evaluate every config of a parameter grid");
    c_sweep->add_option("--lessons", sweep.lessons, "Lessons JSON-Lines file")->required();
    c_sweep->add_option("--queries", sweep.queries, "Queries JSON-Lines file")->required();
    c_sweep->add_option("--gold", sweep.gold, "Gold set JSON file")->required();
    c_sweep->add_option("--grid", sweep.grid, "'paper' (88 configs) or a grid JSON file")->capture_default_str();
    c_sweep->add_option("--out", sweep.out, "Output directory")->capture_default_str();
    c_sweep->add_option("--workers", sweep.workers, "Configs evaluated concurrently")->capture_default_str();
    c_sweep->add_option("--limit", sweep.limit, "Ranked list length")->capture_default_str();
    c_sweep->add_option("--top-k", sweep.top_k, "Top-k hit cutoff")->capture_default_str();
    c_sweep->add_option("--pr-k", sweep.pr_k, "Precision/recall cutoff")->capture_default_str();
    c_sweep->add_option("--seed", sweep.seed, "LDA seed (default: LLRECALL_SEED, else grid value 42)");
    c_sweep->add_option("--stoplist,--stopwords", sweep.stopwords, "Stop-word file, one word per line (default: bundled list)");
    c_sweep->add_flag("--omit-timing", sweep.omit_timing, "Write wall_ms as 0 for byte-stable output");

    StatsArgs stats;
    auto* c_stats = app.add_subcommand("stats", "Tukey HSD parameter impact and Wilcoxon top-performer tests");
    c_stats->add_option("--sweep", stats.sweep, "Sweep output directory")->capture_default_str();
    c_stats->add_option("--out", stats.out, "Output directory (default: the sweep directory)");
    c_stats->add_option("--family", stats.family, "vsm, lsi, lda or all")->capture_default_str();
    c_stats->add_option("--param", stats.param, "pipeline, weight, similarity, topics or all")->capture_default_str();
    c_stats->add_option("--metric", stats.metric, "top20, map, p_at_10, r_at_10 or all (top20 and map)")
        ->capture_default_str();

    ReportArgs report;
    auto* c_report = app.add_subcommand("report", "Ranked, descriptive, HSD and Wilcoxon tables for a sweep");
    c_report->add_option("--sweep", report.sweep, "Sweep output directory")->capture_default_str();
    c_report->add_option("--out", report.out, "Output directory (default: the sweep directory)");
    c_report->add_option("--format", report.format, "csv or markdown")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitDomain;
    }

    try {
        if (c_ingest->parsed()) return cmd_ingest(ingest);
        if (c_build->parsed()) return cmd_build(build);
        if (c_query->parsed()) return cmd_query(query);
        if (c_eval->parsed()) return cmd_eval(eval);
        if (c_sweep->parsed()) return cmd_sweep(sweep);
        if (c_stats->parsed()) return cmd_stats(stats);
        if (c_report->parsed()) return cmd_report(report);
    } catch (const IoError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitIo;
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitDomain;
    }
    return kExitDomain;
}
