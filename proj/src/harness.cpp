// SPDX-License-Identifier: Apache-2.0
#include "llrecall/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "llrecall/error.hpp"

#ifndef LLRECALL_VERSION
#define LLRECALL_VERSION "0.0.0"
#endif

namespace llrecall {

using nlohmann::json;

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::vsm: return "vsm";
        case ModelKind::lsi: return "lsi";
        case ModelKind::lda: return "lda";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view text) {
    if (text == "vsm") return ModelKind::vsm;
    if (text == "lsi") return ModelKind::lsi;
    if (text == "lda") return ModelKind::lda;
    throw ConfigError(fmt::format("unknown model '{}' (expected vsm, lsi or lda)", text));
}

// ---------------------------------------------------------------------------
// ClassifierConfig

ClassifierConfig ClassifierConfig::make_vsm(PipelineConfig p, WeightScheme w, SimilarityKind s) {
    ClassifierConfig c;
    c.model = ModelKind::vsm;
    c.pipeline = p;
    c.weight = w;
    c.similarity = s;
    return c;
}

ClassifierConfig ClassifierConfig::make_lsi(PipelineConfig p, WeightScheme w, std::size_t topics) {
    ClassifierConfig c;
    c.model = ModelKind::lsi;
    c.pipeline = p;
    c.weight = w;
    c.topics = topics;
    return c;
}

ClassifierConfig ClassifierConfig::make_lda(PipelineConfig p, std::size_t topics, LdaParams params) {
    ClassifierConfig c;
    c.model = ModelKind::lda;
    c.pipeline = p;
    c.topics = topics;
    c.lda = params;
    return c;
}

std::string ClassifierConfig::id() const {
    switch (model) {
        case ModelKind::vsm:
            return fmt::format("vsm-{}-{}-{}", pipeline.name(), weight ? to_string(*weight) : "?",
                               similarity ? to_string(*similarity) : "?");
        case ModelKind::lsi:
            return fmt::format("lsi-{}-{}-k{}", pipeline.name(), weight ? to_string(*weight) : "?",
                               topics.value_or(0));
        case ModelKind::lda: {
            const LdaParams p = lda.value_or(LdaParams{});
            const LdaParams defaults;
            std::string id = fmt::format("lda-{}-k{}-s{}", pipeline.name(), topics.value_or(0), p.seed);
            if (p.alpha) id += fmt::format("-a{}", *p.alpha);
            if (p.beta != defaults.beta) id += fmt::format("-b{}", p.beta);
            if (p.max_iterations != defaults.max_iterations) id += fmt::format("-i{}", p.max_iterations);
            if (p.convergence_window != defaults.convergence_window) id += fmt::format("-w{}", p.convergence_window);
            if (p.convergence_tol != defaults.convergence_tol) id += fmt::format("-t{}", p.convergence_tol);
            return id;
        }
    }
    return "?";
}

std::string_view ClassifierConfig::similarity_label() const {
    switch (model) {
        case ModelKind::vsm: return similarity ? to_string(*similarity) : "?";
        case ModelKind::lsi: return "cosine";
        case ModelKind::lda: return "conditional-probability";
    }
    return "?";
}

void ClassifierConfig::validate() const {
    const bool want_weight = model != ModelKind::lda;
    const bool want_similarity = model == ModelKind::vsm;
    const bool want_topics = model != ModelKind::vsm;
    const bool want_lda = model == ModelKind::lda;
    if (weight.has_value() != want_weight || similarity.has_value() != want_similarity ||
        topics.has_value() != want_topics || lda.has_value() != want_lda)
        throw ConfigError(fmt::format("config fields do not match model kind {}", to_string(model)));
    if (topics && *topics == 0) throw ConfigError("number of topics must be at least 1");
    if (want_lda) lda_config().validate();
}

LdaConfig ClassifierConfig::lda_config() const {
    const LdaParams p = lda.value_or(LdaParams{});
    LdaConfig c;
    c.topics = topics.value_or(0);
    c.alpha = p.alpha;
    c.beta = p.beta;
    c.max_iterations = p.max_iterations;
    c.convergence_window = p.convergence_window;
    c.convergence_tol = p.convergence_tol;
    c.seed = p.seed;
    c.pipeline = pipeline;
    return c;
}

// ---------------------------------------------------------------------------
// Grid

ParameterGrid ParameterGrid::paper() {
    return ParameterGrid{};
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const json& j, const char* key, Parse parse) {
    if (!j.is_array()) throw ConfigError(fmt::format("grid key '{}' must be an array", key));
    std::vector<T> out;
    for (const auto& v : j) out.push_back(parse(v));
    if (out.empty()) throw ConfigError(fmt::format("grid key '{}' must not be empty", key));
    return out;
}

std::string as_string(const json& v) {
    if (!v.is_string()) throw ConfigError("expected a string in grid file");
    return v.get<std::string>();
}

std::size_t as_count(const json& v) {
    if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
        throw ConfigError("expected a positive integer in grid file");
    return v.get<std::size_t>();
}

}  // namespace

ParameterGrid ParameterGrid::from_json_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("malformed grid file ({})", e.what()));
    }
    if (!doc.is_object()) throw ConfigError("grid file must be a JSON object");
    ParameterGrid g;
    try {
        if (doc.contains("models"))
            g.models = parse_list<ModelKind>(doc["models"], "models",
                                             [](const json& v) { return parse_model_kind(as_string(v)); });
        if (doc.contains("pipelines"))
            g.pipelines = parse_list<PipelineConfig>(doc["pipelines"], "pipelines",
                                                     [](const json& v) { return PipelineConfig::parse(as_string(v)); });
        auto weights = [](const json& v) { return parse_weight_scheme(as_string(v)); };
        if (doc.contains("vsm")) {
            const auto& v = doc["vsm"];
            if (v.contains("weights")) g.vsm_weights = parse_list<WeightScheme>(v["weights"], "vsm.weights", weights);
            if (v.contains("similarities"))
                g.vsm_similarities = parse_list<SimilarityKind>(
                    v["similarities"], "vsm.similarities", [](const json& x) { return parse_similarity(as_string(x)); });
        }
        if (doc.contains("lsi")) {
            const auto& v = doc["lsi"];
            if (v.contains("weights")) g.lsi_weights = parse_list<WeightScheme>(v["weights"], "lsi.weights", weights);
            if (v.contains("topics")) g.lsi_topics = parse_list<std::size_t>(v["topics"], "lsi.topics", as_count);
        }
        if (doc.contains("lda")) {
            const auto& v = doc["lda"];
            if (v.contains("topics")) g.lda_topics = parse_list<std::size_t>(v["topics"], "lda.topics", as_count);
            if (v.contains("alpha") && !v["alpha"].is_null()) g.lda.alpha = v["alpha"].get<double>();
            if (v.contains("beta")) g.lda.beta = v["beta"].get<double>();
            if (v.contains("max_iterations")) g.lda.max_iterations = as_count(v["max_iterations"]);
            if (v.contains("convergence_window")) g.lda.convergence_window = as_count(v["convergence_window"]);
            if (v.contains("convergence_tol")) g.lda.convergence_tol = v["convergence_tol"].get<double>();
            if (v.contains("seed")) g.lda.seed = v["seed"].get<std::uint64_t>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("invalid grid file ({})", e.what()));
    }
    return g;
}

ParameterGrid ParameterGrid::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open grid file '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::vector<ClassifierConfig> enumerate_configs(const ParameterGrid& grid) {
    std::vector<ClassifierConfig> out;
    for (const ModelKind model : grid.models) {
        for (const PipelineConfig& p : grid.pipelines) {
            switch (model) {
                case ModelKind::vsm:
                    for (const auto w : grid.vsm_weights)
                        for (const auto s : grid.vsm_similarities) out.push_back(ClassifierConfig::make_vsm(p, w, s));
                    break;
                case ModelKind::lsi:
                    for (const auto w : grid.lsi_weights)
                        for (const auto k : grid.lsi_topics) out.push_back(ClassifierConfig::make_lsi(p, w, k));
                    break;
                case ModelKind::lda:
                    for (const auto k : grid.lda_topics) out.push_back(ClassifierConfig::make_lda(p, k, grid.lda));
                    break;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classifier

Classifier::Classifier(ClassifierConfig config, Model model) : config_(std::move(config)), model_(std::move(model)) {}

RankedList Classifier::query(std::string_view text, std::size_t limit) const {
    return std::visit([&](const auto& m) { return m->query(text, limit); }, model_);
}

const std::vector<std::string>& Classifier::doc_ids() const {
    struct Visitor {
        const std::vector<std::string>& operator()(const std::shared_ptr<const VsmIndex>& m) const { return m->doc_ids(); }
        const std::vector<std::string>& operator()(const std::shared_ptr<const LsiSpace>& m) const {
            return m->index().doc_ids();
        }
        const std::vector<std::string>& operator()(const std::shared_ptr<const LdaModel>& m) const { return m->doc_ids(); }
    };
    return std::visit(Visitor{}, model_);
}

const std::vector<std::string>& Classifier::doc_texts() const {
    struct Visitor {
        const std::vector<std::string>& operator()(const std::shared_ptr<const VsmIndex>& m) const {
            return m->doc_texts();
        }
        const std::vector<std::string>& operator()(const std::shared_ptr<const LsiSpace>& m) const {
            return m->index().doc_texts();
        }
        const std::vector<std::string>& operator()(const std::shared_ptr<const LdaModel>& m) const {
            return m->doc_texts();
        }
    };
    return std::visit(Visitor{}, model_);
}

std::vector<std::string> Classifier::warnings() const {
    if (const auto* lsi = std::get_if<std::shared_ptr<const LsiSpace>>(&model_)) return (*lsi)->warnings();
    return {};
}

Classifier build_classifier(const ClassifierConfig& config, std::span<const LessonRecord> lessons,
                            const Stoplist& stoplist) {
    config.validate();
    switch (config.model) {
        case ModelKind::vsm:
            return Classifier(config, std::make_shared<const VsmIndex>(VsmIndex::build(
                                          lessons, config.pipeline, *config.weight, *config.similarity, stoplist)));
        case ModelKind::lsi: {
            auto index = std::make_shared<const VsmIndex>(
                VsmIndex::build(lessons, config.pipeline, *config.weight, SimilarityKind::cosine, stoplist));
            return Classifier(config, std::make_shared<const LsiSpace>(LsiSpace::build(index, *config.topics)));
        }
        case ModelKind::lda:
            return Classifier(config,
                              std::make_shared<const LdaModel>(LdaModel::train(lessons, config.lda_config(), stoplist)));
    }
    throw ConfigError("unknown model kind");
}

std::vector<RankedList> run_queries(const Classifier& classifier, std::span<const QueryRecord> queries,
                                    std::size_t limit) {
    std::vector<RankedList> out;
    out.reserve(queries.size());
    for (const auto& q : queries) {
        RankedList l = classifier.query(q.text, limit);
        l.query_id = q.id;
        out.push_back(std::move(l));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweep

std::string tool_version() {
    return LLRECALL_VERSION;
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("fnv1a64:{:016x}", h);
}

std::string hash_lessons(std::span<const LessonRecord> lessons) {
    std::ostringstream out;
    write_lessons(out, lessons);
    return content_hash(out.str());
}

std::string hash_queries(std::span<const QueryRecord> queries) {
    std::ostringstream out;
    write_queries(out, queries);
    return content_hash(out.str());
}

std::string hash_goldset(const GoldSet& gold) {
    std::ostringstream out;
    write_goldset(out, gold);
    return content_hash(out.str());
}

const ConfigResult& SweepReport::find(std::string_view config_id) const {
    for (const auto& r : results) {
        if (r.config.id() == config_id) return r;
    }
    throw ConfigError(fmt::format("no config '{}' in sweep report", config_id));
}

namespace {

ConfigResult run_one(const ClassifierConfig& config, std::span<const LessonRecord> lessons,
                     std::span<const QueryRecord> queries, const GoldSet& gold, const SweepOptions& options,
                     const Stoplist& stoplist) {
    ConfigResult r;
    r.config = config;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Classifier c = build_classifier(config, lessons, stoplist);
        r.warnings = c.warnings();
        r.rankings = run_queries(c, queries, options.limit);
        r.eval = evaluate(config.id(), r.rankings, gold, options.metrics);
    } catch (const std::exception& e) {
        r.error = e.what();
        r.eval.reset();
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace

SweepReport run_sweep(std::span<const LessonRecord> lessons, std::span<const QueryRecord> queries,
                      const GoldSet& gold, const ParameterGrid& grid, const SweepOptions& options,
                      const Stoplist& stoplist) {
    options.metrics.validate();
    if (options.limit == 0) throw ConfigError("retrieval limit must be at least 1");
    if (queries.empty()) throw ValidationError("no queries to evaluate");
    for (const auto& q : queries) {
        if (!gold.contains(q.id))
            throw ValidationError(fmt::format("query '{}' has no gold-set entry; evaluation aborted", q.id));
    }

    const auto configs = enumerate_configs(grid);
    SweepReport report;
    report.metadata.corpus_hash = hash_lessons(lessons);
    report.metadata.query_hash = hash_queries(queries);
    report.metadata.gold_hash = hash_goldset(gold);
    report.metadata.tool_version = tool_version();
    report.metadata.lesson_count = lessons.size();
    report.metadata.query_count = queries.size();
    report.metadata.metrics = options.metrics;
    report.metadata.limit = options.limit;
    report.results.resize(configs.size());

    const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, configs.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++)
            report.results[i] = run_one(configs[i], lessons, queries, gold, options, stoplist);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Parameter impact and top performers

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::top_k: return "top20";
        case Metric::map: return "map";
        case Metric::precision: return "p_at_10";
        case Metric::recall: return "r_at_10";
    }
    return "?";
}

std::string_view to_string(Parameter parameter) {
    switch (parameter) {
        case Parameter::pipeline: return "pipeline";
        case Parameter::weight: return "weight";
        case Parameter::similarity: return "similarity";
        case Parameter::topics: return "topics";
    }
    return "?";
}

Metric parse_metric(std::string_view text) {
    if (text == "top20" || text == "topk" || text == "top_k") return Metric::top_k;
    if (text == "map") return Metric::map;
    if (text == "p_at_10" || text == "precision") return Metric::precision;
    if (text == "r_at_10" || text == "recall") return Metric::recall;
    throw ConfigError(fmt::format("unknown metric '{}' (expected top20, map, p_at_10 or r_at_10)", text));
}

Parameter parse_parameter(std::string_view text) {
    if (text == "pipeline" || text == "preprocessing") return Parameter::pipeline;
    if (text == "weight") return Parameter::weight;
    if (text == "similarity") return Parameter::similarity;
    if (text == "topics") return Parameter::topics;
    throw ConfigError(fmt::format("unknown parameter '{}'", text));
}

std::vector<Parameter> parameters_for(ModelKind family) {
    switch (family) {
        case ModelKind::vsm: return {Parameter::pipeline, Parameter::similarity, Parameter::weight};
        case ModelKind::lsi: return {Parameter::pipeline, Parameter::topics, Parameter::weight};
        case ModelKind::lda: return {Parameter::pipeline, Parameter::topics};
    }
    return {};
}

double aggregate_value(const EvalReport& report, Metric metric) {
    switch (metric) {
        case Metric::top_k: return report.top_k;
        case Metric::map: return report.map;
        case Metric::precision: return report.mean_precision;
        case Metric::recall: return report.mean_recall;
    }
    return 0.0;
}

double query_value(const QueryEvaluation& q, Metric metric) {
    switch (metric) {
        case Metric::top_k: return q.hit;
        case Metric::map: return q.avp;
        case Metric::precision: return q.precision;
        case Metric::recall: return q.recall;
    }
    return 0.0;
}

std::string parameter_value(const ClassifierConfig& config, Parameter parameter) {
    switch (parameter) {
        case Parameter::pipeline: return std::string(config.pipeline.label());
        case Parameter::weight:
            if (config.weight) return std::string(to_string(*config.weight));
            break;
        case Parameter::similarity:
            if (config.similarity) return std::string(to_string(*config.similarity));
            break;
        case Parameter::topics:
            if (config.topics) return std::to_string(*config.topics);
            break;
    }
    throw ConfigError(fmt::format("config '{}' has no {} parameter", config.id(), to_string(parameter)));
}

namespace {

std::vector<const ConfigResult*> family_results(const SweepReport& report, ModelKind family) {
    std::vector<const ConfigResult*> out;
    for (const auto& r : report.results) {
        if (r.config.model != family) continue;
        if (!r.ok())
            throw ConfigError(fmt::format("results for {} are incomplete: '{}' failed ({})", to_string(family),
                                          r.config.id(), r.error));
        out.push_back(&r);
    }
    if (out.empty()) throw ConfigError(fmt::format("sweep report has no {} results", to_string(family)));
    return out;
}

}  // namespace

HsdResult parameter_impact(const SweepReport& report, ModelKind family, Parameter parameter, Metric metric,
                           double alpha) {
    const auto params = parameters_for(family);
    if (std::find(params.begin(), params.end(), parameter) == params.end())
        throw ConfigError(fmt::format("parameter {} does not apply to {}", to_string(parameter), to_string(family)));

    std::vector<SampleGroup> groups;
    for (const auto* r : family_results(report, family)) {
        const std::string value = parameter_value(r->config, parameter);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const SampleGroup& g) { return g.label == value; });
        if (it == groups.end()) {
            groups.push_back({value, {}});
            it = std::prev(groups.end());
        }
        it->samples.push_back(aggregate_value(*r->eval, metric));
    }
    return tukey_hsd(groups, alpha);
}

std::vector<TopPerformerComparison> top_performer_comparison(const SweepReport& report, ModelKind family,
                                                             Metric metric) {
    const auto results = family_results(report, family);
    auto best_with = [&](PipelineConfig p) -> const ConfigResult& {
        const ConfigResult* best = nullptr;
        for (const auto* r : results) {
            if (r->config.pipeline != p) continue;
            if (best == nullptr) {
                best = r;
                continue;
            }
            const double a = aggregate_value(*r->eval, metric);
            const double b = aggregate_value(*best->eval, metric);
            if (a > b || (a == b && r->config.id() < best->config.id())) best = r;
        }
        if (best == nullptr)
            throw ConfigError(fmt::format("no {} results for pipeline {}", to_string(family), p.label()));
        return *best;
    };

    const PipelineConfig none{false, false};
    const ConfigResult& baseline = best_with(none);
    std::vector<TopPerformerComparison> out;
    for (const PipelineConfig p : {PipelineConfig{false, true}, PipelineConfig{true, false}, PipelineConfig{true, true}}) {
        const ConfigResult& treated = best_with(p);
        const auto& tq = treated.eval->per_query;
        const auto& bq = baseline.eval->per_query;
        if (tq.size() != bq.size()) throw ConfigError("per-query results differ in length");
        std::vector<double> a;
        std::vector<double> b;
        for (std::size_t i = 0; i < tq.size(); ++i) {
            if (tq[i].query_id != bq[i].query_id) throw ConfigError("per-query results are not aligned");
            a.push_back(query_value(tq[i], metric));
            b.push_back(query_value(bq[i], metric));
        }
        TopPerformerComparison cmp;
        cmp.label = fmt::format("{} vs none", p.label());
        cmp.treated_id = treated.config.id();
        cmp.baseline_id = baseline.config.id();
        cmp.treated_value = aggregate_value(*treated.eval, metric);
        cmp.baseline_value = aggregate_value(*baseline.eval, metric);
        cmp.test = wilcoxon_signed_rank(a, b);
        out.push_back(std::move(cmp));
    }
    return out;
}

}  // namespace llrecall
