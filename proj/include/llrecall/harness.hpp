// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "llrecall/corpus.hpp"
#include "llrecall/lda.hpp"
#include "llrecall/lsi.hpp"
#include "llrecall/metrics.hpp"
#include "llrecall/ranking.hpp"
#include "llrecall/stats.hpp"
#include "llrecall/textprep.hpp"
#include "llrecall/vsm.hpp"

namespace llrecall {

enum class ModelKind { vsm, lsi, lda };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// LDA settings that are held fixed across the grid.
struct LdaParams {
    std::optional<double> alpha;  // unset: 50 / topics
    double beta = 0.01;
    std::size_t max_iterations = 2000;
    std::size_t convergence_window = 10;
    double convergence_tol = 1e-4;
    std::uint64_t seed = 42;

    friend bool operator==(const LdaParams&, const LdaParams&) = default;
};

/// One point of the factorial grid.
struct ClassifierConfig {
    ModelKind model = ModelKind::vsm;
    PipelineConfig pipeline;
    std::optional<WeightScheme> weight;          // vsm, lsi
    std::optional<SimilarityKind> similarity;    // vsm
    std::optional<std::size_t> topics;           // lsi, lda
    std::optional<LdaParams> lda;                // lda

    static ClassifierConfig make_vsm(PipelineConfig p, WeightScheme w, SimilarityKind s);
    static ClassifierConfig make_lsi(PipelineConfig p, WeightScheme w, std::size_t topics);
    static ClassifierConfig make_lda(PipelineConfig p, std::size_t topics, LdaParams params = {});

    /// Stable identifier derived from every field, e.g. "vsm-stem-tf-idf-cosine".
    std::string id() const;
    /// "cosine", "overlap" or "conditional-probability".
    std::string_view similarity_label() const;
    /// Throws ConfigError when field presence does not match the model kind.
    void validate() const;
    LdaConfig lda_config() const;

    friend bool operator==(const ClassifierConfig&, const ClassifierConfig&) = default;
};

struct ParameterGrid {
    std::vector<ModelKind> models{ModelKind::vsm, ModelKind::lsi, ModelKind::lda};
    std::vector<PipelineConfig> pipelines{{false, false}, {false, true}, {true, false}, {true, true}};
    std::vector<WeightScheme> vsm_weights{WeightScheme::tf_idf, WeightScheme::sublinear_tf_idf, WeightScheme::boolean};
    std::vector<SimilarityKind> vsm_similarities{SimilarityKind::cosine, SimilarityKind::overlap};
    std::vector<WeightScheme> lsi_weights{WeightScheme::tf_idf, WeightScheme::sublinear_tf_idf, WeightScheme::boolean};
    std::vector<std::size_t> lsi_topics{32, 64, 128, 256};
    std::vector<std::size_t> lda_topics{32, 64, 128, 256};
    LdaParams lda;

    /// The full 88-classifier grid.
    static ParameterGrid paper();
    /// JSON grid file; omitted keys keep the default grid values.
    static ParameterGrid from_json_text(std::string_view text);
    static ParameterGrid load(const std::filesystem::path& path);
};

/// Model family, then pipeline, then the remaining parameters in grid order.
std::vector<ClassifierConfig> enumerate_configs(const ParameterGrid& grid = ParameterGrid::paper());

/// A built, queryable model of any family.
class Classifier {
public:
    using Model =
        std::variant<std::shared_ptr<const VsmIndex>, std::shared_ptr<const LsiSpace>, std::shared_ptr<const LdaModel>>;

    Classifier(ClassifierConfig config, Model model);

    const ClassifierConfig& config() const { return config_; }
    const Model& model() const { return model_; }
    RankedList query(std::string_view text, std::size_t limit) const;
    const std::vector<std::string>& doc_ids() const;
    const std::vector<std::string>& doc_texts() const;
    std::vector<std::string> warnings() const;

private:
    ClassifierConfig config_;
    Model model_;
};

/// Builds from lessons only; queries never reach this path.
Classifier build_classifier(const ClassifierConfig& config, std::span<const LessonRecord> lessons,
                            const Stoplist& stoplist = Stoplist::default_list());

/// Runs every query, in query-file order, through a classifier.
std::vector<RankedList> run_queries(const Classifier& classifier, std::span<const QueryRecord> queries,
                                    std::size_t limit);

struct SweepOptions {
    MetricConfig metrics;
    std::size_t limit = 20;
    std::size_t workers = 1;
};

struct ConfigResult {
    ClassifierConfig config;
    std::optional<EvalReport> eval;
    std::vector<RankedList> rankings;
    std::string error;  // non-empty when build or evaluation failed
    std::vector<std::string> warnings;
    double wall_ms = 0.0;

    bool ok() const { return eval.has_value(); }
};

struct SweepMetadata {
    std::string corpus_hash;
    std::string query_hash;
    std::string gold_hash;
    std::string tool_version;
    std::size_t lesson_count = 0;
    std::size_t query_count = 0;
    MetricConfig metrics;
    std::size_t limit = 20;
};

struct SweepReport {
    SweepMetadata metadata;
    std::vector<ConfigResult> results;  // one per enumerated config, in grid order

    const ConfigResult& find(std::string_view config_id) const;
};

std::string tool_version();

/// Hex FNV-1a 64 digests of the canonical serializations.
std::string content_hash(std::string_view bytes);
std::string hash_lessons(std::span<const LessonRecord> lessons);
std::string hash_queries(std::span<const QueryRecord> queries);
std::string hash_goldset(const GoldSet& gold);

/// Builds and evaluates every config. Per-config failures are recorded in the
/// report; a query without gold judgments aborts the whole sweep.
SweepReport run_sweep(std::span<const LessonRecord> lessons, std::span<const QueryRecord> queries,
                      const GoldSet& gold, const ParameterGrid& grid, const SweepOptions& options = {},
                      const Stoplist& stoplist = Stoplist::default_list());

enum class Metric { top_k, map, precision, recall };
enum class Parameter { pipeline, weight, similarity, topics };

std::string_view to_string(Metric metric);
std::string_view to_string(Parameter parameter);
Metric parse_metric(std::string_view text);
Parameter parse_parameter(std::string_view text);

/// Parameters that vary within a model family.
std::vector<Parameter> parameters_for(ModelKind family);
double aggregate_value(const EvalReport& report, Metric metric);
double query_value(const QueryEvaluation& q, Metric metric);
/// Label of a config's value for one parameter ("stemming", "tf-idf", "128").
std::string parameter_value(const ClassifierConfig& config, Parameter parameter);

/// One HSD group per parameter value; each group holds the metric of every
/// family config with that value while the other parameters vary.
HsdResult parameter_impact(const SweepReport& report, ModelKind family, Parameter parameter, Metric metric,
                           double alpha = 0.05);

struct TopPerformerComparison {
    std::string label;  // e.g. "stemming vs none"
    std::string treated_id;
    std::string baseline_id;
    double treated_value = 0.0;
    double baseline_value = 0.0;
    WilcoxonResult test;
};

/// Best config per preprocessing pipeline (stemming, stopping, both) against
/// the best config without preprocessing, paired over per-query values.
std::vector<TopPerformerComparison> top_performer_comparison(const SweepReport& report, ModelKind family,
                                                             Metric metric);

}  // namespace llrecall
