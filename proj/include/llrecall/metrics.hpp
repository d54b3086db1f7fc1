// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "llrecall/corpus.hpp"
#include "llrecall/ranking.hpp"

namespace llrecall {

struct MetricConfig {
    std::size_t top_k_cutoff = 20;
    std::size_t pr_cutoff = 10;

    void validate() const;
};

using RelevantSet = std::set<std::string>;

/// 1 if any of the first min(k, n) entries is relevant, else 0.
int topk_hit(const RankedList& ranked, const RelevantSet& relevant, std::size_t k);

/// Average precision: sum of precision at each relevant rank divided by
/// |relevant|. Relevant documents that were never retrieved contribute zero.
double avp(const RankedList& ranked, const RelevantSet& relevant);

/// Relevant entries in the first min(k, n), divided by k (not n).
double precision_at_k(const RankedList& ranked, const RelevantSet& relevant, std::size_t k);
/// Relevant entries in the first min(k, n), divided by |relevant|.
double recall_at_k(const RankedList& ranked, const RelevantSet& relevant, std::size_t k);

// Aggregates over queries. Every list's query id must be in the gold set,
// otherwise ValidationError.
double top_k_accuracy(std::span<const RankedList> lists, const GoldSet& gold, std::size_t k);
double map_metric(std::span<const RankedList> lists, const GoldSet& gold);

struct QueryEvaluation {
    std::string query_id;
    double avp = 0.0;
    int hit = 0;
    double precision = 0.0;
    double recall = 0.0;
};

struct EvalReport {
    std::string config_id;
    std::vector<QueryEvaluation> per_query;
    double top_k = 0.0;
    double map = 0.0;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
};

EvalReport evaluate(const std::string& config_id, std::span<const RankedList> lists, const GoldSet& gold,
                    const MetricConfig& config = {});

}  // namespace llrecall
