// SPDX-License-Identifier: Apache-2.0
#include "llrecall/metrics.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "llrecall/error.hpp"

namespace llrecall {

void MetricConfig::validate() const {
    if (top_k_cutoff < 1 || pr_cutoff < 1) throw ConfigError("metric cutoffs must be at least 1");
}

namespace {

std::size_t relevant_in_prefix(const RankedList& ranked, const RelevantSet& relevant, std::size_t k) {
    const std::size_t n = std::min(k, ranked.entries.size());
    std::size_t found = 0;
    for (std::size_t i = 0; i < n; ++i) found += relevant.contains(ranked.entries[i].lesson_id) ? 1 : 0;
    return found;
}

void require_relevant(const RelevantSet& relevant) {
    if (relevant.empty()) throw ValidationError("relevant set must be non-empty");
}

template <typename Fn>
double mean_over(std::span<const RankedList> lists, const GoldSet& gold, Fn&& fn) {
    if (lists.empty()) throw ValidationError("no queries to evaluate");
    double sum = 0.0;
    for (const auto& l : lists) sum += fn(l, gold.relevant(l.query_id));
    return sum / static_cast<double>(lists.size());
}

}  // namespace

int topk_hit(const RankedList& ranked, const RelevantSet& relevant, std::size_t k) {
    require_relevant(relevant);
    return relevant_in_prefix(ranked, relevant, k) > 0 ? 1 : 0;
}

double avp(const RankedList& ranked, const RelevantSet& relevant) {
    require_relevant(relevant);
    double sum = 0.0;
    std::size_t found = 0;
    for (std::size_t j = 0; j < ranked.entries.size(); ++j) {
        if (relevant.contains(ranked.entries[j].lesson_id)) {
            ++found;
            sum += static_cast<double>(found) / static_cast<double>(j + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

double precision_at_k(const RankedList& ranked, const RelevantSet& relevant, std::size_t k) {
    require_relevant(relevant);
    if (k == 0) throw ConfigError("precision@k needs k >= 1");
    return static_cast<double>(relevant_in_prefix(ranked, relevant, k)) / static_cast<double>(k);
}

double recall_at_k(const RankedList& ranked, const RelevantSet& relevant, std::size_t k) {
    require_relevant(relevant);
    if (k == 0) throw ConfigError("recall@k needs k >= 1");
    return static_cast<double>(relevant_in_prefix(ranked, relevant, k)) / static_cast<double>(relevant.size());
}

double top_k_accuracy(std::span<const RankedList> lists, const GoldSet& gold, std::size_t k) {
    return mean_over(lists, gold, [k](const RankedList& l, const RelevantSet& rel) {
        return static_cast<double>(topk_hit(l, rel, k));
    });
}

double map_metric(std::span<const RankedList> lists, const GoldSet& gold) {
    return mean_over(lists, gold, [](const RankedList& l, const RelevantSet& rel) { return avp(l, rel); });
}

EvalReport evaluate(const std::string& config_id, std::span<const RankedList> lists, const GoldSet& gold,
                    const MetricConfig& config) {
    config.validate();
    if (lists.empty()) throw ValidationError("no queries to evaluate");
    EvalReport r;
    r.config_id = config_id;
    for (const auto& l : lists) {
        const auto& rel = gold.relevant(l.query_id);
        QueryEvaluation q;
        q.query_id = l.query_id;
        q.avp = avp(l, rel);
        q.hit = topk_hit(l, rel, config.top_k_cutoff);
        q.precision = precision_at_k(l, rel, config.pr_cutoff);
        q.recall = recall_at_k(l, rel, config.pr_cutoff);
        r.top_k += q.hit;
        r.map += q.avp;
        r.mean_precision += q.precision;
        r.mean_recall += q.recall;
        r.per_query.push_back(std::move(q));
    }
    const double n = static_cast<double>(lists.size());
    r.top_k /= n;
    r.map /= n;
    r.mean_precision /= n;
    r.mean_recall /= n;
    return r;
}

}  // namespace llrecall
