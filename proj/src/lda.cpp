// SPDX-License-Identifier: Apache-2.0
#include "llrecall/lda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "llrecall/error.hpp"

namespace llrecall {

void LdaConfig::validate() const {
    if (topics < 1) throw ConfigError("LDA needs at least one topic");
    if (!(effective_alpha() > 0.0)) throw ConfigError("LDA alpha must be positive");
    if (!(beta > 0.0)) throw ConfigError("LDA beta must be positive");
    if (convergence_window < 1) throw ConfigError("LDA convergence window must be at least 1");
    if (max_iterations < convergence_window)
        throw ConfigError("LDA max_iterations must be at least the convergence window");
    if (!(convergence_tol >= 0.0)) throw ConfigError("LDA convergence tolerance must be non-negative");
}

LdaCounts LdaCounts::from_assignments(std::size_t topics, std::size_t vocabulary,
                                      const std::vector<std::vector<std::uint32_t>>& words,
                                      const std::vector<std::vector<std::uint32_t>>& assignments) {
    LdaCounts c;
    c.topics = topics;
    c.vocabulary = vocabulary;
    c.doc_topic.assign(words.size(), std::vector<std::uint32_t>(topics, 0));
    c.topic_word.assign(topics, std::vector<std::uint32_t>(vocabulary, 0));
    c.topic_total.assign(topics, 0);
    c.doc_length.assign(words.size(), 0);
    for (std::size_t d = 0; d < words.size(); ++d) {
        for (std::size_t i = 0; i < words[d].size(); ++i) {
            const auto z = assignments[d][i];
            ++c.doc_topic[d][z];
            ++c.topic_word[z][words[d][i]];
            ++c.topic_total[z];
            ++c.doc_length[d];
        }
    }
    return c;
}

double log_likelihood(const LdaCounts& c, double alpha, double beta) {
    const double k = static_cast<double>(c.topics);
    const double v = static_cast<double>(c.vocabulary);

    // sum_w lgamma(n + beta) - V lgamma(beta) only has contributions from
    // nonzero cells.
    double words = k * std::lgamma(v * beta);
    for (std::size_t z = 0; z < c.topics; ++z) {
        for (std::size_t w = 0; w < c.vocabulary; ++w) {
            if (c.topic_word[z][w] != 0) words += std::lgamma(c.topic_word[z][w] + beta) - std::lgamma(beta);
        }
        words -= std::lgamma(static_cast<double>(c.topic_total[z]) + v * beta);
    }

    const double d = static_cast<double>(c.doc_topic.size());
    double topics = d * (std::lgamma(k * alpha) - k * std::lgamma(alpha));
    for (std::size_t doc = 0; doc < c.doc_topic.size(); ++doc) {
        for (std::size_t z = 0; z < c.topics; ++z) topics += std::lgamma(c.doc_topic[doc][z] + alpha);
        topics -= std::lgamma(static_cast<double>(c.doc_length[doc]) + k * alpha);
    }
    return words + topics;
}

namespace {

// Uniform double in [0, 1) from the top 53 bits, so draws do not depend on the
// standard library's distribution implementation.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double window_mean(const std::vector<double>& trace, std::size_t begin, std::size_t len) {
    double s = 0.0;
    for (std::size_t i = begin; i < begin + len; ++i) s += trace[i];
    return s / static_cast<double>(len);
}

}  // namespace

LdaModel LdaModel::train(std::span<const LessonRecord> lessons, const LdaConfig& config,
                         const Stoplist& stoplist) {
    config.validate();
    if (lessons.empty()) throw DegenerateError("cannot train LDA on an empty lesson corpus");

    std::vector<TokenList> docs;
    for (const auto& l : lessons) docs.push_back(preprocess(l.text, config.pipeline, stoplist));
    const Vocabulary vocab = Vocabulary::build(docs);

    const std::size_t K = config.topics;
    const std::size_t V = vocab.size();
    const double alpha = config.effective_alpha();
    const double beta = config.beta;
    const double vbeta = static_cast<double>(V) * beta;

    std::vector<std::vector<std::uint32_t>> words(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& tok : docs[d]) words[d].push_back(*vocab.find(tok));
    }

    std::mt19937_64 rng(config.seed);
    std::vector<std::vector<std::uint32_t>> z(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        z[d].resize(words[d].size());
        for (auto& zi : z[d])
            zi = static_cast<std::uint32_t>(std::min<double>(static_cast<double>(K - 1), uniform01(rng) * K));
    }
    LdaCounts c = LdaCounts::from_assignments(K, V, words, z);

    std::vector<double> cumulative(K);
    std::vector<double> trace;
    trace.reserve(config.max_iterations);
    const std::size_t window = config.convergence_window;
    for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
        for (std::size_t d = 0; d < words.size(); ++d) {
            auto& dt = c.doc_topic[d];
            for (std::size_t i = 0; i < words[d].size(); ++i) {
                const std::uint32_t w = words[d][i];
                const std::uint32_t old = z[d][i];
                --dt[old];
                --c.topic_word[old][w];
                --c.topic_total[old];

                double total = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    total += (dt[k] + alpha) * (c.topic_word[k][w] + beta) /
                             (static_cast<double>(c.topic_total[k]) + vbeta);
                    cumulative[k] = total;
                }
                const double u = uniform01(rng) * total;
                auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
                const auto fresh = static_cast<std::uint32_t>(
                    std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(K - 1)));

                z[d][i] = fresh;
                ++dt[fresh];
                ++c.topic_word[fresh][w];
                ++c.topic_total[fresh];
            }
        }
        trace.push_back(log_likelihood(c, alpha, beta));

        // Stop when the mean log-likelihood of the latest window moved less
        // than the tolerance relative to the window before it.
        if (trace.size() >= 2 * window) {
            const double prev = window_mean(trace, trace.size() - 2 * window, window);
            const double last = window_mean(trace, trace.size() - window, window);
            if (std::abs(last - prev) <= config.convergence_tol * std::abs(prev)) break;
        }
    }

    LdaModel m;
    m.config_ = config;
    m.stoplist_ = stoplist;
    m.terms_ = vocab.terms();
    for (const auto& l : lessons) {
        m.doc_ids_.push_back(l.id);
        m.doc_texts_.push_back(l.text);
    }
    m.phi_.resize(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(V));
    for (std::size_t k = 0; k < K; ++k) {
        const double denom = static_cast<double>(c.topic_total[k]) + vbeta;
        for (std::size_t w = 0; w < V; ++w)
            m.phi_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)) = (c.topic_word[k][w] + beta) / denom;
    }
    m.theta_.resize(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(K));
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const double denom = static_cast<double>(c.doc_length[d]) + static_cast<double>(K) * alpha;
        for (std::size_t k = 0; k < K; ++k)
            m.theta_(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) = (c.doc_topic[d][k] + alpha) / denom;
    }
    m.ll_trace_ = std::move(trace);
    m.assignments_ = std::move(z);
    m.finish();
    return m;
}

LdaModel LdaModel::from_parts(Parts parts) {
    parts.config.validate();
    const auto K = static_cast<Eigen::Index>(parts.config.topics);
    if (parts.phi.rows() != K || parts.phi.cols() != static_cast<Eigen::Index>(parts.terms.size()) ||
        parts.theta.rows() != static_cast<Eigen::Index>(parts.doc_ids.size()) || parts.theta.cols() != K ||
        parts.doc_texts.size() != parts.doc_ids.size())
        throw FormatError("LDA model dimensions are inconsistent");
    LdaModel m;
    m.doc_ids_ = std::move(parts.doc_ids);
    m.doc_texts_ = std::move(parts.doc_texts);
    m.terms_ = std::move(parts.terms);
    m.config_ = parts.config;
    m.stoplist_ = std::move(parts.stoplist);
    m.phi_ = std::move(parts.phi);
    m.theta_ = std::move(parts.theta);
    m.ll_trace_ = std::move(parts.log_likelihood_trace);
    m.assignments_ = std::move(parts.assignments);
    m.finish();
    return m;
}

void LdaModel::finish() {
    term_index_.clear();
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (!term_index_.try_emplace(terms_[i], static_cast<std::uint32_t>(i)).second)
            throw FormatError(fmt::format("duplicate LDA vocabulary term '{}'", terms_[i]));
    }
    log_phi_ = phi_.array().log().matrix();
    log_theta_ = theta_.array().log().matrix();
}

std::optional<std::uint32_t> LdaModel::find_term(std::string_view term) const {
    auto it = term_index_.find(std::string(term));
    if (it == term_index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::uint32_t> LdaModel::query_terms(std::string_view text) const {
    std::vector<std::uint32_t> out;
    for (const auto& tok : preprocess(text, config_.pipeline, stoplist_)) {
        if (auto id = find_term(tok)) out.push_back(*id);
    }
    return out;
}

std::vector<double> LdaModel::score_all(const std::vector<std::uint32_t>& query_terms) const {
    const Eigen::Index D = theta_.rows();
    const Eigen::Index K = theta_.cols();
    std::vector<double> scores(static_cast<std::size_t>(D), 0.0);
    std::vector<double> terms(static_cast<std::size_t>(K));
    for (Eigen::Index d = 0; d < D; ++d) {
        double s = 0.0;
        for (const auto w : query_terms) {
            double hi = -std::numeric_limits<double>::infinity();
            for (Eigen::Index k = 0; k < K; ++k) {
                terms[static_cast<std::size_t>(k)] = log_theta_(d, k) + log_phi_(k, w);
                hi = std::max(hi, terms[static_cast<std::size_t>(k)]);
            }
            double acc = 0.0;
            for (const double t : terms) acc += std::exp(t - hi);
            s += hi + std::log(acc);
        }
        scores[static_cast<std::size_t>(d)] = s;
    }
    return scores;
}

RankedList LdaModel::query(std::string_view text, std::size_t limit) const {
    if (limit == 0) throw ConfigError("query limit must be at least 1");
    RankedList out;
    const auto q = query_terms(text);
    if (q.empty()) return out;
    const auto scores = score_all(q);
    out.entries = rank_scores(doc_ids_, scores, std::vector<bool>(scores.size(), true), limit);
    return out;
}

}  // namespace llrecall
