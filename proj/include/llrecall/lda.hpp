// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "llrecall/corpus.hpp"
#include "llrecall/ranking.hpp"
#include "llrecall/textprep.hpp"
#include "llrecall/vsm.hpp"

namespace llrecall {

struct LdaConfig {
    std::size_t topics = 32;
    std::optional<double> alpha;  // symmetric; unset means 50 / topics
    double beta = 0.01;
    std::size_t max_iterations = 2000;
    std::size_t convergence_window = 10;
    double convergence_tol = 1e-4;
    std::uint64_t seed = 42;
    PipelineConfig pipeline;

    double effective_alpha() const { return alpha ? *alpha : 50.0 / static_cast<double>(topics); }
    /// Throws ConfigError on any invariant violation.
    void validate() const;

    friend bool operator==(const LdaConfig&, const LdaConfig&) = default;
};

/// Count tables of a collapsed Gibbs state.
struct LdaCounts {
    std::size_t topics = 0;
    std::size_t vocabulary = 0;
    std::vector<std::vector<std::uint32_t>> doc_topic;   // D x K
    std::vector<std::vector<std::uint32_t>> topic_word;  // K x V
    std::vector<std::uint64_t> topic_total;              // K
    std::vector<std::uint64_t> doc_length;               // D

    static LdaCounts from_assignments(std::size_t topics, std::size_t vocabulary,
                                      const std::vector<std::vector<std::uint32_t>>& words,
                                      const std::vector<std::vector<std::uint32_t>>& assignments);
};

/// log P(w | z, beta) + log P(z | alpha) for symmetric Dirichlet priors.
double log_likelihood(const LdaCounts& counts, double alpha, double beta);

/// Trained topic model with conditional-probability query scoring.
class LdaModel {
public:
    /// Collapsed Gibbs sampling, single chain, fully determined by config.seed.
    static LdaModel train(std::span<const LessonRecord> lessons, const LdaConfig& config,
                          const Stoplist& stoplist = Stoplist::default_list());

    struct Parts {
        std::vector<std::string> doc_ids;
        std::vector<std::string> doc_texts;
        std::vector<std::string> terms;
        LdaConfig config;
        Stoplist stoplist;
        Eigen::MatrixXd phi;    // K x V
        Eigen::MatrixXd theta;  // D x K
        std::vector<double> log_likelihood_trace;
        std::vector<std::vector<std::uint32_t>> assignments;
    };
    static LdaModel from_parts(Parts parts);

    /// sum over in-vocabulary query tokens of log sum_z theta[d][z] phi[z][w].
    std::vector<double> score_all(const std::vector<std::uint32_t>& query_terms) const;
    /// In-vocabulary term ids of the preprocessed query, with repetition.
    std::vector<std::uint32_t> query_terms(std::string_view text) const;
    /// Empty when no query token is in the vocabulary.
    RankedList query(std::string_view text, std::size_t limit) const;

    const Eigen::MatrixXd& phi() const { return phi_; }
    const Eigen::MatrixXd& theta() const { return theta_; }
    const std::vector<std::vector<std::uint32_t>>& assignments() const { return assignments_; }
    const std::vector<double>& log_likelihood_trace() const { return ll_trace_; }
    std::size_t iterations() const { return ll_trace_.size(); }
    const LdaConfig& config() const { return config_; }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    const std::vector<std::string>& doc_texts() const { return doc_texts_; }
    const Stoplist& stoplist() const { return stoplist_; }
    std::optional<std::uint32_t> find_term(std::string_view term) const;

private:
    LdaModel() = default;
    void finish();

    std::vector<std::string> doc_ids_;
    std::vector<std::string> doc_texts_;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t> term_index_;
    LdaConfig config_;
    Stoplist stoplist_;
    Eigen::MatrixXd phi_;
    Eigen::MatrixXd theta_;
    Eigen::MatrixXd log_phi_;
    Eigen::MatrixXd log_theta_;
    std::vector<double> ll_trace_;
    std::vector<std::vector<std::uint32_t>> assignments_;
};

}  // namespace llrecall
