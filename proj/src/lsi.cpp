// SPDX-License-Identifier: Apache-2.0
#include "llrecall/lsi.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>

#include <fmt/format.h>

#include "llrecall/error.hpp"

namespace llrecall {

Eigen::MatrixXd TruncatedSvd::reconstruct() const {
    return term_topic * singular_values.asDiagonal() * topic_doc;
}

Eigen::MatrixXd to_dense(const TermDocMatrix& matrix) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(matrix.rows()),
                                              static_cast<Eigen::Index>(matrix.cols()));
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
        for (const auto& [t, w] : matrix.column(j).entries) a(t, static_cast<Eigen::Index>(j)) = w;
    }
    return a;
}

TruncatedSvd truncated_svd(const Eigen::MatrixXd& a, std::size_t k) {
    if (k == 0) throw ConfigError("number of topics must be at least 1");
    if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0)
        throw DegenerateError("term-document matrix is all zero; no latent space exists");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double cutoff = kLsiRankTolerance * s(0);
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cutoff) ++rank;

    const Eigen::Index keep = std::min<Eigen::Index>(rank, static_cast<Eigen::Index>(k));
    TruncatedSvd out;
    out.requested_k = k;
    out.numerical_rank = static_cast<std::size_t>(rank);
    out.term_topic = svd.matrixU().leftCols(keep);
    out.singular_values = s.head(keep);
    out.topic_doc = svd.matrixV().leftCols(keep).transpose();
    return out;
}

TruncatedSvd truncated_svd(const TermDocMatrix& matrix, std::size_t k) {
    return truncated_svd(to_dense(matrix), k);
}

LsiSpace LsiSpace::build(std::shared_ptr<const VsmIndex> index, std::size_t k) {
    if (!index) throw ConfigError("LSI space requires a source index");
    LsiSpace space;
    space.svd_ = truncated_svd(index->matrix(), k);
    space.index_ = std::move(index);
    if (space.svd_.effective_k() < k) {
        space.warnings_.push_back(fmt::format("requested {} topics but the term-document matrix has numerical "
                                              "rank {}; using {} topics",
                                              k, space.svd_.numerical_rank, space.svd_.effective_k()));
        static std::mutex log_mutex;
        const std::lock_guard lock(log_mutex);
        std::clog << "warning: " + space.warnings_.back() + "\n" << std::flush;
    }
    space.finish();
    return space;
}

LsiSpace LsiSpace::from_parts(std::shared_ptr<const VsmIndex> index, TruncatedSvd svd) {
    if (!index) throw ConfigError("LSI space requires a source index");
    const auto k = static_cast<Eigen::Index>(svd.effective_k());
    if (svd.term_topic.rows() != static_cast<Eigen::Index>(index->vocabulary().size()) ||
        svd.term_topic.cols() != k || svd.topic_doc.rows() != k ||
        svd.topic_doc.cols() != static_cast<Eigen::Index>(index->document_count()))
        throw FormatError("LSI factor dimensions do not match the source index");
    LsiSpace space;
    space.index_ = std::move(index);
    space.svd_ = std::move(svd);
    space.finish();
    return space;
}

void LsiSpace::finish() {
    doc_coords_ = svd_.singular_values.asDiagonal() * svd_.topic_doc;
    doc_norms_ = doc_coords_.colwise().norm().transpose();
}

Eigen::VectorXd LsiSpace::fold(const SparseVector& query) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(svd_.term_topic.cols());
    for (const auto& [t, w] : query.entries) out += w * svd_.term_topic.row(t).transpose();
    return out;
}

std::vector<double> LsiSpace::score_all(const Eigen::VectorXd& folded) const {
    std::vector<double> scores(static_cast<std::size_t>(doc_coords_.cols()), 0.0);
    const double qn = folded.norm();
    if (qn == 0.0) return scores;
    for (Eigen::Index j = 0; j < doc_coords_.cols(); ++j) {
        const double dn = doc_norms_(j);
        if (dn == 0.0) continue;
        scores[static_cast<std::size_t>(j)] = folded.dot(doc_coords_.col(j)) / (qn * dn);
    }
    return scores;
}

RankedList LsiSpace::query(std::string_view text, std::size_t limit) const {
    if (limit == 0) throw ConfigError("query limit must be at least 1");
    const SparseVector q = index_->embed_query(text);
    RankedList out;
    if (q.empty()) return out;
    const std::vector<double> scores = score_all(fold(q));
    std::vector<bool> keep(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) keep[j] = std::abs(scores[j]) > kLsiZeroScore;
    out.entries = rank_scores(index_->doc_ids(), scores, keep, limit);
    return out;
}

}  // namespace llrecall
