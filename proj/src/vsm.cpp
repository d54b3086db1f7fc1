// SPDX-License-Identifier: Apache-2.0
#include "llrecall/vsm.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "llrecall/error.hpp"

namespace llrecall {

std::string_view to_string(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::boolean: return "boolean";
        case WeightScheme::tf_idf: return "tf-idf";
        case WeightScheme::sublinear_tf_idf: return "sublinear-tf-idf";
    }
    return "?";
}

std::string_view to_string(SimilarityKind kind) {
    return kind == SimilarityKind::cosine ? "cosine" : "overlap";
}

WeightScheme parse_weight_scheme(std::string_view text) {
    if (text == "boolean") return WeightScheme::boolean;
    if (text == "tf-idf" || text == "tfidf" || text == "tf_idf") return WeightScheme::tf_idf;
    if (text == "sublinear-tf-idf" || text == "sublinear" || text == "sublinear_tf_idf")
        return WeightScheme::sublinear_tf_idf;
    throw ConfigError(fmt::format("unknown weight scheme '{}'", text));
}

SimilarityKind parse_similarity(std::string_view text) {
    if (text == "cosine") return SimilarityKind::cosine;
    if (text == "overlap") return SimilarityKind::overlap;
    throw ConfigError(fmt::format("unknown similarity '{}'", text));
}

double SparseVector::norm_squared() const {
    double s = 0.0;
    for (const auto& [t, w] : entries) s += w * w;
    return s;
}

double SparseVector::dot(const SparseVector& other) const {
    double s = 0.0;
    auto a = entries.begin();
    auto b = other.entries.begin();
    while (a != entries.end() && b != other.entries.end()) {
        if (a->first < b->first) {
            ++a;
        } else if (b->first < a->first) {
            ++b;
        } else {
            s += a->second * b->second;
            ++a;
            ++b;
        }
    }
    return s;
}

Vocabulary Vocabulary::build(std::span<const TokenList> docs) {
    Vocabulary v;
    v.document_count_ = docs.size();
    std::vector<std::size_t> last_doc;  // last document that counted toward df
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& tok : docs[d]) {
            auto [it, inserted] = v.index_.try_emplace(tok, static_cast<std::uint32_t>(v.terms_.size()));
            if (inserted) {
                v.terms_.push_back(tok);
                v.df_.push_back(1);
                last_doc.push_back(d);
            } else if (last_doc[it->second] != d) {
                ++v.df_[it->second];
                last_doc[it->second] = d;
            }
        }
    }
    if (v.terms_.empty()) throw DegenerateError("corpus is empty after preprocessing");
    return v;
}

Vocabulary Vocabulary::from_parts(std::vector<std::string> terms, std::vector<std::size_t> df,
                                  std::size_t document_count) {
    if (terms.size() != df.size()) throw FormatError("vocabulary terms and df differ in length");
    Vocabulary v;
    v.document_count_ = document_count;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (df[i] < 1 || df[i] > document_count)
            throw FormatError(fmt::format("document frequency out of range for term '{}'", terms[i]));
        if (!v.index_.try_emplace(terms[i], static_cast<std::uint32_t>(i)).second)
            throw FormatError(fmt::format("duplicate vocabulary term '{}'", terms[i]));
    }
    v.terms_ = std::move(terms);
    v.df_ = std::move(df);
    return v;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view term) const {
    auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double weight(std::size_t tf, std::size_t df, std::size_t n, WeightScheme scheme) {
    if (df < 1 || df > n) throw ConfigError(fmt::format("weight: need 1 <= df <= N, got df={} N={}", df, n));
    if (tf == 0) return 0.0;
    const double idf = std::log10(static_cast<double>(n) / static_cast<double>(df));
    switch (scheme) {
        case WeightScheme::boolean: return 1.0;
        case WeightScheme::tf_idf: return static_cast<double>(tf) * idf;
        case WeightScheme::sublinear_tf_idf: return (1.0 + std::log10(static_cast<double>(tf))) * idf;
    }
    return 0.0;
}

TermDocMatrix::TermDocMatrix(std::size_t terms, WeightScheme scheme, std::vector<SparseVector> columns)
    : rows_(terms), scheme_(scheme), columns_(std::move(columns)) {
    for (const auto& c : columns_) {
        for (const auto& [t, w] : c.entries) {
            if (t >= rows_) throw FormatError("term index out of range in term-document matrix");
        }
    }
}

std::vector<TermDocMatrix::Triplet> TermDocMatrix::triplets() const {
    std::vector<Triplet> out;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        for (const auto& [t, w] : columns_[j].entries) out.push_back({t, static_cast<std::uint32_t>(j), w});
    }
    return out;
}

double similarity(const SparseVector& q, const SparseVector& d, SimilarityKind kind) {
    if (q.empty() || d.empty()) return 0.0;
    if (kind == SimilarityKind::cosine) {
        const double denom = std::sqrt(q.norm_squared() * d.norm_squared());
        return denom > 0.0 ? q.dot(d) / denom : 0.0;
    }
    std::size_t shared = 0;
    auto a = q.entries.begin();
    auto b = d.entries.begin();
    while (a != q.entries.end() && b != d.entries.end()) {
        if (a->first < b->first) {
            ++a;
        } else if (b->first < a->first) {
            ++b;
        } else {
            ++shared;
            ++a;
            ++b;
        }
    }
    return static_cast<double>(shared) / static_cast<double>(std::min(q.entries.size(), d.entries.size()));
}

namespace {

// Weighted sparse vector of a token list; tokens absent from the vocabulary
// are dropped.
SparseVector weigh_tokens(const TokenList& tokens, const Vocabulary& vocab, WeightScheme scheme) {
    std::map<std::uint32_t, std::size_t> tf;
    for (const auto& tok : tokens) {
        if (auto id = vocab.find(tok)) ++tf[*id];
    }
    SparseVector v;
    for (const auto& [term, count] : tf) {
        const double w = weight(count, vocab.document_frequency(term), vocab.document_count(), scheme);
        if (w != 0.0) v.entries.emplace_back(term, w);
    }
    return v;
}

}  // namespace

VsmIndex VsmIndex::build(std::span<const LessonRecord> lessons, PipelineConfig pipeline, WeightScheme scheme,
                         SimilarityKind similarity, const Stoplist& stoplist) {
    if (lessons.empty()) throw DegenerateError("cannot build an index over an empty lesson corpus");
    std::vector<TokenList> docs;
    docs.reserve(lessons.size());
    for (const auto& l : lessons) docs.push_back(preprocess(l.text, pipeline, stoplist));

    VsmIndex idx;
    idx.vocabulary_ = Vocabulary::build(docs);
    std::vector<SparseVector> columns;
    columns.reserve(docs.size());
    for (const auto& d : docs) columns.push_back(weigh_tokens(d, idx.vocabulary_, scheme));
    idx.matrix_ = TermDocMatrix(idx.vocabulary_.size(), scheme, std::move(columns));
    for (const auto& l : lessons) {
        idx.doc_ids_.push_back(l.id);
        idx.doc_texts_.push_back(l.text);
    }
    idx.similarity_ = similarity;
    idx.pipeline_ = pipeline;
    idx.stoplist_ = stoplist;
    idx.compute_norms();
    return idx;
}

VsmIndex VsmIndex::from_parts(Parts parts) {
    if (parts.doc_ids.size() != parts.matrix.cols() || parts.doc_texts.size() != parts.doc_ids.size())
        throw FormatError("index document list does not match the matrix");
    if (parts.matrix.rows() != parts.vocabulary.size())
        throw FormatError("index vocabulary does not match the matrix");
    if (parts.vocabulary.document_count() != parts.doc_ids.size())
        throw FormatError("index vocabulary document count does not match the matrix");
    VsmIndex idx;
    idx.doc_ids_ = std::move(parts.doc_ids);
    idx.doc_texts_ = std::move(parts.doc_texts);
    idx.vocabulary_ = std::move(parts.vocabulary);
    idx.matrix_ = std::move(parts.matrix);
    idx.similarity_ = parts.similarity;
    idx.pipeline_ = parts.pipeline;
    idx.stoplist_ = std::move(parts.stoplist);
    idx.compute_norms();
    return idx;
}

void VsmIndex::compute_norms() {
    norms_squared_.clear();
    norms_.clear();
    for (const auto& c : matrix_.columns()) {
        norms_squared_.push_back(c.norm_squared());
        norms_.push_back(std::sqrt(norms_squared_.back()));
    }
}

SparseVector VsmIndex::embed_tokens(const TokenList& tokens) const {
    return weigh_tokens(tokens, vocabulary_, matrix_.scheme());
}

SparseVector VsmIndex::embed_query(std::string_view text) const {
    return embed_tokens(preprocess(text, pipeline_, stoplist_));
}

std::vector<double> VsmIndex::score_all(const SparseVector& q) const {
    std::vector<double> scores(matrix_.cols(), 0.0);
    for (std::size_t j = 0; j < matrix_.cols(); ++j) scores[j] = similarity(q, matrix_.column(j), similarity_);
    return scores;
}

RankedList VsmIndex::query(std::string_view text, std::size_t limit) const {
    if (limit == 0) throw ConfigError("query limit must be at least 1");
    const SparseVector q = embed_query(text);
    RankedList out;
    if (q.empty()) return out;
    const std::vector<double> scores = score_all(q);
    std::vector<bool> keep(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) keep[j] = scores[j] != 0.0;
    out.entries = rank_scores(doc_ids_, scores, keep, limit);
    return out;
}

}  // namespace llrecall
