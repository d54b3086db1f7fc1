// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "llrecall/corpus.hpp"
#include "llrecall/ranking.hpp"
#include "llrecall/textprep.hpp"

namespace llrecall {

enum class WeightScheme { boolean, tf_idf, sublinear_tf_idf };
enum class SimilarityKind { cosine, overlap };

std::string_view to_string(WeightScheme scheme);
std::string_view to_string(SimilarityKind kind);
WeightScheme parse_weight_scheme(std::string_view text);
SimilarityKind parse_similarity(std::string_view text);

/// Sparse vector over term indices. Entries are sorted by term and hold only
/// nonzero weights.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;

    bool empty() const { return entries.empty(); }
    double norm_squared() const;
    double dot(const SparseVector& other) const;

    friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

/// Dense term ids in first-appearance order plus per-term document frequency.
class Vocabulary {
public:
    /// Throws DegenerateError when every document is empty.
    static Vocabulary build(std::span<const TokenList> docs);
    static Vocabulary from_parts(std::vector<std::string> terms, std::vector<std::size_t> df,
                                 std::size_t document_count);

    std::size_t size() const { return terms_.size(); }
    std::size_t document_count() const { return document_count_; }
    const std::string& term(std::size_t i) const { return terms_[i]; }
    std::size_t document_frequency(std::size_t i) const { return df_[i]; }
    std::optional<std::uint32_t> find(std::string_view term) const;
    const std::vector<std::string>& terms() const { return terms_; }
    const std::vector<std::size_t>& document_frequencies() const { return df_; }

private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> df_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::size_t document_count_ = 0;
};

/// Term weight for a term with `tf` occurrences, appearing in `df` of `n`
/// documents. Throws ConfigError unless 1 <= df <= n.
double weight(std::size_t tf, std::size_t df, std::size_t n, WeightScheme scheme);

/// Weighted terms x documents matrix stored column-wise.
class TermDocMatrix {
public:
    TermDocMatrix() = default;
    TermDocMatrix(std::size_t terms, WeightScheme scheme, std::vector<SparseVector> columns);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }
    WeightScheme scheme() const { return scheme_; }
    const SparseVector& column(std::size_t j) const { return columns_[j]; }
    const std::vector<SparseVector>& columns() const { return columns_; }

    struct Triplet {
        std::uint32_t term;
        std::uint32_t doc;
        double value;
    };
    /// Column-major list of the nonzero entries.
    std::vector<Triplet> triplets() const;

private:
    std::size_t rows_ = 0;
    WeightScheme scheme_ = WeightScheme::tf_idf;
    std::vector<SparseVector> columns_;
};

/// Similarity in [0,1]. Cosine is 0 when either vector is zero; overlap is
/// |Tq ∩ Td| / min(|Tq|, |Td|) over nonzero-weight terms, 0 when either is empty.
double similarity(const SparseVector& q, const SparseVector& d, SimilarityKind kind);

/// Vector space model over a lesson corpus. Immutable after construction.
class VsmIndex {
public:
    static VsmIndex build(std::span<const LessonRecord> lessons, PipelineConfig pipeline, WeightScheme scheme,
                          SimilarityKind similarity, const Stoplist& stoplist = Stoplist::default_list());

    struct Parts {
        std::vector<std::string> doc_ids;
        std::vector<std::string> doc_texts;
        Vocabulary vocabulary;
        TermDocMatrix matrix;
        SimilarityKind similarity = SimilarityKind::cosine;
        PipelineConfig pipeline;
        Stoplist stoplist;
    };
    static VsmIndex from_parts(Parts parts);

    /// Preprocesses with the recorded pipeline and weights in-vocabulary terms
    /// using query-local tf and corpus df/N.
    SparseVector embed_query(std::string_view text) const;
    SparseVector embed_tokens(const TokenList& tokens) const;

    /// Score of every document, in corpus order.
    std::vector<double> score_all(const SparseVector& q) const;

    /// Zero-similarity documents are excluded. Throws ConfigError if limit == 0.
    RankedList query(std::string_view text, std::size_t limit) const;

    std::size_t document_count() const { return doc_ids_.size(); }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    const std::vector<std::string>& doc_texts() const { return doc_texts_; }
    const Vocabulary& vocabulary() const { return vocabulary_; }
    const TermDocMatrix& matrix() const { return matrix_; }
    WeightScheme scheme() const { return matrix_.scheme(); }
    SimilarityKind similarity_kind() const { return similarity_; }
    PipelineConfig pipeline() const { return pipeline_; }
    const Stoplist& stoplist() const { return stoplist_; }
    double norm(std::size_t doc) const { return norms_[doc]; }

private:
    VsmIndex() = default;
    void compute_norms();

    std::vector<std::string> doc_ids_;
    std::vector<std::string> doc_texts_;
    Vocabulary vocabulary_;
    TermDocMatrix matrix_;
    std::vector<double> norms_squared_;
    std::vector<double> norms_;
    SimilarityKind similarity_ = SimilarityKind::cosine;
    PipelineConfig pipeline_;
    Stoplist stoplist_;
};

}  // namespace llrecall
