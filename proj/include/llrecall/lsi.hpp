// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "llrecall/ranking.hpp"
#include "llrecall/vsm.hpp"

namespace llrecall {

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kLsiRankTolerance = 1e-10;
/// LSI cosines with magnitude at or below this are treated as zero similarity.
inline constexpr double kLsiZeroScore = 1e-10;

/// Rank-k factorisation A ≈ T · diag(S) · D.
struct TruncatedSvd {
    Eigen::MatrixXd term_topic;      // t x k_eff, orthonormal columns
    Eigen::VectorXd singular_values; // k_eff, descending, > 0
    Eigen::MatrixXd topic_doc;       // k_eff x d, orthonormal rows
    std::size_t requested_k = 0;
    std::size_t numerical_rank = 0;

    std::size_t effective_k() const { return static_cast<std::size_t>(singular_values.size()); }
    Eigen::MatrixXd reconstruct() const;
};

/// Dense copy of a sparse term-document matrix.
Eigen::MatrixXd to_dense(const TermDocMatrix& matrix);

/// Throws DegenerateError for an all-zero matrix and ConfigError for k == 0.
TruncatedSvd truncated_svd(const TermDocMatrix& matrix, std::size_t k);
TruncatedSvd truncated_svd(const Eigen::MatrixXd& matrix, std::size_t k);

/// Latent semantic space over a VSM index. Documents are represented by their
/// S-scaled columns of D and queries fold as Tᵀq, so a query whose vector
/// equals a document column lands exactly on that document.
class LsiSpace {
public:
    /// k larger than the numerical rank is clamped (a warning is recorded and
    /// logged to stderr), never rejected.
    static LsiSpace build(std::shared_ptr<const VsmIndex> index, std::size_t k);
    static LsiSpace from_parts(std::shared_ptr<const VsmIndex> index, TruncatedSvd svd);

    Eigen::VectorXd fold(const SparseVector& query) const;
    /// Topic coordinates of corpus document j (k_eff values).
    Eigen::VectorXd document_coordinates(std::size_t j) const { return doc_coords_.col(static_cast<Eigen::Index>(j)); }
    std::vector<double> score_all(const Eigen::VectorXd& folded) const;

    /// Cosine in topic space; same ordering/limit contract as VsmIndex::query.
    RankedList query(std::string_view text, std::size_t limit) const;

    const VsmIndex& index() const { return *index_; }
    std::shared_ptr<const VsmIndex> index_ptr() const { return index_; }
    const TruncatedSvd& svd() const { return svd_; }
    std::size_t requested_k() const { return svd_.requested_k; }
    std::size_t effective_k() const { return svd_.effective_k(); }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    LsiSpace() = default;
    void finish();

    std::shared_ptr<const VsmIndex> index_;
    TruncatedSvd svd_;
    Eigen::MatrixXd doc_coords_;  // k_eff x d
    Eigen::VectorXd doc_norms_;
    std::vector<std::string> warnings_;
};

}  // namespace llrecall
