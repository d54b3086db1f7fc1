// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <map>

#include "llrecall/error.hpp"
#include "llrecall/lsi.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace llrecall;

namespace {

std::shared_ptr<const VsmIndex> fixture_index(PipelineConfig p = {false, false},
                                              WeightScheme w = WeightScheme::tf_idf) {
    return std::make_shared<const VsmIndex>(
        VsmIndex::build(testing::fixture_data().lessons, p, w, SimilarityKind::cosine));
}

double relative_error(const Eigen::MatrixXd& a, const TruncatedSvd& s) {
    return (a - s.reconstruct()).norm() / a.norm();
}

oracle::Weight to_oracle(WeightScheme w) {
    switch (w) {
        case WeightScheme::boolean: return oracle::Weight::boolean;
        case WeightScheme::tf_idf: return oracle::Weight::tf_idf;
        case WeightScheme::sublinear_tf_idf: return oracle::Weight::sublinear;
    }
    return oracle::Weight::boolean;
}

}  // namespace

TEST_CASE("rank-1 matrix is reconstructed exactly") {
    Eigen::VectorXd u(4), v(3);
    u << 1, 2, 0, -1;
    v << 0.5, 3, 1;
    const Eigen::MatrixXd a = u * v.transpose();
    const auto s = truncated_svd(a, 1);
    CHECK(s.effective_k() == 1);
    CHECK(s.numerical_rank == 1);
    CHECK((a - s.reconstruct()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(truncated_svd(Eigen::MatrixXd::Zero(3, 2), 2), DegenerateError);
    CHECK_THROWS_AS(truncated_svd(Eigen::MatrixXd::Identity(3, 3), 0), ConfigError);
    const std::vector<LessonRecord> one{{"L1", "P", "visa delay"}};
    auto idx = std::make_shared<const VsmIndex>(
        VsmIndex::build(one, {false, false}, WeightScheme::tf_idf, SimilarityKind::cosine));
    CHECK_THROWS_AS(LsiSpace::build(idx, 4), DegenerateError);
}

TEST_CASE("full-rank reconstruction, orthonormality and monotone error") {
    for (auto p : PipelineConfig::all()) {
        for (auto w : {WeightScheme::boolean, WeightScheme::tf_idf, WeightScheme::sublinear_tf_idf}) {
            const auto idx = fixture_index(p, w);
            const Eigen::MatrixXd a = to_dense(idx->matrix());
            const auto full = truncated_svd(a, 1000);
            CHECK(relative_error(a, full) < 1e-8);

            const Eigen::Index k = full.term_topic.cols();
            CHECK((full.term_topic.transpose() * full.term_topic - Eigen::MatrixXd::Identity(k, k))
                      .cwiseAbs()
                      .maxCoeff() < 1e-8);
            CHECK((full.topic_doc * full.topic_doc.transpose() - Eigen::MatrixXd::Identity(k, k))
                      .cwiseAbs()
                      .maxCoeff() < 1e-8);
            for (Eigen::Index i = 0; i < k; ++i) {
                CHECK(full.singular_values(i) > 0.0);
                if (i > 0) CHECK(full.singular_values(i) <= full.singular_values(i - 1));
            }

            double prev = std::numeric_limits<double>::infinity();
            for (std::size_t kk : {std::size_t{1}, std::size_t{2}, std::size_t{4}, std::size_t{8}, std::size_t{1000}}) {
                const double e = relative_error(a, truncated_svd(a, kk));
                CHECK(e <= prev + 1e-12);
                prev = e;
            }
        }
    }
}

TEST_CASE("singular values match the Gram-matrix oracle and the LAPACK reference") {
    const auto idx = fixture_index();
    const Eigen::MatrixXd a = to_dense(idx->matrix());
    const auto s = truncated_svd(a, 4);
    REQUIRE(s.effective_k() == 4);
    const Eigen::VectorXd ref = oracle::singular_values_via_gram(a);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(s.singular_values(i) - ref(i)) < 1e-8);

    const auto golden = nlohmann::json::parse(testing::read_text(testing::source_path("tests/golden/lsi_k4.json")));
    const auto sv = golden["singular_values"].get<std::vector<double>>();
    const auto q1 = golden["q1_abs_coordinates"].get<std::vector<double>>();
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(s.singular_values(static_cast<Eigen::Index>(i)) - sv[i]) < 1e-8);

    const auto space = LsiSpace::build(idx, 4);
    const Eigen::VectorXd folded = space.fold(idx->embed_query(testing::fixture_data().queries[0].text));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(std::abs(folded(static_cast<Eigen::Index>(i))) - q1[i]) < 1e-8);
}

TEST_CASE("folding a corpus column lands on that document") {
    const auto idx = fixture_index({true, true}, WeightScheme::sublinear_tf_idf);
    const auto space = LsiSpace::build(idx, 64);
    for (std::size_t j = 0; j < idx->document_count(); ++j) {
        const Eigen::VectorXd f = space.fold(idx->matrix().column(j));
        CHECK((f - space.document_coordinates(j)).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK(space.fold(SparseVector{}).isZero());
}

TEST_CASE("k larger than the rank is clamped with a warning") {
    const auto idx = fixture_index();
    const auto space = LsiSpace::build(idx, 256);
    CHECK(space.requested_k() == 256);
    CHECK(space.effective_k() <= 20);
    CHECK(space.effective_k() == space.svd().numerical_rank);
    REQUIRE(space.warnings().size() == 1);
    CHECK(space.warnings()[0].find("256") != std::string::npos);
    CHECK(LsiSpace::build(idx, 4).warnings().empty());
}

TEST_CASE("lesson text as query ranks that lesson first") {
    const auto& f = testing::fixture_data();
    const auto space = LsiSpace::build(fixture_index(), 256);
    const auto r = space.query(f.lessons[2].text, 20);
    REQUIRE_FALSE(r.empty());
    CHECK(r.entries[0].lesson_id == f.lessons[2].id);
    CHECK(r.entries[0].score == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(space.query("zzyzx qwertyuiop", 20).empty());
}

TEST_CASE("rankings survive sign flips of singular vector pairs") {
    const auto& f = testing::fixture_data();
    const auto idx = fixture_index({false, true}, WeightScheme::tf_idf);
    const auto space = LsiSpace::build(idx, 8);
    for (Eigen::Index flip = 0; flip < 8; ++flip) {
        TruncatedSvd s = space.svd();
        s.term_topic.col(flip) *= -1.0;
        s.topic_doc.row(flip) *= -1.0;
        const auto flipped = LsiSpace::from_parts(idx, s);
        for (const auto& q : f.queries) {
            const auto a = space.query(q.text, 20);
            const auto b = flipped.query(q.text, 20);
            REQUIRE(a.entries.size() == b.entries.size());
            for (std::size_t i = 0; i < a.entries.size(); ++i) {
                CHECK(a.entries[i].lesson_id == b.entries[i].lesson_id);
                CHECK(std::abs(a.entries[i].score - b.entries[i].score) < 1e-12);
            }
        }
    }
}

TEST_CASE("all 48 LSI grid points match a full-scan oracle") {
    const auto& f = testing::fixture_data();
    const auto& stop = Stoplist::default_list();
    std::size_t configs = 0;
    for (auto p : PipelineConfig::all()) {
        for (auto w : {WeightScheme::tf_idf, WeightScheme::sublinear_tf_idf, WeightScheme::boolean}) {
            const oracle::Vsm ref(f.lessons, p, to_oracle(w), stop);
            // Oracle term-document matrix in its own (sorted) term order.
            std::map<std::string, Eigen::Index> row;
            for (const auto& d : ref.docs())
                for (const auto& [t, x] : d) row.emplace(t, 0);
            Eigen::Index r = 0;
            for (auto& [t, i] : row) i = r++;
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r, static_cast<Eigen::Index>(ref.docs().size()));
            for (std::size_t j = 0; j < ref.docs().size(); ++j)
                for (const auto& [t, x] : ref.docs()[j]) a(row[t], static_cast<Eigen::Index>(j)) = x;
            Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);

            const auto idx = std::make_shared<const VsmIndex>(VsmIndex::build(f.lessons, p, w, SimilarityKind::cosine, stop));
            for (std::size_t k : {32, 64, 128, 256}) {
                const auto space = LsiSpace::build(idx, k);
                const Eigen::Index keep = static_cast<Eigen::Index>(space.effective_k());
                const Eigen::MatrixXd u = svd.matrixU().leftCols(keep);
                const Eigen::MatrixXd coords =
                    svd.singularValues().head(keep).asDiagonal() * svd.matrixV().leftCols(keep).transpose();
                for (const auto& q : f.queries) {
                    const auto qv = ref.embed(q.text);
                    Eigen::VectorXd qd = Eigen::VectorXd::Zero(r);
                    for (const auto& [t, x] : qv) qd(row[t]) = x;
                    const Eigen::VectorXd folded = u.transpose() * qd;
                    std::vector<oracle::Hit> want;
                    for (Eigen::Index j = 0; j < coords.cols() && folded.norm() > 0; ++j) {
                        const double s = folded.dot(coords.col(j)) / (folded.norm() * coords.col(j).norm());
                        if (std::abs(s) > 1e-10) want.push_back({f.lessons[static_cast<std::size_t>(j)].id, s});
                    }
                    std::sort(want.begin(), want.end(), [](const oracle::Hit& x, const oracle::Hit& y) {
                        return x.score != y.score ? x.score > y.score : x.id < y.id;
                    });
                    if (want.size() > 20) want.resize(20);
                    const auto got = space.query(q.text, 20);
                    REQUIRE(got.entries.size() == want.size());
                    for (std::size_t i = 0; i < want.size(); ++i) {
                        CHECK(std::abs(got.entries[i].score - want[i].score) < 1e-9);
                        // Order may only differ inside numerically tied scores.
                        if (got.entries[i].lesson_id != want[i].id) {
                            const auto it = std::find_if(want.begin(), want.end(), [&](const oracle::Hit& h) {
                                return h.id == got.entries[i].lesson_id;
                            });
                            REQUIRE(it != want.end());
                            CHECK(std::abs(it->score - want[i].score) < 1e-9);
                        }
                    }
                }
                ++configs;
            }
        }
    }
    CHECK(configs == 48);
}
