// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <string>

#include "llrecall/error.hpp"
#include "llrecall/persist.hpp"
#include "test_support.hpp"

using namespace llrecall;

namespace {

std::vector<ClassifierConfig> sample_configs() {
    return {ClassifierConfig::make_vsm({}, WeightScheme::tf_idf, SimilarityKind::cosine),
            ClassifierConfig::make_vsm({true, true}, WeightScheme::boolean, SimilarityKind::overlap),
            ClassifierConfig::make_lsi({false, true}, WeightScheme::sublinear_tf_idf, 64),
            ClassifierConfig::make_lda({true, false}, 32)};
}

}  // namespace

TEST_CASE("round trip keeps rankings and bytes") {
    const auto& f = testing::fixture_data();
    testing::TempDir dir("persist");
    for (const auto& cfg : sample_configs()) {
        CAPTURE(cfg.id());
        const auto built = build_classifier(cfg, f.lessons);
        const auto path = dir.path() / (cfg.id() + ".idx");
        persist_index(built, path);
        const auto loaded = load_index(path);
        CHECK(loaded.config() == cfg);
        CHECK(loaded.doc_ids() == built.doc_ids());
        CHECK(run_queries(loaded, f.queries, 20) == run_queries(built, f.queries, 20));
        CHECK(serialize_classifier(loaded) == serialize_classifier(built));
        CHECK(testing::read_text(path) == serialize_classifier(built));
    }
}

TEST_CASE("config json round trip") {
    for (const auto& cfg : enumerate_configs()) CHECK(config_from_json_text(config_to_json_text(cfg)) == cfg);
    auto custom = ClassifierConfig::make_lda({}, 16, {0.3, 0.02, 500, 5, 1e-3, 99});
    CHECK(config_from_json_text(config_to_json_text(custom)) == custom);
    CHECK_THROWS_AS(config_from_json_text("{\"model\": \"vsm\"}"), FormatError);
    CHECK_THROWS_AS(config_from_json_text("not json"), FormatError);
}

TEST_CASE("corrupted files are rejected") {
    const auto& f = testing::fixture_data();
    const auto bytes =
        serialize_classifier(build_classifier(sample_configs()[0], f.lessons));
    CHECK_NOTHROW(deserialize_classifier(bytes));

    SUBCASE("truncated") {
        try {
            deserialize_classifier(bytes.substr(0, bytes.size() - 10));
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("truncated") != std::string::npos);
        }
    }
    SUBCASE("flipped payload byte") {
        auto bad = bytes;
        const auto pos = bad.find("\"doc_ids\"");
        REQUIRE(pos != std::string::npos);
        bad[pos + 2] = bad[pos + 2] == 'o' ? 'x' : 'o';
        try {
            deserialize_classifier(bad);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("checksum") != std::string::npos);
        }
    }
    SUBCASE("newer version") {
        auto bad = bytes;
        const std::string header = "llrecall-index 1";
        REQUIRE(bad.rfind(header, 0) == 0);
        bad.replace(0, header.size(), "llrecall-index 2");
        try {
            deserialize_classifier(bad);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("version") != std::string::npos);
        }
    }
    SUBCASE("not an index") {
        CHECK_THROWS_AS(deserialize_classifier("hello"), FormatError);
        CHECK_THROWS_AS(deserialize_classifier(""), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_index("/nonexistent/dir/x.idx"), IoError);
    }
}
