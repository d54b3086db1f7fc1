// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "llrecall/error.hpp"
#include "llrecall/harness.hpp"
#include "llrecall/persist.hpp"
#include "test_support.hpp"

using namespace llrecall;

namespace {

std::vector<std::vector<std::string>> read_csv(const std::string& rel) {
    std::istringstream in(testing::read_text(testing::source_path(rel)));
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const SweepReport& sweep(std::size_t workers) {
    static std::map<std::size_t, SweepReport> cache;
    auto it = cache.find(workers);
    if (it == cache.end()) {
        const auto& f = testing::fixture_data();
        SweepOptions opt;
        opt.workers = workers;
        it = cache.emplace(workers, run_sweep(f.lessons, f.queries, f.gold, ParameterGrid::paper(), opt)).first;
    }
    return it->second;
}

}  // namespace

TEST_CASE("paper grid enumerates 88 distinct configs") {
    const auto configs = enumerate_configs();
    CHECK(configs.size() == 88);
    std::map<ModelKind, int> per;
    std::set<std::string> ids;
    for (const auto& c : configs) {
        c.validate();
        ++per[c.model];
        ids.insert(c.id());
    }
    CHECK(per[ModelKind::vsm] == 24);
    CHECK(per[ModelKind::lsi] == 48);
    CHECK(per[ModelKind::lda] == 16);
    CHECK(ids.size() == configs.size());

    auto vsm_only = ParameterGrid::paper();
    vsm_only.models = {ModelKind::vsm};
    CHECK(enumerate_configs(vsm_only).size() == 24);

    const auto from_file = ParameterGrid::from_json_text(R"({"models": ["vsm"], "vsm": {"similarities": ["cosine"]}})");
    CHECK(enumerate_configs(from_file).size() == 12);
    CHECK_THROWS_AS(ParameterGrid::from_json_text("{\"models\": [\"bm25\"]}"), ConfigError);
}

TEST_CASE("config ids distinguish every field") {
    auto a = ClassifierConfig::make_lda({}, 32);
    auto b = a;
    b.lda->seed = 43;
    CHECK(a.id() != b.id());
    b = a;
    b.lda->alpha = 0.5;
    CHECK(a.id() != b.id());
    CHECK(ClassifierConfig::make_vsm({true, false}, WeightScheme::tf_idf, SimilarityKind::cosine).id() !=
          ClassifierConfig::make_vsm({false, true}, WeightScheme::tf_idf, SimilarityKind::cosine).id());

    auto broken = ClassifierConfig::make_lsi({}, WeightScheme::tf_idf, 64);
    broken.similarity = SimilarityKind::cosine;
    CHECK_THROWS_AS(broken.validate(), ConfigError);
    broken = ClassifierConfig::make_lda({}, 32);
    broken.lda.reset();
    CHECK_THROWS_AS(broken.validate(), ConfigError);
}

TEST_CASE("sweep values match the oracle file bit for bit") {
    const auto golden = read_csv("tests/golden/sweep_metrics.csv");
    for (std::size_t workers : {1, 4}) {
        CAPTURE(workers);
        const auto& r = sweep(workers);
        REQUIRE(r.results.size() == golden.size());
        for (std::size_t i = 0; i < golden.size(); ++i) {
            const auto& res = r.results[i];
            REQUIRE(res.ok());
            CHECK(res.config.id() == golden[i][0]);
            CHECK(res.eval->top_k == std::stod(golden[i][1]));
            CHECK(res.eval->map == std::stod(golden[i][2]));
            CHECK(res.eval->mean_precision == std::stod(golden[i][3]));
            CHECK(res.eval->mean_recall == std::stod(golden[i][4]));
        }
    }
    const auto& one = sweep(1);
    const auto& four = sweep(4);
    for (std::size_t i = 0; i < one.results.size(); ++i) CHECK(one.results[i].rankings == four.results[i].rankings);
    CHECK(one.metadata.corpus_hash == four.metadata.corpus_hash);
    CHECK(one.metadata.lesson_count == 20);
}

TEST_CASE("parameter impact groups and letters") {
    const auto& r = sweep(1);
    const auto sim = parameter_impact(r, ModelKind::vsm, Parameter::similarity, Metric::top_k);
    CHECK(sim.groups.size() == 2);
    CHECK(sim.samples_per_group == 12);
    const auto topics = parameter_impact(r, ModelKind::lsi, Parameter::topics, Metric::map);
    CHECK(topics.groups.size() == 4);
    CHECK(topics.samples_per_group == 12);
    CHECK(parameter_impact(r, ModelKind::lda, Parameter::topics, Metric::map).samples_per_group == 4);
    CHECK_THROWS_AS(parameter_impact(r, ModelKind::lda, Parameter::weight, Metric::map), ConfigError);

    std::map<std::tuple<std::string, std::string, std::string>, HsdResult> cache;
    for (const auto& row : read_csv("tests/golden/sweep_hsd.csv")) {
        CAPTURE(row[0] + "/" + row[1] + "/" + row[2] + "/" + row[3]);
        const auto key = std::make_tuple(row[0], row[1], row[2]);
        if (!cache.contains(key))
            cache.emplace(key, parameter_impact(r, parse_model_kind(row[0]), parse_parameter(row[1]),
                                                parse_metric(row[2])));
        CHECK(cache.at(key).group(row[3]).letters == row[4]);
    }
    CHECK(cache.size() == 16);
}

TEST_CASE("top performer comparisons match the oracle") {
    const auto& r = sweep(1);
    std::size_t seen = 0;
    for (const auto& row : read_csv("tests/golden/sweep_wilcoxon.csv")) {
        const auto cmp = top_performer_comparison(r, parse_model_kind(row[0]), parse_metric(row[1]));
        REQUIRE(cmp.size() == 3);
        const auto it = std::find_if(cmp.begin(), cmp.end(), [&](const auto& c) { return c.label == row[2]; });
        REQUIRE(it != cmp.end());
        CHECK(it->treated_id == row[3]);
        CHECK(it->baseline_id == row[4]);
        CHECK(it->test.p_value == doctest::Approx(std::stod(row[5])).epsilon(1e-12));
        ++seen;
    }
    CHECK(seen == 18);
}

TEST_CASE("models are built from lessons alone") {
    const auto& f = testing::fixture_data();
    for (const auto& cfg : {ClassifierConfig::make_vsm({true, true}, WeightScheme::tf_idf, SimilarityKind::cosine),
                            ClassifierConfig::make_lsi({}, WeightScheme::boolean, 32),
                            ClassifierConfig::make_lda({true, false}, 32)}) {
        const auto before = serialize_classifier(build_classifier(cfg, f.lessons));
        const auto c = build_classifier(cfg, f.lessons);
        run_queries(c, f.queries, 20);
        std::vector<QueryRecord> others{{.id = "QX", .project_id = "P9", .kind = QueryKind::risk, .text = "anything at all about budgets"}};
        run_queries(c, others, 5);
        CHECK(serialize_classifier(c) == before);
    }
}

TEST_CASE("sweep failure handling") {
    const auto& f = testing::fixture_data();
    auto queries = f.queries;
    queries.push_back({.id = "Q-unjudged", .project_id = "P9", .kind = QueryKind::issue, .text = "late permits"});
    auto grid = ParameterGrid::paper();
    grid.models = {ModelKind::vsm};
    CHECK_THROWS_AS(run_sweep(f.lessons, queries, f.gold, grid), ValidationError);

    // A config that cannot be built is recorded and the rest still run.
    auto bad = ParameterGrid::paper();
    bad.models = {ModelKind::lda};
    bad.lda_topics = {2};
    bad.lda.max_iterations = 3;  // below the convergence window
    bad.pipelines = {{}};
    const auto r = run_sweep(f.lessons, f.queries, f.gold, bad);
    REQUIRE(r.results.size() == 1);
    CHECK_FALSE(r.results[0].ok());
    CHECK_FALSE(r.results[0].error.empty());
}

TEST_CASE("content hashes") {
    CHECK(content_hash("") == "fnv1a64:cbf29ce484222325");
    CHECK(content_hash("a") == "fnv1a64:af63dc4c8601ec8c");
    const auto& f = testing::fixture_data();
    auto changed = f.lessons;
    changed[0].text += " extra";
    CHECK(hash_lessons(changed) != hash_lessons(f.lessons));
}
