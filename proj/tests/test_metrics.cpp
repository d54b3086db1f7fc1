// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "llrecall/error.hpp"
#include "llrecall/metrics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace llrecall;

namespace {

RankedList ranking(const std::vector<std::string>& ids, std::string query = "Q") {
    RankedList r;
    r.query_id = std::move(query);
    double s = 1.0;
    for (const auto& id : ids) {
        r.entries.push_back({id, s});
        s *= 0.9;
    }
    return r;
}

std::vector<std::string> numbered(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back(fmt::format("L{:03}", i));
    return out;
}

std::vector<std::string> ids_of(const RankedList& r) {
    std::vector<std::string> out;
    for (const auto& e : r.entries) out.push_back(e.lesson_id);
    return out;
}

}  // namespace

TEST_CASE("worked precision example: fourth relevant at rank seven") {
    // Relevant at ranks 1, 3, 5 and 7.
    const auto r = ranking({"r1", "n1", "r2", "n2", "r3", "n3", "r4"});
    const RelevantSet rel{"r1", "r2", "r3", "r4"};
    CHECK(precision_at_k(r, rel, 7) == 4.0 / 7.0);
    const double expected = (1.0 + 2.0 / 3.0 + 3.0 / 5.0 + 4.0 / 7.0) / 4.0;
    CHECK(avp(r, rel) == doctest::Approx(expected).epsilon(1e-15));
    // Removing the first three contributions leaves exactly p(7).
    CHECK(avp(r, rel) * 4.0 - (1.0 + 2.0 / 3.0 + 3.0 / 5.0) == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("avp of rel, non, rel is five sixths") {
    CHECK(avp(ranking({"a", "x", "b"}), {"a", "b"}) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(avp(ranking({"a", "b"}), {"a", "b"}) == 1.0);
    CHECK(avp(ranking({"x", "y"}), {"a"}) == 0.0);
    CHECK(avp(ranking({}), {"a"}) == 0.0);
    // An unretrieved relevant document still counts in the denominator.
    CHECK(avp(ranking({"a"}), {"a", "b"}) == 0.5);
    CHECK_THROWS_AS(avp(ranking({"a"}), {}), ValidationError);
}

TEST_CASE("top-k boundary at twenty") {
    auto ids = numbered(30);
    const RelevantSet at20{ids[19]};
    const RelevantSet at21{ids[20]};
    const auto r = ranking(ids);
    CHECK(topk_hit(r, at20, 20) == 1);
    CHECK(topk_hit(r, at21, 20) == 0);
    CHECK(topk_hit(r, at21, 21) == 1);
    CHECK(topk_hit(ranking({}), at20, 20) == 0);
}

TEST_CASE("precision and recall denominators") {
    auto ids = numbered(10);
    const RelevantSet rel{ids[0], ids[4], ids[9], "L999"};
    const auto r = ranking(ids);
    CHECK(precision_at_k(r, rel, 10) == doctest::Approx(0.3));
    CHECK(recall_at_k(r, rel, 10) == doctest::Approx(0.75));
    // Short list keeps k in the denominator.
    const auto shorter = ranking({ids[0]});
    CHECK(precision_at_k(shorter, rel, 10) == doctest::Approx(0.1));
    CHECK(precision_at_k(ranking({}), rel, 10) == 0.0);
    CHECK(recall_at_k(ranking({}), rel, 10) == 0.0);
}

TEST_CASE("aggregates") {
    const auto& f = testing::fixture_data();
    REQUIRE(f.queries.size() >= 2);
    const auto q0 = f.queries[0].id, q1 = f.queries[1].id;
    const auto rel0 = f.gold.relevant(q0);
    const std::string miss = [&] {
        for (const auto& l : f.lessons)
            if (!f.gold.relevant(q1).count(l.id)) return l.id;
        return std::string();
    }();
    std::vector<RankedList> lists{ranking({*rel0.begin()}, q0), ranking({miss}, q1)};
    CHECK(top_k_accuracy(lists, f.gold, 20) == 0.5);
    CHECK(map_metric(std::span(lists).first(1), f.gold) == avp(lists[0], rel0));
    std::vector<RankedList> perfect{ranking(std::vector<std::string>(rel0.begin(), rel0.end()), q0)};
    CHECK(map_metric(perfect, f.gold) == 1.0);
    CHECK(top_k_accuracy(perfect, f.gold, 20) == 1.0);

    std::vector<RankedList> stray{ranking({miss}, "no-such-query")};
    CHECK_THROWS_AS(top_k_accuracy(stray, f.gold, 20), ValidationError);
    CHECK_THROWS_AS(map_metric(stray, f.gold), ValidationError);
    CHECK_THROWS_AS(evaluate("x", stray, f.gold), ValidationError);
    CHECK_THROWS_AS(map_metric(std::span<const RankedList>(), f.gold), ValidationError);

    MetricConfig bad;
    bad.top_k_cutoff = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("random rankings agree with the oracle and keep the invariants") {
    std::mt19937 rng(11);
    const auto pool = numbered(40);
    for (int trial = 0; trial < 500; ++trial) {
        auto ids = pool;
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(rng() % 31);
        RelevantSet rel;
        const std::size_t nrel = 1 + rng() % 6;
        while (rel.size() < nrel) rel.insert(pool[rng() % pool.size()]);
        const auto r = ranking(ids);
        const auto names = ids_of(r);

        CHECK(avp(r, rel) == doctest::Approx(oracle::average_precision(names, rel)).epsilon(1e-14));
        for (std::size_t k : {1, 5, 10, 20}) {
            const double inside = static_cast<double>(oracle::relevant_in_top(names, rel, k));
            CHECK(precision_at_k(r, rel, k) == inside / static_cast<double>(k));
            CHECK(recall_at_k(r, rel, k) == inside / static_cast<double>(rel.size()));
            CHECK(topk_hit(r, rel, k) == (inside > 0 ? 1 : 0));
            CHECK(topk_hit(r, rel, k) <= topk_hit(r, rel, k + 1));
            CHECK(recall_at_k(r, rel, k) <= recall_at_k(r, rel, k + 1));
        }

        // avp = 1 exactly when the relevant set fills the top |Rel| ranks.
        bool top_filled = names.size() >= rel.size();
        for (std::size_t i = 0; top_filled && i < rel.size(); ++i) top_filled = rel.count(names[i]) > 0;
        CHECK((avp(r, rel) == doctest::Approx(1.0)) == top_filled);

        // Appending non-relevant entries changes nothing.
        auto longer = r;
        for (int i = 0; i < 5; ++i) longer.entries.push_back({fmt::format("N{}", i), 0.001});
        CHECK(avp(longer, rel) == avp(r, rel));
        CHECK(topk_hit(longer, rel, 20) == topk_hit(r, rel, 20));
        for (std::size_t k = 1; k <= r.size(); ++k) CHECK(precision_at_k(longer, rel, k) == precision_at_k(r, rel, k));
    }
}

TEST_CASE("evaluate bundles per-query values in order") {
    const auto& f = testing::fixture_data();
    std::vector<RankedList> lists;
    for (const auto& q : f.queries) {
        const auto& rel = f.gold.relevant(q.id);
        lists.push_back(ranking({"nothing", *rel.rbegin()}, q.id));
    }
    const auto report = evaluate("cfg", lists, f.gold, {20, 10});
    REQUIRE(report.per_query.size() == lists.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < lists.size(); ++i) {
        CHECK(report.per_query[i].query_id == lists[i].query_id);
        CHECK(report.per_query[i].avp == avp(lists[i], f.gold.relevant(lists[i].query_id)));
        CHECK(report.per_query[i].hit == 1);
        CHECK(report.per_query[i].precision == 0.1);
        sum += report.per_query[i].avp;
    }
    CHECK(report.config_id == "cfg");
    CHECK(report.top_k == 1.0);
    CHECK(report.map == doctest::Approx(sum / static_cast<double>(lists.size())).epsilon(1e-15));
}
