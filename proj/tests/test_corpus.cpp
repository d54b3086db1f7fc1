// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sstream>

#include "llrecall/corpus.hpp"
#include "llrecall/error.hpp"
#include "test_support.hpp"

using namespace llrecall;

namespace {

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("lessons parse in file order") {
    std::istringstream in(R"({"id": "L2", "project_id": "P1", "text": "second"}
{"id": "L1", "project_id": "P1", "text": "first"}
)");
    const auto lessons = parse_lessons(in, "mem");
    REQUIRE(lessons.size() == 2);
    CHECK(lessons[0].id == "L2");
    CHECK(lessons[1].id == "L1");
    CHECK(lessons[1].text == "first");
}

TEST_CASE("lesson errors name the line or the id") {
    std::istringstream dup(R"({"id": "L1", "project_id": "P1", "text": "a"}
{"id": "L1", "project_id": "P1", "text": "b"}
)");
    const auto msg = error_of([&] { parse_lessons(dup, "dup.jsonl"); });
    CHECK(msg.find("L1") != std::string::npos);
    CHECK(msg.find("dup.jsonl:2") != std::string::npos);

    std::istringstream bad(R"({"id": "L1", "project_id": "P1", "text": "a"}
{"id": "L2", "project_id": "P1", "text": "b"
)");
    CHECK(error_of([&] { parse_lessons(bad, "bad.jsonl"); }).find("bad.jsonl:2") != std::string::npos);

    std::istringstream empty(R"({"id": "L1", "project_id": "P1", "text": "   "})");
    CHECK_THROWS_AS(parse_lessons(empty), ValidationError);

    std::istringstream missing_key(R"({"id": "L1", "text": "a"})");
    CHECK_THROWS_AS(parse_lessons(missing_key), ValidationError);
}

TEST_CASE("missing file is an I/O error") {
    CHECK_THROWS_AS(load_lessons("/nonexistent/lessons.jsonl"), IoError);
    CHECK_THROWS_AS(load_queries("/nonexistent/queries.jsonl"), IoError);
}

TEST_CASE("query kinds") {
    std::istringstream ok(R"({"id": "Q1", "project_id": "P1", "kind": "risk", "text": "x"})");
    const auto q = parse_queries(ok);
    REQUIRE(q.size() == 1);
    CHECK(q[0].kind == QueryKind::risk);

    std::istringstream bug(R"({"id": "Q1", "project_id": "P1", "kind": "bug", "text": "x"})");
    CHECK(error_of([&] { parse_queries(bug); }).find("bug") != std::string::npos);
}

TEST_CASE("gold set validation") {
    const std::vector<LessonRecord> lessons{{"L1", "P", "a"}, {"L2", "P", "b"}, {"L3", "P", "c"}};
    const std::vector<QueryRecord> queries{{"Q1", "P", QueryKind::issue, "q"}};

    std::istringstream ok(R"({"Q1": ["L1", "L3"]})");
    const auto gold = parse_goldset(ok, lessons, queries);
    CHECK(gold.size() == 1);
    CHECK(gold.relevant("Q1") == std::set<std::string>{"L1", "L3"});

    std::istringstream dangling_query(R"({"Q9": ["L1"]})");
    CHECK(error_of([&] { parse_goldset(dangling_query, lessons, queries); }).find("Q9") != std::string::npos);

    std::istringstream dangling_lesson(R"({"Q1": ["L7"]})");
    CHECK(error_of([&] { parse_goldset(dangling_lesson, lessons, queries); }).find("L7") != std::string::npos);

    std::istringstream empty(R"({"Q1": []})");
    CHECK_THROWS_AS(parse_goldset(empty, lessons, queries), ValidationError);

    CHECK_THROWS_AS(gold.relevant("Q2"), ValidationError);
}

TEST_CASE("bundled fixture") {
    const auto& f = testing::fixture_data();
    CHECK(f.lessons.size() == 20);
    CHECK(f.queries.size() == 5);
    CHECK(f.gold.size() == 5);
    std::size_t largest = 0;
    for (const auto& [q, rel] : f.gold.entries()) {
        CHECK(rel.size() >= 1);
        CHECK(rel.size() <= 7);
        largest = std::max(largest, rel.size());
    }
    CHECK(largest == 7);

    const auto s = summarize(f.lessons, f.queries);
    CHECK(s.lesson_count == 20);
    CHECK(s.query_count == 5);
    std::size_t total = 0;
    for (const auto& [p, n] : s.project_counts) total += n;
    CHECK(total == 20);
}

TEST_CASE("write then parse round-trips every fixture") {
    const auto& f = testing::fixture_data();
    std::stringstream l, q, g;
    write_lessons(l, f.lessons);
    write_queries(q, f.queries);
    write_goldset(g, f.gold);
    const auto lessons = parse_lessons(l);
    const auto queries = parse_queries(q);
    CHECK(lessons == f.lessons);
    CHECK(queries == f.queries);
    CHECK(parse_goldset(g, lessons, queries).entries() == f.gold.entries());
}

TEST_CASE("loading is order-stable") {
    const auto a = load_lessons(testing::fixture("lessons.jsonl"));
    const auto b = load_lessons(testing::fixture("lessons.jsonl"));
    CHECK(a == b);
}
