// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace llrecall {

/// A lessons-learned record: the unit of retrieval.
struct LessonRecord {
    std::string id;
    std::string project_id;
    std::string text;

    friend bool operator==(const LessonRecord&, const LessonRecord&) = default;
};

enum class QueryKind { issue, risk };

std::string_view to_string(QueryKind kind);
QueryKind parse_query_kind(std::string_view text);

/// A project issue or risk whose text is used verbatim as a query.
struct QueryRecord {
    std::string id;
    std::string project_id;
    QueryKind kind = QueryKind::issue;
    std::string text;

    friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

/// Query id -> set of relevant lesson ids. Every relevant set is non-empty and
/// every id refers to a loaded record.
class GoldSet {
public:
    GoldSet() = default;

    // Validates against the loaded collections; throws ValidationError.
    static GoldSet build(std::map<std::string, std::set<std::string>> relevance,
                         std::span<const LessonRecord> lessons,
                         std::span<const QueryRecord> queries);

    std::size_t size() const { return relevance_.size(); }
    bool contains(const std::string& query_id) const { return relevance_.contains(query_id); }
    // Throws ValidationError when the query is not judged.
    const std::set<std::string>& relevant(const std::string& query_id) const;
    const std::map<std::string, std::set<std::string>>& entries() const { return relevance_; }

private:
    std::map<std::string, std::set<std::string>> relevance_;
};

struct CorpusSummary {
    std::size_t lesson_count = 0;
    std::size_t query_count = 0;
    std::map<std::string, std::size_t> project_counts;  // lessons per project
};

// JSON-Lines loaders. `source` names the input in error messages.
std::vector<LessonRecord> parse_lessons(std::istream& in, const std::string& source = "<stream>");
std::vector<QueryRecord> parse_queries(std::istream& in, const std::string& source = "<stream>");
GoldSet parse_goldset(std::istream& in, std::span<const LessonRecord> lessons,
                      std::span<const QueryRecord> queries, const std::string& source = "<stream>");

std::vector<LessonRecord> load_lessons(const std::filesystem::path& path);
std::vector<QueryRecord> load_queries(const std::filesystem::path& path);
GoldSet load_goldset(const std::filesystem::path& path, std::span<const LessonRecord> lessons,
                     std::span<const QueryRecord> queries);

void write_lessons(std::ostream& out, std::span<const LessonRecord> lessons);
void write_queries(std::ostream& out, std::span<const QueryRecord> queries);
void write_goldset(std::ostream& out, const GoldSet& gold);

CorpusSummary summarize(std::span<const LessonRecord> lessons, std::span<const QueryRecord> queries);

}  // namespace llrecall
