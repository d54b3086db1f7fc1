// SPDX-License-Identifier: Apache-2.0
#include "llrecall/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "llrecall/error.hpp"

namespace llrecall {

using nlohmann::json;

namespace {

bool blank(std::string_view s) {
    return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
    return in;
}

std::string required_string(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(fmt::format("{}: missing key '{}'", where, key));
    if (!it->is_string()) throw ValidationError(fmt::format("{}: key '{}' must be a string", where, key));
    return it->get<std::string>();
}

// Calls fn(object, where) for every non-blank line of a JSON-Lines stream.
template <typename Fn>
void for_each_object(std::istream& in, const std::string& source, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const std::string where = fmt::format("{}:{}", source, line_no);
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(fmt::format("{}: malformed JSON ({})", where, e.what()));
        }
        if (!obj.is_object()) throw ValidationError(fmt::format("{}: expected a JSON object", where));
        fn(obj, where);
    }
}

}  // namespace

std::string_view to_string(QueryKind kind) {
    return kind == QueryKind::issue ? "issue" : "risk";
}

QueryKind parse_query_kind(std::string_view text) {
    if (text == "issue") return QueryKind::issue;
    if (text == "risk") return QueryKind::risk;
    throw ValidationError(fmt::format("invalid query kind '{}' (expected issue or risk)", text));
}

std::vector<LessonRecord> parse_lessons(std::istream& in, const std::string& source) {
    std::vector<LessonRecord> out;
    std::unordered_set<std::string> seen;
    for_each_object(in, source, [&](const json& obj, const std::string& where) {
        LessonRecord rec{required_string(obj, "id", where), required_string(obj, "project_id", where),
                         required_string(obj, "text", where)};
        if (rec.id.empty()) throw ValidationError(fmt::format("{}: empty id", where));
        if (blank(rec.text)) throw ValidationError(fmt::format("{}: lesson '{}' has empty text", where, rec.id));
        if (!seen.insert(rec.id).second)
            throw ValidationError(fmt::format("{}: duplicate lesson id '{}'", where, rec.id));
        out.push_back(std::move(rec));
    });
    return out;
}

std::vector<QueryRecord> parse_queries(std::istream& in, const std::string& source) {
    std::vector<QueryRecord> out;
    std::unordered_set<std::string> seen;
    for_each_object(in, source, [&](const json& obj, const std::string& where) {
        QueryRecord rec;
        rec.id = required_string(obj, "id", where);
        rec.project_id = required_string(obj, "project_id", where);
        const std::string kind = required_string(obj, "kind", where);
        try {
            rec.kind = parse_query_kind(kind);
        } catch (const ValidationError& e) {
            throw ValidationError(fmt::format("{}: {}", where, e.what()));
        }
        rec.text = required_string(obj, "text", where);
        if (rec.id.empty()) throw ValidationError(fmt::format("{}: empty id", where));
        if (blank(rec.text)) throw ValidationError(fmt::format("{}: query '{}' has empty text", where, rec.id));
        if (!seen.insert(rec.id).second)
            throw ValidationError(fmt::format("{}: duplicate query id '{}'", where, rec.id));
        out.push_back(std::move(rec));
    });
    return out;
}

GoldSet GoldSet::build(std::map<std::string, std::set<std::string>> relevance,
                       std::span<const LessonRecord> lessons, std::span<const QueryRecord> queries) {
    std::unordered_set<std::string> lesson_ids;
    std::unordered_set<std::string> query_ids;
    for (const auto& l : lessons) lesson_ids.insert(l.id);
    for (const auto& q : queries) query_ids.insert(q.id);

    for (const auto& [qid, rel] : relevance) {
        if (!query_ids.contains(qid))
            throw ValidationError(fmt::format("gold set references unknown query '{}'", qid));
        if (rel.empty())
            throw ValidationError(fmt::format("gold set entry for query '{}' has no relevant lessons", qid));
        for (const auto& lid : rel) {
            if (!lesson_ids.contains(lid))
                throw ValidationError(
                    fmt::format("gold set entry for query '{}' references unknown lesson '{}'", qid, lid));
        }
    }
    GoldSet g;
    g.relevance_ = std::move(relevance);
    return g;
}

const std::set<std::string>& GoldSet::relevant(const std::string& query_id) const {
    auto it = relevance_.find(query_id);
    if (it == relevance_.end())
        throw ValidationError(fmt::format("query '{}' is not in the gold set", query_id));
    return it->second;
}

GoldSet parse_goldset(std::istream& in, std::span<const LessonRecord> lessons,
                      std::span<const QueryRecord> queries, const std::string& source) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("{}: malformed JSON ({})", source, e.what()));
    }
    if (!doc.is_object()) throw ValidationError(fmt::format("{}: expected a JSON object", source));

    std::map<std::string, std::set<std::string>> relevance;
    for (const auto& [qid, arr] : doc.items()) {
        if (!arr.is_array())
            throw ValidationError(fmt::format("{}: entry '{}' must be an array of lesson ids", source, qid));
        auto& rel = relevance[qid];
        for (const auto& v : arr) {
            if (!v.is_string())
                throw ValidationError(fmt::format("{}: entry '{}' contains a non-string id", source, qid));
            rel.insert(v.get<std::string>());
        }
    }
    try {
        return GoldSet::build(std::move(relevance), lessons, queries);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", source, e.what()));
    }
}

std::vector<LessonRecord> load_lessons(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_lessons(in, path.string());
}

std::vector<QueryRecord> load_queries(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_queries(in, path.string());
}

GoldSet load_goldset(const std::filesystem::path& path, std::span<const LessonRecord> lessons,
                     std::span<const QueryRecord> queries) {
    auto in = open_input(path);
    return parse_goldset(in, lessons, queries, path.string());
}

void write_lessons(std::ostream& out, std::span<const LessonRecord> lessons) {
    for (const auto& l : lessons) {
        json obj = {{"id", l.id}, {"project_id", l.project_id}, {"text", l.text}};
        out << obj.dump() << '\n';
    }
}

void write_queries(std::ostream& out, std::span<const QueryRecord> queries) {
    for (const auto& q : queries) {
        json obj = {{"id", q.id}, {"project_id", q.project_id}, {"kind", to_string(q.kind)}, {"text", q.text}};
        out << obj.dump() << '\n';
    }
}

void write_goldset(std::ostream& out, const GoldSet& gold) {
    json doc = json::object();
    for (const auto& [qid, rel] : gold.entries()) doc[qid] = std::vector<std::string>(rel.begin(), rel.end());
    out << doc.dump(2) << '\n';
}

CorpusSummary summarize(std::span<const LessonRecord> lessons, std::span<const QueryRecord> queries) {
    CorpusSummary s;
    s.lesson_count = lessons.size();
    s.query_count = queries.size();
    for (const auto& l : lessons) ++s.project_counts[l.project_id];
    return s;
}

}  // namespace llrecall
