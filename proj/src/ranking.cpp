// SPDX-License-Identifier: Apache-2.0
#include "llrecall/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "llrecall/error.hpp"

namespace llrecall {

namespace {

bool ranks_before(const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.lesson_id < b.lesson_id;
}

}  // namespace

std::vector<RankedEntry> rank_scores(std::span<const std::string> ids, std::span<const double> scores,
                                     const std::vector<bool>& keep, std::size_t limit) {
    if (ids.size() != scores.size() || ids.size() != keep.size())
        throw ConfigError("rank_scores: ids, scores and keep must have equal length");
    std::vector<RankedEntry> out;
    out.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (keep[i]) out.push_back({ids[i], scores[i]});
    }
    const std::size_t n = std::min(limit, out.size());
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), out.end(), ranks_before);
    out.resize(n);
    return out;
}

bool is_well_ordered(const RankedList& list) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        if (!seen.insert(list.entries[i].lesson_id).second) return false;
        if (i > 0 && ranks_before(list.entries[i], list.entries[i - 1])) return false;
    }
    return true;
}

}  // namespace llrecall
