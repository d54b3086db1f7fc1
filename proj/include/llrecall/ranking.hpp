// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace llrecall {

struct RankedEntry {
    std::string lesson_id;
    double score = 0.0;

    friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// Retrieval result for one query: scores non-increasing, ties broken by
/// lesson id ascending, no duplicate lesson ids.
struct RankedList {
    std::string query_id;
    std::vector<RankedEntry> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// Sorts (id, score) pairs into ranking order and keeps at most `limit`
/// entries. Entries with `keep[i] == false` are dropped first.
std::vector<RankedEntry> rank_scores(std::span<const std::string> ids, std::span<const double> scores,
                                     const std::vector<bool>& keep, std::size_t limit);

/// True when `list` satisfies the ordering and uniqueness contract.
bool is_well_ordered(const RankedList& list);

}  // namespace llrecall
