/*
 * Copyright 2026 The factfix Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "factfix/ensemble.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "factfix/error.hpp"

namespace factfix {

using nlohmann::json;

double VoteGroup::max_score() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& m : members) {
        best = std::max(best, m.score);
    }
    return best;
}

json EnsembleDecision::to_json() const {
    json groups = json::array();
    for (const auto& g : tally) {
        json members = json::array();
        for (const auto& m : g.members) {
            members.push_back({{"retriever", m.retriever}, {"text", m.candidate.text}, {"score", m.score}});
        }
        groups.push_back({{"text", g.text}, {"count", g.count()}, {"members", std::move(members)}});
    }
    return {{"claim_id", claim_id},
            {"final_text", final_text},
            {"tally", std::move(groups)},
            {"tie_break_used", tie_break_used}};
}

namespace {

struct GroupStats {
    std::size_t index = 0;        // position in the groups vector
    std::size_t first_seen = 0;   // first winners-list position
    std::size_t priority = 0;     // best members-list position
    double max_score = 0.0;
};

std::size_t priority_of(const std::string& retriever, const EnsembleConfig& cfg) {
    const auto it = std::find(cfg.members.begin(), cfg.members.end(), retriever);
    return static_cast<std::size_t>(it - cfg.members.begin());
}

}  // namespace

EnsembleDecision majority_vote(const std::string& claim_id, std::span<const Vote> winners, const EnsembleConfig& cfg) {
    if (winners.empty()) {
        fail(ErrorCode::NoWinners, "claim " + claim_id + ": no winners to vote on");
    }

    std::vector<VoteGroup> groups;
    std::vector<GroupStats> stats;
    std::map<NormalizedText, std::size_t> by_key;
    // Best member per group: (score, priority, position).
    std::vector<std::size_t> best_member;
    for (std::size_t i = 0; i < winners.size(); ++i) {
        const auto& w = winners[i];
        auto key = normalize(w.candidate.text);
        auto [it, inserted] = by_key.emplace(key, groups.size());
        if (inserted) {
            groups.push_back({std::move(key), w.candidate.text, {}});
            stats.push_back({groups.size() - 1, i, priority_of(w.retriever, cfg), w.score});
            best_member.push_back(0);
        }
        auto& g = groups[it->second];
        auto& s = stats[it->second];
        g.members.push_back(w);
        const auto prio = priority_of(w.retriever, cfg);
        s.priority = std::min(s.priority, prio);
        const auto& current = g.members[best_member[it->second]];
        const auto current_prio = priority_of(current.retriever, cfg);
        if (w.score > current.score || (w.score == current.score && prio < current_prio)) {
            best_member[it->second] = g.members.size() - 1;
        }
        s.max_score = std::max(s.max_score, w.score);
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        groups[g].text = groups[g].members[best_member[g]].candidate.text;
    }

    std::size_t top_count = 0;
    for (const auto& g : groups) {
        top_count = std::max(top_count, g.count());
    }
    std::vector<GroupStats> contenders;
    for (const auto& s : stats) {
        if (groups[s.index].count() == top_count) {
            contenders.push_back(s);
        }
    }

    const auto by_score = [](const GroupStats& a, const GroupStats& b) {
        if (a.max_score != b.max_score) {
            return a.max_score > b.max_score;
        }
        if (a.priority != b.priority) {
            return a.priority < b.priority;
        }
        return a.first_seen < b.first_seen;
    };
    const auto by_priority = [](const GroupStats& a, const GroupStats& b) {
        if (a.priority != b.priority) {
            return a.priority < b.priority;
        }
        if (a.max_score != b.max_score) {
            return a.max_score > b.max_score;
        }
        return a.first_seen < b.first_seen;
    };
    const auto winner = cfg.tie_break == TieBreak::ByPriority
                            ? *std::min_element(contenders.begin(), contenders.end(), by_priority)
                            : *std::min_element(contenders.begin(), contenders.end(), by_score);

    EnsembleDecision decision;
    decision.claim_id = claim_id;
    decision.tie_break_used = contenders.size() > 1;
    decision.final_text = groups[winner.index].text;

    std::vector<std::size_t> order;
    for (const auto& s : stats) {
        order.push_back(s.index);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if ((a == winner.index) != (b == winner.index)) {
            return a == winner.index;
        }
        if (groups[a].count() != groups[b].count()) {
            return groups[a].count() > groups[b].count();
        }
        if (stats[a].max_score != stats[b].max_score) {
            return stats[a].max_score > stats[b].max_score;
        }
        return groups[a].key < groups[b].key;
    });
    for (const auto i : order) {
        decision.tally.push_back(std::move(groups[i]));
    }
    return decision;
}

}  // namespace factfix
