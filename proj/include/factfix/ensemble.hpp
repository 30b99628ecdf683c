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

// Hard majority voting over per-retriever winners.
//
// Winners are grouped by NormalizedText. The largest group wins. When
// several groups share the largest count the configured policy decides:
//   BY_SCORE     the group holding the highest single combined score, then
//                BY_PRIORITY, then first appearance in the winners list;
//   BY_PRIORITY  the group holding the retriever listed earliest in
//                EnsembleConfig::members, then BY_SCORE, then first appearance.
// The emitted text is the surface form of the winning group's highest-scoring
// member (then earliest retriever, then first appearance).

#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "factfix/config.hpp"
#include "factfix/text.hpp"
#include "factfix/types.hpp"

namespace factfix {

struct Vote {
    std::string retriever;
    CandidateCorrection candidate;
    double score = 0.0;
};

struct VoteGroup {
    NormalizedText key;
    std::string text;  // surface form of the best member
    std::vector<Vote> members;

    std::size_t count() const noexcept { return members.size(); }
    double max_score() const;
};

struct EnsembleDecision {
    std::string claim_id;
    std::string final_text;
    // Winning group first, then by count desc, max score desc, normalized text asc.
    std::vector<VoteGroup> tally;
    bool tie_break_used = false;

    nlohmann::json to_json() const;
};

/// Throws NoWinners on an empty list.
EnsembleDecision majority_vote(const std::string& claim_id, std::span<const Vote> winners, const EnsembleConfig& cfg);

}  // namespace factfix
