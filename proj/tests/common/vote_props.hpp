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

// Exhaustive majority-vote property check shared by the unit and acceptance
// tests. Expected winners are derived here from the voting rules, not from
// the library.

#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "factfix/ensemble.hpp"
#include "factfix/text.hpp"

namespace testgen {

struct VoteCheck {
    std::size_t patterns = 0;
    std::size_t failures = 0;
    std::string first_failure;
};

/// Every assignment of up to `answers` distinct answers and scores drawn from
/// {0.2, 0.5, 0.8} to n retrievers, n in [min_n, max_n], under both policies.
inline VoteCheck check_vote_patterns(std::size_t min_n = 3, std::size_t max_n = 5, std::size_t answers = 3) {
    using namespace factfix;
    const std::vector<std::vector<std::string>> surfaces = {
        {"One Dance was by a Canadian.", "one dance was by a canadian", "One  Dance was by a Canadian!"},
        {"One Dance was by an American.", "ONE DANCE WAS BY AN AMERICAN", "One Dance was by an American?"},
        {"One Dance was by a Mexican.", "one dance was by a mexican.", "One Dance  was by a Mexican"},
    };
    const std::vector<double> levels = {0.2, 0.5, 0.8};
    VoteCheck out;
    std::mt19937_64 rng(99);
    const auto fail = [&](const std::string& why) {
        if (out.failures++ == 0) {
            out.first_failure = why;
        }
    };

    for (std::size_t n = min_n; n <= max_n; ++n) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) {
            total *= answers * levels.size();
        }
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<std::size_t> answer(n);
            std::vector<double> score(n);
            std::size_t c = code;
            for (std::size_t i = 0; i < n; ++i) {
                answer[i] = c % answers;
                c /= answers;
                score[i] = levels[c % levels.size()];
                c /= levels.size();
            }
            EnsembleConfig cfg;
            std::vector<Vote> votes;
            for (std::size_t i = 0; i < n; ++i) {
                cfg.members.push_back("r" + std::to_string(i));
                CandidateCorrection cand;
                cand.claim_id = "c";
                cand.text = surfaces[answer[i]][(i + code) % surfaces[answer[i]].size()];
                votes.push_back({cfg.members.back(), cand, score[i]});
            }

            // Expected outcome from the rules.
            std::vector<std::size_t> count(answers, 0);
            std::vector<double> best(answers, -1.0);
            std::vector<std::size_t> first(answers, n);
            for (std::size_t i = 0; i < n; ++i) {
                ++count[answer[i]];
                best[answer[i]] = std::max(best[answer[i]], score[i]);
                first[answer[i]] = std::min(first[answer[i]], i);
            }
            const auto top = *std::max_element(count.begin(), count.end());
            std::vector<std::size_t> tied;
            for (std::size_t a = 0; a < answers; ++a) {
                if (count[a] == top) {
                    tied.push_back(a);
                }
            }
            for (const auto policy : {TieBreak::ByScore, TieBreak::ByPriority}) {
                cfg.tie_break = policy;
                ++out.patterns;
                const auto better = [&](std::size_t a, std::size_t b) {
                    if (policy == TieBreak::ByScore && best[a] != best[b]) {
                        return best[a] > best[b];
                    }
                    return first[a] < first[b];
                };
                const auto want = *std::min_element(tied.begin(), tied.end(),
                                                    [&](auto a, auto b) { return better(a, b); });
                // Surface: highest score in the group, then earliest retriever.
                std::size_t surface_of = n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (answer[i] == want && (surface_of == n || score[i] > score[surface_of])) {
                        surface_of = i;
                    }
                }

                const auto d = majority_vote("c", votes, cfg);
                const std::string tag = "n=" + std::to_string(n) + " code=" + std::to_string(code) +
                                        (policy == TieBreak::ByScore ? " BY_SCORE" : " BY_PRIORITY");
                if (normalize(d.final_text) != normalize(surfaces[want][0])) {
                    fail(tag + ": wrong winner '" + d.final_text + "'");
                    continue;
                }
                if (d.final_text != votes[surface_of].candidate.text) {
                    fail(tag + ": wrong surface '" + d.final_text + "'");
                }
                if (d.tie_break_used != (tied.size() > 1)) {
                    fail(tag + ": tie_break_used mismatch");
                }
                std::size_t sum = 0;
                for (const auto& g : d.tally) {
                    sum += g.count();
                }
                if (sum != n || d.tally.empty() || d.tally.front().count() != top) {
                    fail(tag + ": tally inconsistent");
                }
                if (top == n && (d.tally.size() != 1 || d.tie_break_used)) {
                    fail(tag + ": unanimity");
                }
                auto shuffled = votes;
                std::shuffle(shuffled.begin(), shuffled.end(), rng);
                if (majority_vote("c", shuffled, cfg).final_text != d.final_text) {
                    fail(tag + ": not permutation invariant");
                }
            }
        }
    }
    return out;
}

}  // namespace testgen
