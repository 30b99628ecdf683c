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

// Random claim material and masking invariant checks shared by the unit and
// acceptance tests.

#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "factfix/masking.hpp"
#include "factfix/types.hpp"

namespace testgen {

/// Sentence of 1..max_words words drawn from a mix of capitalized names,
/// stopwords, numbers, months, content words and quoted or punctuated forms.
inline std::string random_claim_text(std::mt19937_64& rng, std::size_t max_words = 14) {
    static const std::vector<std::string> pool = {
        "The",   "the",    "of",     "a",       "in",       "is",      "was",     "by",       "and",
        "Drake", "Canada", "Paris",  "One",     "Dance",    "Giver",   "Marie",   "Curie",    "1950",
        "2016",  "May",    "3",      "blood",   "oxygen",   "levels",  "high",    "low",      "film",
        "song",  "river",  "flows",  "into",    "\"quoted", "words\"", "U.S.",    "blood-red", "(big)",
        "city,", "it's",   "--",     "capital", "located",  "born",    "Nobel",   "Prize",    "Ocean."};
    std::uniform_int_distribution<std::size_t> len(1, max_words);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::uniform_int_distribution<int> gap(0, 9);
    std::string text;
    for (std::size_t n = len(rng), i = 0; i < n; ++i) {
        if (i > 0) {
            text += gap(rng) == 0 ? "  " : " ";
        }
        text += pool[pick(rng)];
    }
    if (gap(rng) < 7) {
        text += '.';
    }
    return text;
}

inline std::size_t count_masks(const std::string& text) {
    std::size_t n = 0;
    for (auto at = text.find(factfix::kMaskToken); at != std::string::npos;
         at = text.find(factfix::kMaskToken, at + factfix::kMaskToken.size())) {
        ++n;
    }
    return n;
}

/// Empty when the variant satisfies its reconstruction invariant, else a reason.
inline std::optional<std::string> mask_violation(const factfix::Claim& claim, const factfix::MaskedClaim& m) {
    if (m.claim_id != claim.id) {
        return "claim id mismatch";
    }
    if (m.masked_spans.empty()) {
        return "no masked spans";
    }
    if (count_masks(m.masked_text) != m.masked_spans.size()) {
        return "mask count " + std::to_string(count_masks(m.masked_text)) + " != spans " +
               std::to_string(m.masked_spans.size());
    }
    for (const auto& s : m.masked_spans) {
        if (s.char_end > claim.text.size() || claim.text.substr(s.char_start, s.char_end - s.char_start) != s.surface) {
            return "span '" + s.surface + "' does not address the claim";
        }
    }
    if (factfix::unmask(m) != claim.text) {
        return "unmask gives '" + factfix::unmask(m) + "'";
    }
    return std::nullopt;
}

}  // namespace testgen
