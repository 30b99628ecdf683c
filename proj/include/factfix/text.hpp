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

// Deterministic text handling shared by masking, retrieval and the metrics.
//
// Tokens are whitespace-separated words with punctuation stripped from both
// edges; internal punctuation ("blood-oxygen", "U.S") survives. Case folding
// is ASCII-only, non-ASCII bytes pass through untouched. Offsets are byte
// offsets into the UTF-8 input.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace factfix {

/// Lowercased, whitespace-collapsed text with terminal . ! ? removed.
class NormalizedText {
public:
    NormalizedText() = default;

    const std::string& value() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    friend bool operator==(const NormalizedText&, const NormalizedText&) = default;
    friend auto operator<=>(const NormalizedText&, const NormalizedText&) = default;

private:
    friend NormalizedText normalize(std::string_view text);
    explicit NormalizedText(std::string value) : value_(std::move(value)) {}

    std::string value_;
};

NormalizedText normalize(std::string_view text);

/// A token together with where its (edge-stripped) surface sits in the input.
struct TokenSpan {
    std::string surface;  // original casing
    std::size_t start = 0;
    std::size_t end = 0;
};

/// Lowercased tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Tokens with byte offsets; surfaces keep their original casing.
std::vector<TokenSpan> tokenize_with_offsets(std::string_view text);

std::string to_lower_ascii(std::string_view text);

/// Collapses every whitespace run (including newlines) into one space and trims.
std::string collapse_whitespace(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

/// Small English function-word list used by the span heuristics and the index analyzer.
bool is_stopword(std::string_view lowercase_token);

/// FNV-1a, 64 bit. Used wherever a stable cross-platform hash is needed.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

}  // namespace factfix
