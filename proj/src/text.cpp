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

#include "factfix/text.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

namespace factfix {

namespace {

// Length in bytes of a whitespace code point starting at text[pos], or 0.
// Covers ASCII whitespace plus the Unicode space separators that show up in
// scraped corpora (NBSP, the U+2000 block, line/paragraph separators, ideographic space).
std::size_t whitespace_length(std::string_view text, std::size_t pos) noexcept {
    const auto c = static_cast<unsigned char>(text[pos]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
        return 1;
    }
    const auto at = [&](std::size_t i) -> unsigned {
        return pos + i < text.size() ? static_cast<unsigned char>(text[pos + i]) : 0u;
    };
    if (c == 0xC2 && (at(1) == 0xA0 || at(1) == 0x85)) {
        return 2;
    }
    if (c == 0xE1 && at(1) == 0x9A && at(2) == 0x80) {
        return 3;
    }
    if (c == 0xE2 && at(1) == 0x80) {
        const unsigned b = at(2);
        if ((b >= 0x80 && b <= 0x8A) || b == 0xA8 || b == 0xA9 || b == 0xAF) {
            return 3;
        }
    }
    if (c == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) {
        return 3;
    }
    if (c == 0xE3 && at(1) == 0x80 && at(2) == 0x80) {
        return 3;
    }
    return 0;
}

bool is_ascii_punct(unsigned char c) noexcept {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
}

// Curly quotes, guillemets and the common dashes/ellipsis, as UTF-8.
constexpr std::array<std::string_view, 10> kUnicodePunct = {
    "\xE2\x80\x9C", "\xE2\x80\x9D", "\xE2\x80\x98", "\xE2\x80\x99", "\xC2\xAB",
    "\xC2\xBB",     "\xE2\x80\x93", "\xE2\x80\x94", "\xE2\x80\xA6", "\xC2\xBF",
};

std::size_t leading_punct(std::string_view s) noexcept {
    if (s.empty()) {
        return 0;
    }
    if (is_ascii_punct(static_cast<unsigned char>(s.front()))) {
        return 1;
    }
    for (auto p : kUnicodePunct) {
        if (s.starts_with(p)) {
            return p.size();
        }
    }
    return 0;
}

std::size_t trailing_punct(std::string_view s) noexcept {
    if (s.empty()) {
        return 0;
    }
    if (is_ascii_punct(static_cast<unsigned char>(s.back()))) {
        return 1;
    }
    for (auto p : kUnicodePunct) {
        if (s.ends_with(p)) {
            return p.size();
        }
    }
    return 0;
}

bool is_terminal_punct(char c) noexcept { return c == '.' || c == '!' || c == '?'; }

}  // namespace

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    for (auto& ch : out) {
        if (ch >= 'A' && ch <= 'Z') {
            ch = static_cast<char>(ch - 'A' + 'a');
        }
    }
    return out;
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < text.size()) {
        if (const auto ws = whitespace_length(text, i); ws > 0) {
            pending_space = !out.empty();
            i += ws;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

std::string_view trim(std::string_view text) noexcept {
    std::size_t begin = 0;
    while (begin < text.size()) {
        const auto ws = whitespace_length(text, begin);
        if (ws == 0) {
            break;
        }
        begin += ws;
    }
    std::size_t end = text.size();
    while (end > begin) {
        // Walk back to the start of the last code point.
        std::size_t cp = end - 1;
        while (cp > begin && (static_cast<unsigned char>(text[cp]) & 0xC0) == 0x80) {
            --cp;
        }
        if (whitespace_length(text, cp) != end - cp) {
            break;
        }
        end = cp;
    }
    return text.substr(begin, end - begin);
}

NormalizedText normalize(std::string_view text) {
    std::string out = collapse_whitespace(to_lower_ascii(text));
    // "a . !" must reach the same fixed point as "a", hence the loop.
    while (!out.empty() && (is_terminal_punct(out.back()) || out.back() == ' ')) {
        out.pop_back();
    }
    return NormalizedText(std::move(out));
}

std::vector<TokenSpan> tokenize_with_offsets(std::string_view text) {
    std::vector<TokenSpan> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (const auto ws = whitespace_length(text, i); ws > 0) {
            i += ws;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && whitespace_length(text, j) == 0) {
            ++j;
        }
        std::size_t start = i;
        std::size_t end = j;
        while (start < end) {
            const auto n = leading_punct(text.substr(start, end - start));
            if (n == 0) {
                break;
            }
            start += n;
        }
        while (end > start) {
            const auto n = trailing_punct(text.substr(start, end - start));
            if (n == 0) {
                break;
            }
            end -= n;
        }
        if (start < end) {
            tokens.push_back({std::string(text.substr(start, end - start)), start, end});
        }
        i = j;
    }
    return tokens;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (auto& tok : tokenize_with_offsets(text)) {
        out.push_back(to_lower_ascii(tok.surface));
    }
    return out;
}

bool is_stopword(std::string_view lowercase_token) {
    static const std::unordered_set<std::string_view> kStopwords = {
        "a",     "an",    "the",   "and",   "or",    "but",   "nor",   "of",    "in",
        "on",    "at",    "to",    "for",   "from",  "by",    "with",  "as",    "into",
        "onto",  "about", "than",  "then",  "that",  "this",  "these", "those", "it",
        "its",   "is",    "are",   "was",   "were",  "be",    "been",  "being", "am",
        "has",   "have",  "had",   "do",    "does",  "did",   "will",  "would", "shall",
        "should", "can",  "could", "may",   "might", "must",  "not",   "no",    "so",
        "if",    "he",    "she",   "they",  "we",    "you",   "i",     "him",   "her",
        "them",  "us",    "me",    "his",   "their", "our",   "your",  "my",    "who",
        "whom",  "which", "what",  "when",  "where", "why",   "how",   "there", "here",
        "also",  "only",  "such",  "over",  "under", "via",   "per",   "s",
    };
    return kStopwords.contains(lowercase_token);
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) noexcept {
    std::uint64_t h = seed;
    for (const auto c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace factfix
