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

#include "factfix/stub.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>

#include "factfix/correction.hpp"
#include "factfix/masking.hpp"
#include "factfix/text.hpp"

namespace factfix::stub {

using nlohmann::json;

namespace {

constexpr std::uint64_t kFnvBasis = 0xcbf29ce484222325ULL;

std::set<std::string> token_set(std::string_view text) {
    const auto tokens = tokenize(text);
    return {tokens.begin(), tokens.end()};
}

std::vector<std::string> lower_surfaces(const std::vector<TokenSpan>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        out.push_back(to_lower_ascii(t.surface));
    }
    return out;
}

bool has_content_word(const std::vector<std::string>& tokens, std::size_t begin, std::size_t len) {
    for (std::size_t k = begin; k < begin + len; ++k) {
        if (!is_stopword(tokens[k])) {
            return true;
        }
    }
    return false;
}

bool run_matches(const std::vector<std::string>& a, std::size_t ai, const std::vector<std::string>& b,
                 std::size_t bi, std::size_t len) {
    for (std::size_t k = 0; k < len; ++k) {
        if (a[ai + k] != b[bi + k]) {
            return false;
        }
    }
    return true;
}

struct Sentence {
    std::string_view text;
    std::vector<TokenSpan> spans;
    std::vector<std::string> lower;
};

std::string slice(const Sentence& s, std::size_t first, std::size_t last_exclusive) {
    const auto begin = s.spans[first].start;
    const auto end = s.spans[last_exclusive - 1].end;
    return std::string(s.text.substr(begin, end - begin));
}

// Rule 1: longest run shared by O and a sentence, widened to |O| tokens.
std::optional<std::string> span_anchor(const std::vector<std::string>& original, const std::vector<Sentence>& evidence) {
    std::size_t best_len = 0;
    std::optional<std::string> best;
    for (const auto& s : evidence) {
        const auto n = s.lower.size();
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < original.size(); ++i) {
                std::size_t len = 0;
                while (i + len < original.size() && j + len < n && original[i + len] == s.lower[j + len]) {
                    ++len;
                }
                // Strictly longer only: earlier sentence, position and O offset win ties.
                if (len <= best_len || !has_content_word(original, i, len)) {
                    continue;
                }
                const auto width = std::min(original.size(), n);
                const auto raw_start = static_cast<long long>(j) - static_cast<long long>(i);
                const auto start = static_cast<std::size_t>(
                    std::clamp<long long>(raw_start, 0, static_cast<long long>(n - width)));
                best_len = len;
                best = slice(s, start, start + width);
            }
        }
    }
    return best;
}

struct ContextHit {
    std::size_t len = 0;
    std::string fill;
};

// Rule 2: longest context suffix (left) or prefix (right) found in a sentence.
std::optional<std::string> context_anchor(const std::vector<std::string>& left, const std::vector<std::string>& right,
                                          std::size_t width, const std::vector<Sentence>& evidence) {
    ContextHit best_left;
    ContextHit best_right;
    for (const auto& s : evidence) {
        const auto n = s.lower.size();
        for (std::size_t len = left.size(); len > best_left.len; --len) {
            const auto from = left.size() - len;
            if (!has_content_word(left, from, len)) {
                continue;
            }
            bool found = false;
            for (std::size_t j = 0; j + len < n; ++j) {  // at least one token must follow
                if (run_matches(left, from, s.lower, j, len)) {
                    const auto start = j + len;
                    best_left = {len, slice(s, start, std::min(n, start + width))};
                    found = true;
                    break;
                }
            }
            if (found) {
                break;
            }
        }
        for (std::size_t len = right.size(); len > best_right.len; --len) {
            if (!has_content_word(right, 0, len)) {
                continue;
            }
            bool found = false;
            for (std::size_t j = 1; j + len <= n; ++j) {  // at least one token must precede
                if (run_matches(right, 0, s.lower, j, len)) {
                    best_right = {len, slice(s, j - std::min(j, width), j)};
                    found = true;
                    break;
                }
            }
            if (found) {
                break;
            }
        }
    }
    if (best_left.len == 0 && best_right.len == 0) {
        return std::nullopt;
    }
    return best_left.len >= best_right.len ? best_left.fill : best_right.fill;
}

struct MaskSite {
    std::size_t start = 0;  // byte range of O in the input claim
    std::size_t end = 0;
};

// Matches masked = s0 [MASK] s1 ... [MASK] sk against the input claim.
std::optional<std::vector<MaskSite>> align(std::string_view input, std::string_view masked) {
    std::vector<std::string_view> segments;
    std::size_t pos = 0;
    while (true) {
        const auto at = masked.find(kMaskToken, pos);
        if (at == std::string_view::npos) {
            segments.push_back(masked.substr(pos));
            break;
        }
        segments.push_back(masked.substr(pos, at - pos));
        pos = at + kMaskToken.size();
    }
    if (!input.starts_with(segments.front()) || !input.ends_with(segments.back()) ||
        segments.front().size() + segments.back().size() > input.size()) {
        return std::nullopt;
    }
    std::vector<MaskSite> sites;
    std::size_t cursor = segments.front().size();
    const std::size_t tail = input.size() - segments.back().size();
    for (std::size_t k = 1; k + 1 < segments.size(); ++k) {
        const auto at = segments[k].empty() ? cursor : input.find(segments[k], cursor + 1);
        if (at == std::string_view::npos || at > tail) {
            return std::nullopt;
        }
        sites.push_back({cursor, at});
        cursor = at + segments[k].size();
    }
    if (cursor > tail) {
        return std::nullopt;
    }
    sites.push_back({cursor, tail});
    return sites;
}

std::vector<std::string> tokens_between(const std::vector<TokenSpan>& tokens, std::size_t begin, std::size_t end) {
    std::vector<std::string> out;
    for (const auto& t : tokens) {
        if (t.start >= begin && t.end <= end) {
            out.push_back(to_lower_ascii(t.surface));
        }
    }
    return out;
}

std::optional<std::string> line_after(std::string_view prompt, std::string_view marker) {
    const auto at = prompt.rfind(marker);
    if (at == std::string_view::npos) {
        return std::nullopt;
    }
    auto rest = prompt.substr(at + marker.size());
    rest = rest.substr(0, rest.find('\n'));
    return std::string(trim(rest));
}

std::vector<std::string> evidence_lines(std::string_view prompt) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < prompt.size()) {
        const auto nl = prompt.find('\n', pos);
        const auto line = prompt.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (line.starts_with('[')) {
            std::size_t k = 1;
            while (k < line.size() && line[k] >= '0' && line[k] <= '9') {
                ++k;
            }
            if (k > 1 && line.substr(k).starts_with(".] ")) {
                out.emplace_back(line.substr(k + 3));
            }
        }
        if (nl == std::string_view::npos) {
            break;
        }
        pos = nl + 1;
    }
    return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0) {
            out += '\n';
        }
        out += lines[i];
    }
    return out;
}

}  // namespace

std::vector<float> embed(std::string_view text, int dim, std::uint64_t seed) {
    if (dim < 1) {
        throw std::invalid_argument("embedding dimension must be positive");
    }
    const auto basis = kFnvBasis ^ seed;
    std::vector<double> acc(static_cast<std::size_t>(dim), 0.0);
    const auto add = [&](std::string_view feature) {
        const auto h = fnv1a64(feature, basis);
        acc[h % static_cast<std::uint64_t>(dim)] += (h >> 63) != 0 ? -1.0 : 1.0;
    };
    for (const auto& t : tokenize(text)) {
        add(t);
    }
    double norm = 0.0;
    for (const auto x : acc) {
        norm += x * x;
    }
    if (norm == 0.0) {
        std::fill(acc.begin(), acc.end(), 0.0);
        add(text);
        norm = 1.0;
    }
    norm = std::sqrt(norm);
    std::vector<float> out(acc.size());
    std::transform(acc.begin(), acc.end(), out.begin(), [&](double x) { return static_cast<float>(x / norm); });
    return out;
}

double entail(std::string_view premise, std::string_view hypothesis) {
    if (trim(premise).empty()) {
        return 0.5;
    }
    const auto p = token_set(premise);
    const auto h = token_set(hypothesis);
    if (h.empty()) {
        return 1.0;
    }
    std::size_t shared = 0;
    for (const auto& t : h) {
        shared += p.count(t);
    }
    return shared == h.size() ? 1.0 : static_cast<double>(shared) / static_cast<double>(h.size());
}

std::vector<double> rerank(std::string_view query, std::span<const std::string> docs) {
    const auto q = token_set(query);
    std::vector<double> out;
    out.reserve(docs.size());
    for (const auto& d : docs) {
        if (q.empty()) {
            out.push_back(0.0);
            continue;
        }
        const auto dt = token_set(d);
        std::size_t shared = 0;
        for (const auto& t : q) {
            shared += dt.count(t);
        }
        out.push_back(static_cast<double>(shared) / static_cast<double>(q.size()));
    }
    return out;
}

std::string fill_masks(std::string_view input_claim, std::string_view masked_claim,
                       std::span<const std::string> evidence) {
    std::vector<Sentence> sentences;
    sentences.reserve(evidence.size());
    for (const auto& e : evidence) {
        Sentence s{e, tokenize_with_offsets(e), {}};
        s.lower = lower_surfaces(s.spans);
        sentences.push_back(std::move(s));
    }

    const auto claim_tokens = tokenize_with_offsets(input_claim);
    const auto sites = align(input_claim, masked_claim);

    std::string out;
    std::size_t pos = 0;
    std::size_t mask_index = 0;
    while (true) {
        const auto at = masked_claim.find(kMaskToken, pos);
        if (at == std::string_view::npos) {
            out += masked_claim.substr(pos);
            break;
        }
        out += masked_claim.substr(pos, at - pos);
        pos = at + kMaskToken.size();

        std::optional<std::string> fill;
        if (sites) {
            const auto& site = (*sites)[mask_index];
            const auto original = tokens_between(claim_tokens, site.start, site.end);
            const auto left = tokens_between(claim_tokens, 0, site.start);
            const auto right = tokens_between(claim_tokens, site.end, input_claim.size());
            if (!original.empty()) {
                fill = span_anchor(original, sentences);
            }
            if (!fill) {
                fill = context_anchor(left, right, std::max<std::size_t>(1, original.size()), sentences);
            }
            if (!fill) {
                fill = std::string(input_claim.substr(site.start, site.end - site.start));
            }
        } else {
            const auto left = lower_surfaces(tokenize_with_offsets(masked_claim.substr(0, at)));
            fill = context_anchor(left, {}, 1, sentences);
        }
        out += fill.value_or(std::string(kMaskToken));
        ++mask_index;
    }
    return out;
}

std::string generate(std::string_view prompt_text) {
    const auto evidence = evidence_lines(prompt_text);
    const auto claim = line_after(prompt_text, prompt::kInputClaim).value_or("");
    if (prompt_text.find(prompt::kVerifyInstruction) != std::string_view::npos) {
        return entail(join_lines(evidence), claim) == 1.0 ? "SUPPORTED" : "REFUTED";
    }
    const auto masked = line_after(prompt_text, prompt::kMaskedClaim);
    if (!masked || *masked == "[masked sentence]") {
        return claim;
    }
    return fill_masks(claim, *masked, evidence);
}

json StubTransport::handle(std::string_view path, const json& payload) const {
    if (path == "/embed") {
        json vectors = json::array();
        for (const auto& t : payload.at("texts")) {
            vectors.push_back(embed(t.get<std::string>(), dim_, seed_));
        }
        return {{"vectors", std::move(vectors)}};
    }
    if (path == "/entail") {
        return {{"entailment",
                 entail(payload.at("premise").get<std::string>(), payload.at("hypothesis").get<std::string>())}};
    }
    if (path == "/generate") {
        return {{"text", generate(payload.at("prompt").get<std::string>())}};
    }
    if (path == "/rerank") {
        const auto docs = payload.at("docs").get<std::vector<std::string>>();
        return {{"scores", rerank(payload.at("query").get<std::string>(), docs)}};
    }
    if (path == "/spans") {
        json spans = json::array();
        for (const auto& s : heuristic_spans(payload.at("text").get<std::string>())) {
            spans.push_back({{"surface", s.surface}, {"start", s.char_start}, {"end", s.char_end}});
        }
        return {{"spans", std::move(spans)}};
    }
    throw std::out_of_range("unknown endpoint " + std::string(path));
}

HttpResponse StubTransport::post(std::string_view path, const std::string& body,
                                 std::chrono::milliseconds /*timeout*/) {
    try {
        return {200, handle(path, json::parse(body)).dump()};
    } catch (const std::out_of_range& e) {
        return {404, json{{"error", e.what()}}.dump()};
    } catch (const std::exception& e) {
        return {400, json{{"error", e.what()}}.dump()};
    }
}

}  // namespace factfix::stub
