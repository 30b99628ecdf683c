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

#include "factfix/masking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "factfix/backends.hpp"
#include "factfix/error.hpp"
#include "factfix/text.hpp"

namespace factfix {

namespace {

bool is_capitalized(std::string_view token) {
    return !token.empty() && token.front() >= 'A' && token.front() <= 'Z';
}

bool has_digit(std::string_view token) {
    return std::any_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_month(std::string_view lower) {
    static const std::unordered_set<std::string_view> kMonths = {
        "january", "february", "march",     "april",   "may",      "june",
        "july",    "august",   "september", "october", "november", "december",
    };
    return kMonths.contains(lower);
}

struct SpanCollector {
    std::string_view text;
    std::vector<SpanCandidate> spans;
    std::set<std::pair<std::size_t, std::size_t>> seen;

    void add(std::size_t start, std::size_t end, SpanSource source = SpanSource::Heuristic) {
        if (start >= end || !seen.insert({start, end}).second) {
            return;
        }
        spans.push_back({std::string(text.substr(start, end - start)), start, end, source});
    }
};

// Emits maximal runs of tokens satisfying `in_run`, split wherever `joins`
// rejects the gap between two neighbours.
template <typename InRun, typename Joins, typename Emit>
void for_each_run(const std::vector<TokenSpan>& tokens, InRun in_run, Joins joins, Emit emit) {
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (!in_run(i)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < tokens.size() && in_run(j + 1) && joins(j)) {
            ++j;
        }
        emit(i, j);
        i = j + 1;
    }
}

}  // namespace

std::vector<SpanCandidate> heuristic_spans(std::string_view text) {
    const auto tokens = tokenize_with_offsets(text);
    SpanCollector out{text, {}, {}};
    if (tokens.empty()) {
        return {};
    }

    std::vector<std::string> lower;
    lower.reserve(tokens.size());
    for (const auto& t : tokens) {
        lower.push_back(to_lower_ascii(t.surface));
    }
    // Gap text between token i and i+1, e.g. " " or ", ".
    const auto gap = [&](std::size_t i) {
        return trim(text.substr(tokens[i].end, tokens[i + 1].start - tokens[i].end));
    };
    const auto clean_gap = [&](std::size_t i) { return gap(i).empty(); };

    // (a) capitalized runs
    for_each_run(
        tokens, [&](std::size_t i) { return is_capitalized(tokens[i].surface); }, clean_gap,
        [&](std::size_t first, std::size_t last) {
            if (first == 0 && is_stopword(lower[0])) {
                ++first;
            }
            if (first <= last) {
                out.add(tokens[first].start, tokens[last].end);
            }
        });

    // (b) numbers and dates; "March 3, 2017" joins across the comma
    for_each_run(
        tokens, [&](std::size_t i) { return has_digit(tokens[i].surface) || is_month(lower[i]); },
        [&](std::size_t i) {
            const auto g = gap(i);
            return g.empty() || g == ",";
        },
        [&](std::size_t first, std::size_t last) {
            for (auto k = first; k <= last; ++k) {
                if (has_digit(tokens[k].surface)) {
                    out.add(tokens[first].start, tokens[last].end);
                    return;
                }
            }
        });

    // (c) quoted text
    const auto add_quoted = [&](std::string_view open, std::string_view close) {
        std::size_t pos = 0;
        while (true) {
            const auto a = text.find(open, pos);
            if (a == std::string_view::npos) {
                return;
            }
            const auto b = text.find(close, a + open.size());
            if (b == std::string_view::npos) {
                return;
            }
            const auto inner_begin = a + open.size();
            const auto inner = trim(text.substr(inner_begin, b - inner_begin));
            if (!inner.empty()) {
                const auto start = static_cast<std::size_t>(inner.data() - text.data());
                out.add(start, start + inner.size());
            }
            pos = b + close.size();
        }
    };
    add_quoted("\"", "\"");
    add_quoted("\xE2\x80\x9C", "\xE2\x80\x9D");

    // (d) content-word chunks between stopwords
    for_each_run(
        tokens, [&](std::size_t i) { return !is_stopword(lower[i]); }, clean_gap,
        [&](std::size_t first, std::size_t last) { out.add(tokens[first].start, tokens[last].end); });

    return std::move(out.spans);
}

std::vector<SpanCandidate> ExternalSpanProvider::spans(const Claim& claim) {
    const std::string& text = claim.text;
    std::vector<SpanCandidate> out;
    for (auto span : client_.spans(text)) {
        if (span.surface.empty()) {
            continue;
        }
        const bool valid = span.char_end <= text.size() && span.char_start < span.char_end &&
                           text.compare(span.char_start, span.char_end - span.char_start, span.surface) == 0;
        if (!valid) {
            // Pick the occurrence closest to the reported offset.
            std::size_t best = std::string::npos;
            for (auto pos = text.find(span.surface); pos != std::string::npos;
                 pos = text.find(span.surface, pos + 1)) {
                const auto dist = [&](std::size_t p) {
                    return p > span.char_start ? p - span.char_start : span.char_start - p;
                };
                if (best == std::string::npos || dist(pos) < dist(best)) {
                    best = pos;
                }
            }
            if (best == std::string::npos) {
                spdlog::warn("claim {}: dropping external span '{}' not found in text", claim.id, span.surface);
                continue;
            }
            span.char_start = best;
            span.char_end = best + span.surface.size();
        }
        out.push_back(std::move(span));
    }
    return out;
}

std::vector<SpanCandidate> extract_spans(const Claim& claim, SpanProvider& provider) {
    claim.validate();
    auto raw = provider.spans(claim);
    std::vector<SpanCandidate> out;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto& span : raw) {
        if (span.char_start >= span.char_end || span.char_end > claim.text.size() ||
            claim.text.compare(span.char_start, span.char_end - span.char_start, span.surface) != 0) {
            continue;
        }
        if (seen.insert({span.char_start, span.char_end}).second) {
            out.push_back(std::move(span));
        }
    }
    std::sort(out.begin(), out.end(), [](const SpanCandidate& a, const SpanCandidate& b) {
        return std::tie(a.char_start, a.surface) < std::tie(b.char_start, b.surface);
    });
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> CharNgramTfidfSimilarity::similarity_matrix(std::span<const std::string> texts) {
    const std::size_t n = texts.size();
    std::vector<std::map<std::string, double>> vectors(n);
    std::unordered_map<std::string, int> df;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string padded = " " + to_lower_ascii(texts[i]) + " ";
        for (std::size_t k = 0; k + 3 <= padded.size(); ++k) {
            vectors[i][padded.substr(k, 3)] += 1.0;
        }
        for (const auto& [gram, _] : vectors[i]) {
            ++df[gram];
        }
    }
    std::vector<double> norms(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& [gram, w] : vectors[i]) {
            w *= std::log((1.0 + static_cast<double>(n)) / (1.0 + df[gram])) + 1.0;
            norms[i] += w * w;
        }
        norms[i] = std::sqrt(norms[i]);
    }
    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        sim[i][i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double dot = 0.0;
            const auto& small = vectors[i].size() <= vectors[j].size() ? vectors[i] : vectors[j];
            const auto& large = vectors[i].size() <= vectors[j].size() ? vectors[j] : vectors[i];
            for (const auto& [gram, w] : small) {
                if (const auto it = large.find(gram); it != large.end()) {
                    dot += w * it->second;
                }
            }
            const double denom = norms[i] * norms[j];
            sim[i][j] = sim[j][i] = denom > 0.0 ? dot / denom : 0.0;
        }
    }
    return sim;
}

std::vector<std::vector<double>> EmbeddingSimilarity::similarity_matrix(std::span<const std::string> texts) {
    auto vectors = client_.embed(texts);
    std::vector<std::vector<double>> unit(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (!vectors.empty() && vectors[i].size() != vectors[0].size()) {
            fail(ErrorCode::DimensionMismatch, "embedding service returned vectors of different lengths");
        }
        double norm = 0.0;
        for (const float x : vectors[i]) {
            norm += static_cast<double>(x) * x;
        }
        norm = std::sqrt(norm);
        unit[i].reserve(vectors[i].size());
        for (const float x : vectors[i]) {
            unit[i].push_back(norm > 0.0 ? x / norm : 0.0);
        }
    }
    const std::size_t n = unit.size();
    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        sim[i][i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < unit[i].size(); ++k) {
                dot += unit[i][k] * unit[j][k];
            }
            sim[i][j] = sim[j][i] = dot;
        }
    }
    return sim;
}

// ---------------------------------------------------------------------------

std::vector<MmrStep> mmr_rank(std::span<const double> relevance,
                              const std::vector<std::vector<double>>& pairwise, double alpha,
                              std::size_t m) {
    const std::size_t n = relevance.size();
    if (pairwise.size() != n) {
        fail(ErrorCode::InvalidArgument, "mmr_rank: pairwise matrix size differs from candidate count");
    }
    const std::size_t steps = std::min(m, n);
    std::vector<bool> taken(n, false);
    std::vector<double> redundancy(n, 0.0);  // max similarity to the selected set
    std::vector<MmrStep> order;
    order.reserve(steps);
    for (std::size_t step = 0; step < steps; ++step) {
        std::size_t best = n;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v) {
            if (taken[v]) {
                continue;
            }
            const double red = order.empty() ? 0.0 : redundancy[v];
            const double score = alpha * relevance[v] - (1.0 - alpha) * red;
            if (best == n || score > best_score) {
                best = v;
                best_score = score;
            }
        }
        taken[best] = true;
        order.push_back({best, best_score});
        for (std::size_t v = 0; v < n; ++v) {
            const double s = pairwise[v][best];
            redundancy[v] = order.size() == 1 ? s : std::max(redundancy[v], s);
        }
    }
    return order;
}

MaskSelection mmr_select(const Claim& claim, std::vector<SpanCandidate> candidates,
                         const MaskingConfig& cfg, SimilarityModel& sim) {
    if (candidates.empty()) {
        fail(ErrorCode::NoCandidates, "claim '" + claim.id + "' has no span candidates");
    }
    std::sort(candidates.begin(), candidates.end(), [](const SpanCandidate& a, const SpanCandidate& b) {
        return std::tie(a.char_start, a.surface, a.char_end) < std::tie(b.char_start, b.surface, b.char_end);
    });
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](const SpanCandidate& a, const SpanCandidate& b) {
                                     return a.char_start == b.char_start && a.char_end == b.char_end;
                                 }),
                     candidates.end());

    std::vector<std::string> texts;
    texts.reserve(candidates.size() + 1);
    texts.push_back(claim.text);
    for (const auto& c : candidates) {
        texts.push_back(c.surface);
    }
    const auto matrix = sim.similarity_matrix(texts);
    const std::size_t n = candidates.size();
    std::vector<double> relevance(n);
    std::vector<std::vector<double>> pairwise(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        relevance[i] = matrix[0][i + 1];
        for (std::size_t j = 0; j < n; ++j) {
            pairwise[i][j] = matrix[i + 1][j + 1];
        }
    }

    MaskSelection selection;
    for (const auto& step : mmr_rank(relevance, pairwise, cfg.alpha, static_cast<std::size_t>(cfg.max_masks))) {
        selection.ordered_spans.push_back(candidates[step.index]);
        selection.selection_scores.push_back(step.score);
    }
    return selection;
}

// ---------------------------------------------------------------------------

namespace {

// Replaces each (non-overlapping, sorted) span with the mask token.
std::string apply_masks(std::string_view text, std::span<const SpanCandidate> spans) {
    std::string out;
    std::size_t pos = 0;
    for (const auto& span : spans) {
        out.append(text.substr(pos, span.char_start - pos));
        out.append(kMaskToken);
        pos = span.char_end;
    }
    out.append(text.substr(pos));
    return out;
}

SpanCandidate token_span(const TokenSpan& t) {
    return {t.surface, t.start, t.end, SpanSource::Heuristic};
}

}  // namespace

std::vector<MaskedClaim> mask_spans(const Claim& claim, std::span<const SpanCandidate> spans,
                                    MaskStrategy strategy) {
    if (spans.empty()) {
        fail(ErrorCode::NothingToMask, "claim '" + claim.id + "': no spans to mask");
    }
    std::vector<MaskedClaim> out;
    out.reserve(spans.size());
    int rank = 1;
    for (const auto& span : spans) {
        MaskedClaim masked;
        masked.claim_id = claim.id;
        masked.masked_text = apply_masks(claim.text, std::span(&span, 1));
        masked.masked_spans = {span};
        masked.strategy = strategy;
        masked.rank = rank++;
        out.push_back(std::move(masked));
    }
    return out;
}

MaskedClaim mask_absent_tokens(const Claim& claim, const EvidenceSet& evidence) {
    std::unordered_set<std::string> evidence_tokens;
    for (const auto& item : evidence.items) {
        for (auto& tok : tokenize(item.text)) {
            evidence_tokens.insert(std::move(tok));
        }
    }
    std::vector<SpanCandidate> absent;
    for (const auto& tok : tokenize_with_offsets(claim.text)) {
        if (!evidence_tokens.contains(to_lower_ascii(tok.surface))) {
            absent.push_back(token_span(tok));
        }
    }
    if (absent.empty()) {
        fail(ErrorCode::NothingToMask, "claim '" + claim.id + "': every token occurs in the evidence");
    }
    MaskedClaim masked;
    masked.claim_id = claim.id;
    masked.masked_text = apply_masks(claim.text, absent);
    masked.masked_spans = std::move(absent);
    masked.strategy = MaskStrategy::Heuristic;
    return masked;
}

std::size_t random_mask_count(std::size_t n_tokens, double ratio) {
    if (n_tokens == 0) {
        return 0;
    }
    // The epsilon keeps 0.1 * 30 = 3.0000000000000004 from rounding up to 4.
    const auto raw = std::ceil(ratio * static_cast<double>(n_tokens) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n_tokens);
}

MaskedClaim mask_random_tokens(const Claim& claim, double ratio, std::uint64_t seed) {
    const auto tokens = tokenize_with_offsets(claim.text);
    if (tokens.empty()) {
        fail(ErrorCode::NothingToMask, "claim '" + claim.id + "' has no tokens");
    }
    const auto count = random_mask_count(tokens.size(), ratio);
    // Partial Fisher-Yates on raw engine output; std::uniform_int_distribution
    // is not specified bit-exactly across standard libraries.
    std::mt19937_64 rng(seed ^ fnv1a64(claim.id));
    std::vector<std::size_t> positions(tokens.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        positions[i] = i;
    }
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng() % (positions.size() - i));
        std::swap(positions[i], positions[j]);
    }
    positions.resize(count);
    std::sort(positions.begin(), positions.end());

    std::vector<SpanCandidate> spans;
    for (const auto p : positions) {
        spans.push_back(token_span(tokens[p]));
    }
    MaskedClaim masked;
    masked.claim_id = claim.id;
    masked.masked_text = apply_masks(claim.text, spans);
    masked.masked_spans = std::move(spans);
    masked.strategy = MaskStrategy::Random;
    return masked;
}

std::vector<MaskedClaim> build_masked_claims(const Claim& claim, const MaskingConfig& cfg,
                                             std::span<const SpanCandidate> spans,
                                             const EvidenceSet* evidence) {
    switch (cfg.strategy) {
        case MaskStrategy::Diversity:
        case MaskStrategy::Entity: {
            const auto n = std::min(spans.size(), static_cast<std::size_t>(cfg.max_masks));
            return mask_spans(claim, spans.first(n), cfg.strategy);
        }
        case MaskStrategy::Heuristic:
            if (evidence == nullptr) {
                fail(ErrorCode::MissingEvidence, "heuristic masking needs evidence");
            }
            return {mask_absent_tokens(claim, *evidence)};
        case MaskStrategy::Random:
            return {mask_random_tokens(claim, cfg.rm_mask_ratio, cfg.seed)};
    }
    return {};
}

}  // namespace factfix
