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

// Domain types passed between pipeline stages. All of them are plain values;
// once built they are only read, so sharing them across workers is safe.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factfix/error.hpp"

namespace factfix {

inline constexpr std::string_view kMaskToken = "[MASK]";

enum class Label { Supported, Refuted, Unknown };

std::string_view to_string(Label label) noexcept;
std::optional<Label> parse_label(std::string_view text);

struct Claim {
    std::string id;
    std::string text;
    std::optional<std::string> gold_correction;
    std::optional<std::vector<std::string>> gold_evidence;
    std::optional<Label> label;

    /// Throws EmptyClaim when text is blank.
    void validate() const;
};

enum class SpanSource { Ner, Phrase, Heuristic, External };

std::string_view to_string(SpanSource source) noexcept;

struct SpanCandidate {
    std::string surface;
    std::size_t char_start = 0;  // byte offset into Claim::text
    std::size_t char_end = 0;
    SpanSource source = SpanSource::Heuristic;

    friend bool operator==(const SpanCandidate&, const SpanCandidate&) = default;
};

/// RM random tokens, HM tokens absent from evidence, EM extracted entities, DM MMR-diversified entities.
enum class MaskStrategy { Random, Heuristic, Entity, Diversity };

std::string_view to_string(MaskStrategy strategy) noexcept;
std::optional<MaskStrategy> parse_mask_strategy(std::string_view text);

struct MaskedClaim {
    std::string claim_id;
    std::string masked_text;
    // One entry per "[MASK]" in masked_text, in left-to-right order.
    std::vector<SpanCandidate> masked_spans;
    MaskStrategy strategy = MaskStrategy::Diversity;
    int rank = 1;

    const SpanCandidate& masked_span() const { return masked_spans.front(); }
};

/// Substitutes each "[MASK]" with the span it replaced.
std::string unmask(const MaskedClaim& masked);

enum class RetrieverKind { Bm25, Rm3, Dense, Rerank };

std::string_view to_string(RetrieverKind kind) noexcept;
std::optional<RetrieverKind> parse_retriever_kind(std::string_view text);

struct EvidenceItem {
    std::string doc_id;
    std::string text;
    double score = 0.0;
};

struct EvidenceSet {
    std::string claim_id;
    std::string retriever;  // configured retriever name
    RetrieverKind kind = RetrieverKind::Bm25;
    std::vector<EvidenceItem> items;

    bool empty() const noexcept { return items.empty(); }
};

enum class Mode { ZeroShot, Rag, M2C, M2CWithVerify, M2CPlus };

std::string_view to_string(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view text);

struct CandidateCorrection {
    std::string claim_id;
    std::string text;
    std::optional<MaskedClaim> source_mask;
    std::string retriever;
    std::string raw_generation;
    bool fallback = false;  // generation was unusable and the input claim was kept
};

}  // namespace factfix
