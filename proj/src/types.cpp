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

#include "factfix/types.hpp"

#include <array>
#include <utility>

#include "factfix/error.hpp"
#include "factfix/text.hpp"

namespace factfix {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<std::string_view, Enum>, N>& table,
                           std::string_view text) {
    const auto key = to_lower_ascii(text);
    for (const auto& [name, value] : table) {
        if (to_lower_ascii(name) == key) {
            return value;
        }
    }
    return std::nullopt;
}

constexpr std::array<std::pair<std::string_view, Label>, 3> kLabels = {{
    {"SUPPORTED", Label::Supported},
    {"REFUTED", Label::Refuted},
    {"UNKNOWN", Label::Unknown},
}};

constexpr std::array<std::pair<std::string_view, MaskStrategy>, 4> kStrategies = {{
    {"RM", MaskStrategy::Random},
    {"HM", MaskStrategy::Heuristic},
    {"EM", MaskStrategy::Entity},
    {"DM", MaskStrategy::Diversity},
}};

constexpr std::array<std::pair<std::string_view, RetrieverKind>, 4> kKinds = {{
    {"BM25", RetrieverKind::Bm25},
    {"RM3", RetrieverKind::Rm3},
    {"DENSE", RetrieverKind::Dense},
    {"RERANK", RetrieverKind::Rerank},
}};

constexpr std::array<std::pair<std::string_view, Mode>, 5> kModes = {{
    {"ZERO_SHOT", Mode::ZeroShot},
    {"RAG", Mode::Rag},
    {"M2C", Mode::M2C},
    {"M2C_WITH_VERIFY", Mode::M2CWithVerify},
    {"M2C_PLUS", Mode::M2CPlus},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, Enum>, N>& table,
                         Enum value) noexcept {
    for (const auto& [name, v] : table) {
        if (v == value) {
            return name;
        }
    }
    return "?";
}

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::EmptyClaim: return "EmptyClaim";
        case ErrorCode::SpanProviderUnavailable: return "SpanProviderUnavailable";
        case ErrorCode::NoCandidates: return "NoCandidates";
        case ErrorCode::MissingEvidence: return "MissingEvidence";
        case ErrorCode::MissingMask: return "MissingMask";
        case ErrorCode::NothingToMask: return "NothingToMask";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::DuplicateDocId: return "DuplicateDocId";
        case ErrorCode::CorpusNotFound: return "CorpusNotFound";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::IndexNotLoaded: return "IndexNotLoaded";
        case ErrorCode::IndexCorrupt: return "IndexCorrupt";
        case ErrorCode::EmbeddingServiceUnavailable: return "EmbeddingServiceUnavailable";
        case ErrorCode::RerankServiceUnavailable: return "RerankServiceUnavailable";
        case ErrorCode::EntailmentServiceUnavailable: return "EntailmentServiceUnavailable";
        case ErrorCode::GenerationServiceUnavailable: return "GenerationServiceUnavailable";
        case ErrorCode::ServiceUnavailable: return "ServiceUnavailable";
        case ErrorCode::MalformedResponse: return "MalformedResponse";
        case ErrorCode::MalformedScores: return "MalformedScores";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyReferenceSet: return "EmptyReferenceSet";
        case ErrorCode::NoWinners: return "NoWinners";
        case ErrorCode::AllBackendsFailed: return "AllBackendsFailed";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

std::string_view to_string(Label label) noexcept { return name_of(kLabels, label); }
std::optional<Label> parse_label(std::string_view text) { return lookup(kLabels, text); }

std::string_view to_string(SpanSource source) noexcept {
    switch (source) {
        case SpanSource::Ner: return "NER";
        case SpanSource::Phrase: return "PHRASE";
        case SpanSource::Heuristic: return "HEURISTIC";
        case SpanSource::External: return "EXTERNAL";
    }
    return "?";
}

std::string_view to_string(MaskStrategy strategy) noexcept { return name_of(kStrategies, strategy); }
std::optional<MaskStrategy> parse_mask_strategy(std::string_view text) {
    return lookup(kStrategies, text);
}

std::string_view to_string(RetrieverKind kind) noexcept { return name_of(kKinds, kind); }
std::optional<RetrieverKind> parse_retriever_kind(std::string_view text) {
    return lookup(kKinds, text);
}

std::string_view to_string(Mode mode) noexcept { return name_of(kModes, mode); }
std::optional<Mode> parse_mode(std::string_view text) { return lookup(kModes, text); }

void Claim::validate() const {
    if (trim(text).empty()) {
        fail(ErrorCode::EmptyClaim, "claim '" + id + "' has empty text");
    }
}

std::string unmask(const MaskedClaim& masked) {
    std::string out;
    out.reserve(masked.masked_text.size());
    std::size_t pos = 0;
    std::size_t next_span = 0;
    while (true) {
        const auto hit = masked.masked_text.find(kMaskToken, pos);
        if (hit == std::string::npos) {
            break;
        }
        if (next_span >= masked.masked_spans.size()) {
            fail(ErrorCode::InvalidArgument, "masked claim has more [MASK] tokens than spans");
        }
        out.append(masked.masked_text, pos, hit - pos);
        out += masked.masked_spans[next_span++].surface;
        pos = hit + kMaskToken.size();
    }
    out.append(masked.masked_text, pos, std::string::npos);
    return out;
}

}  // namespace factfix
