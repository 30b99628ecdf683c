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

// Per-claim orchestration of the five modes.
//
//   ZERO_SHOT        generate from the claim alone
//   RAG              generate from the claim and the primary retriever's evidence
//   M2C              mask, generate one candidate per masked variant, score
//                    them together with the unedited claim, keep the best
//   M2C_WITH_VERIFY  M2C behind a verification gate; a CORRECT verdict
//                    returns the claim unchanged
//   M2C_PLUS         M2C once per ensemble member, then majority vote
//
// Span selection for DM/EM/RM depends only on the claim, so it is computed
// once per claim and shared by every retriever. HM masks per evidence set.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "factfix/config.hpp"
#include "factfix/ensemble.hpp"
#include "factfix/masking.hpp"
#include "factfix/retrieval.hpp"
#include "factfix/scoring.hpp"
#include "factfix/types.hpp"

namespace factfix {

class ModelClient;

struct RetrieverOutcome {
    std::string retriever;
    RetrieverKind kind = RetrieverKind::Bm25;
    EvidenceSet evidence;
    std::vector<CorrectionScore> scores;  // index 0 is the unedited claim in M2C modes
    std::size_t winner_index = 0;
    std::optional<std::string> error;     // "<ErrorCode>: message" when this retriever failed

    bool ok() const noexcept { return !error.has_value(); }
    const CorrectionScore& winner() const { return scores.at(winner_index); }
    nlohmann::json to_json() const;
};

struct ClaimResult {
    std::string claim_id;
    std::string input;
    std::string final_text;
    Mode mode = Mode::M2CPlus;
    std::vector<SpanCandidate> selected_spans;
    std::vector<RetrieverOutcome> per_retriever;
    std::optional<CandidateCorrection> direct;  // ZERO_SHOT and RAG output
    std::optional<EnsembleDecision> decision;
    std::optional<bool> verified_correct;       // M2C_WITH_VERIFY only
    std::optional<std::string> error;

    std::size_t fallbacks() const;
    std::size_t backend_failures() const;
    bool changed() const;
    nlohmann::json to_json() const;
};

class Pipeline {
public:
    /// The client may be null only for modes and configs that never call a model.
    Pipeline(PipelineConfig cfg, std::shared_ptr<ModelClient> client, const InvertedIndex* index,
             const EmbeddingStore* embeddings);

    /// Never throws for per-claim failures; they land in ClaimResult::error.
    ClaimResult run(const Claim& claim) const;

    const PipelineConfig& config() const noexcept { return cfg_; }

private:
    struct Masks {
        std::vector<SpanCandidate> spans;        // DM/EM ordering
        std::optional<std::vector<MaskedClaim>> shared;  // unset for HM
    };

    Masks prepare_masks(const Claim& claim) const;
    std::vector<MaskedClaim> masks_for(const Claim& claim, const Masks& masks, const EvidenceSet& evidence) const;
    RetrieverOutcome correct_with(const Claim& claim, const RetrieverSpec& spec, const Masks& masks) const;
    EvidenceSet retrieve(const Claim& claim, const RetrieverSpec& spec) const;
    ClaimResult run_unchecked(const Claim& claim) const;

    PipelineConfig cfg_;
    std::shared_ptr<ModelClient> client_;
    const InvertedIndex* index_;
    const EmbeddingStore* embeddings_;
};

/// Convenience entry point for the ensemble mode. Throws AllBackendsFailed.
EnsembleDecision run_m2c_plus(const Claim& claim, const Pipeline& pipeline);

}  // namespace factfix
