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

// Candidate scoring: F = lambda * entailment + (1 - lambda) * ROUGE-L, where
// entailment is P(evidence entails candidate) and ROUGE-L compares the
// candidate with the input claim.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factfix/config.hpp"
#include "factfix/types.hpp"

namespace factfix {

class ModelClient;

/// LCS length of two token sequences.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// LCS F1 over token sequences: P = L/|candidate|, R = L/|reference|.
/// Both empty -> 1, exactly one empty -> 0.
double rouge_l_tokens(std::span<const std::string> reference, std::span<const std::string> candidate);

double rouge_l(std::string_view reference, std::string_view candidate);

/// Evidence texts joined by newlines.
std::string evidence_premise(const EvidenceSet& evidence);

/// Clamps the service value into [0, 1], logging a warning when it had to.
double clamp_entailment(double raw);

/// /entail through the client, or the stub rule in-process when cfg selects
/// STUB. Throws EntailmentServiceUnavailable.
double entailment(const std::string& premise, const std::string& hypothesis, ModelClient* client,
                  const ScoringConfig& cfg);

struct CorrectionScore {
    CandidateCorrection candidate;
    double entailment = 0.0;
    double rouge_l = 0.0;
    double combined = 0.0;
};

double combine(double lambda, double entailment, double rouge_l) noexcept;

/// Index of the best score: highest combined, then entailment, then
/// ROUGE-L, then the earliest position. Throws NoCandidates on empty input.
std::size_t select_best(std::span<const CorrectionScore> scores);

struct Selection {
    CandidateCorrection winner;
    std::size_t winner_index = 0;
    std::vector<CorrectionScore> all;
};

/// Scores every candidate against the evidence and the input claim. Callers
/// put the unedited claim first when it should be eligible.
Selection score_and_select(const Claim& claim, std::span<const CandidateCorrection> candidates,
                           const EvidenceSet& evidence, const ScoringConfig& cfg, ModelClient* client);

}  // namespace factfix
