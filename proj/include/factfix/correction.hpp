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

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "factfix/config.hpp"
#include "factfix/types.hpp"

namespace factfix {

class ModelClient;

namespace prompt {
inline constexpr std::string_view kInputClaim = "Input Claim:";
inline constexpr std::string_view kMaskedClaim = "Masked Claim:";
inline constexpr std::string_view kOutputCorrection = "Output Correction:";
inline constexpr std::string_view kEvidence = "Evidence:";
inline constexpr std::string_view kNoEvidence = "Evidence: (none)";
inline constexpr std::string_view kVerifyInstruction =
    "Answer with exactly one word: SUPPORTED or REFUTED.";
}  // namespace prompt

struct PromptBundle {
    std::string system_instructions;
    std::string evidence_block;  // empty for ZERO_SHOT
    std::string test_block;
    Mode mode = Mode::M2C;

    /// Blocks joined by blank lines.
    std::string render() const;
};

/// ZERO_SHOT needs nothing, RAG needs evidence, the M2C modes need both a
/// masked claim and evidence (MissingMask / MissingEvidence otherwise).
/// M2C_PLUS and M2C_WITH_VERIFY use the M2C template.
PromptBundle build_prompt(const Claim& claim, const MaskedClaim* masked, const EvidenceSet* evidence,
                          Mode mode);

/// "Evidence:" followed by "[i.] text" lines, or "Evidence: (none)".
std::string render_evidence(const EvidenceSet& evidence);

/// Text after the last "Output Correction:" (else the first non-empty line),
/// whitespace collapsed, one pair of enclosing quotes removed.
std::string parse_generation(std::string_view raw);

/// Calls /generate and parses the completion. An empty answer or one that still
/// contains "[MASK]" is retried once with a reminder appended to the
/// instructions; if that also fails the input claim is returned with
/// fallback=true. Throws GenerationServiceUnavailable.
CandidateCorrection generate_correction(const Claim& claim, const PromptBundle& bundle, ModelClient& client,
                                        const GenerationParams& params,
                                        const std::optional<MaskedClaim>& source_mask = std::nullopt,
                                        const std::string& retriever = {});

enum class Verdict { Correct, Incorrect };

std::string build_verification_prompt(const Claim& claim, const EvidenceSet& evidence);

/// Only an affirmative first word (SUPPORTED, CORRECT, TRUE, YES) counts as
/// Correct. Anything else, including an unreachable service, is Incorrect.
Verdict verify_claim(const Claim& claim, const EvidenceSet& evidence, ModelClient& client,
                     const GenerationParams& params);

Verdict parse_verdict(std::string_view answer);

}  // namespace factfix
