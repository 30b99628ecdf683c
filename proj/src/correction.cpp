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

#include "factfix/correction.hpp"

#include <array>

#include <spdlog/spdlog.h>

#include "factfix/backends.hpp"
#include "factfix/error.hpp"
#include "factfix/text.hpp"

namespace factfix {

namespace {

constexpr std::string_view kRagInstructions =
    "Given a claim and related evidence, your task is to correct it if the claim is not supported by "
    "the given evidence. If the input claim is correct, do not edit it and give the input claim as "
    "output. Your output claim should be faithful to the evidence and should not deviate much from the "
    "input claim. Do not print anything else in the output except the corrected claim. Strictly follow "
    "the syntax given below for output syntax:\n"
    "Input Claim: [sentence]\n"
    "Evidence: [document]\n"
    "Output Correction: [sentence]";

// The evidence-free variant of the RAG template.
constexpr std::string_view kZeroShotInstructions =
    "Given a claim, your task is to correct it if the claim is not factually accurate. If the input "
    "claim is correct, do not edit it and give the input claim as output. Your output claim should not "
    "deviate much from the input claim. Do not print anything else in the output except the corrected "
    "claim. Strictly follow the syntax given below for output syntax:\n"
    "Input Claim: [sentence]\n"
    "Output Correction: [sentence]";

constexpr std::string_view kMaskInstructions =
    "Your task is to correct a claim by filling in the [MASK] using the provided input evidence, "
    "ensuring that the corrected claim is supported by the evidence and only differs from the input "
    "claim in the masked positions. If the input claim is correct, do not edit it and give the input "
    "claim as output. Your output claim should be faithful to the provided evidence and should not "
    "deviate much from the input claim.\n"
    "Please use the most relevant evidence to correct the claim. The corrected claim shouldn't contain "
    "any [MASK].\n"
    "\n"
    "Input Claim: [sentence]\n"
    "Evidence: [document]\n"
    "Masked Claim: [masked sentence]\n"
    "Output Correction: [sentence]";

constexpr std::string_view kVerifyInstructions =
    "Given a claim and related evidence, decide whether the claim is supported by the evidence.";

constexpr std::string_view kRetryReminder =
    "Your previous answer still contained [MASK]. Replace every [MASK] with words taken from the "
    "evidence and output only the corrected claim.";

std::string single_line(std::string_view text) { return collapse_whitespace(text); }

}  // namespace

std::string PromptBundle::render() const {
    std::string out = system_instructions;
    if (!evidence_block.empty()) {
        out += "\n\n";
        out += evidence_block;
    }
    out += "\n\n";
    out += test_block;
    return out;
}

std::string render_evidence(const EvidenceSet& evidence) {
    if (evidence.items.empty()) {
        return std::string(prompt::kNoEvidence);
    }
    std::string out(prompt::kEvidence);
    for (std::size_t i = 0; i < evidence.items.size(); ++i) {
        out += "\n[" + std::to_string(i + 1) + ".] " + single_line(evidence.items[i].text);
    }
    return out;
}

PromptBundle build_prompt(const Claim& claim, const MaskedClaim* masked, const EvidenceSet* evidence, Mode mode) {
    PromptBundle bundle;
    bundle.mode = mode;
    const std::string input_line = std::string(prompt::kInputClaim) + " " + single_line(claim.text);
    const std::string output_line(prompt::kOutputCorrection);

    if (mode == Mode::ZeroShot) {
        bundle.system_instructions = kZeroShotInstructions;
        bundle.test_block = input_line + "\n" + output_line;
        return bundle;
    }
    if (evidence == nullptr) {
        fail(ErrorCode::MissingEvidence, "mode " + std::string(to_string(mode)) + " needs evidence");
    }
    bundle.evidence_block = render_evidence(*evidence);
    if (mode == Mode::Rag) {
        bundle.system_instructions = kRagInstructions;
        bundle.test_block = input_line + "\n" + output_line;
        return bundle;
    }
    if (masked == nullptr) {
        fail(ErrorCode::MissingMask, "mode " + std::string(to_string(mode)) + " needs a masked claim");
    }
    bundle.system_instructions = kMaskInstructions;
    bundle.test_block = input_line + "\n" + std::string(prompt::kMaskedClaim) + " " +
                        single_line(masked->masked_text) + "\n" + output_line;
    return bundle;
}

std::string parse_generation(std::string_view raw) {
    std::string_view body;
    if (const auto at = raw.rfind(prompt::kOutputCorrection); at != std::string_view::npos) {
        body = raw.substr(at + prompt::kOutputCorrection.size());
    } else {
        std::size_t pos = 0;
        while (pos <= raw.size()) {
            const auto nl = raw.find('\n', pos);
            const auto line = raw.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            if (!trim(line).empty()) {
                body = line;
                break;
            }
            if (nl == std::string_view::npos) {
                break;
            }
            pos = nl + 1;
        }
    }
    std::string text = collapse_whitespace(body);
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 5> kQuotes = {{
        {"\"", "\""},
        {"'", "'"},
        {"`", "`"},
        {"\xE2\x80\x9C", "\xE2\x80\x9D"},
        {"\xE2\x80\x98", "\xE2\x80\x99"},
    }};
    for (const auto& [open, close] : kQuotes) {
        if (text.size() >= open.size() + close.size() && text.starts_with(open) && text.ends_with(close)) {
            text = std::string(trim(std::string_view(text).substr(open.size(), text.size() - open.size() - close.size())));
            break;
        }
    }
    return text;
}

CandidateCorrection generate_correction(const Claim& claim, const PromptBundle& bundle, ModelClient& client,
                                        const GenerationParams& params,
                                        const std::optional<MaskedClaim>& source_mask,
                                        const std::string& retriever) {
    CandidateCorrection candidate;
    candidate.claim_id = claim.id;
    candidate.source_mask = source_mask;
    candidate.retriever = retriever;

    const auto usable = [](const std::string& text) {
        return !text.empty() && text.find(kMaskToken) == std::string::npos;
    };

    candidate.raw_generation = client.generate(bundle.render(), params);
    candidate.text = parse_generation(candidate.raw_generation);
    if (usable(candidate.text)) {
        return candidate;
    }

    PromptBundle retry = bundle;
    retry.system_instructions += "\n" + std::string(kRetryReminder);
    candidate.raw_generation = client.generate(retry.render(), params);
    candidate.text = parse_generation(candidate.raw_generation);
    if (usable(candidate.text)) {
        return candidate;
    }

    spdlog::warn("claim {}: generation unusable after retry, keeping the input claim", claim.id);
    candidate.text = single_line(claim.text);
    candidate.fallback = true;
    return candidate;
}

std::string build_verification_prompt(const Claim& claim, const EvidenceSet& evidence) {
    return std::string(kVerifyInstructions) + " " + std::string(prompt::kVerifyInstruction) + "\n\n" +
           render_evidence(evidence) + "\n\n" + std::string(prompt::kInputClaim) + " " + single_line(claim.text) +
           "\nAnswer:";
}

Verdict parse_verdict(std::string_view answer) {
    const auto tokens = tokenize(answer);
    if (tokens.empty()) {
        return Verdict::Incorrect;
    }
    const auto& first = tokens.front();
    if (first == "supported" || first == "correct" || first == "true" || first == "yes") {
        return Verdict::Correct;
    }
    return Verdict::Incorrect;
}

Verdict verify_claim(const Claim& claim, const EvidenceSet& evidence, ModelClient& client,
                     const GenerationParams& params) {
    try {
        return parse_verdict(client.generate(build_verification_prompt(claim, evidence), params));
    } catch (const Error& e) {
        spdlog::warn("claim {}: verification failed ({}), proceeding to correction", claim.id, e.what());
        return Verdict::Incorrect;
    }
}

}  // namespace factfix
