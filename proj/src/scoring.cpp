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

#include "factfix/scoring.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "factfix/backends.hpp"
#include "factfix/error.hpp"
#include "factfix/stub.hpp"
#include "factfix/text.hpp"

namespace factfix {

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    // Two-row DP over b.
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge_l_tokens(std::span<const std::string> reference, std::span<const std::string> candidate) {
    if (reference.empty() && candidate.empty()) {
        return 1.0;
    }
    if (reference.empty() || candidate.empty()) {
        return 0.0;
    }
    const auto l = static_cast<double>(lcs_length(reference, candidate));
    if (l == 0.0) {
        return 0.0;
    }
    const double p = l / static_cast<double>(candidate.size());
    const double r = l / static_cast<double>(reference.size());
    return 2.0 * p * r / (p + r);
}

double rouge_l(std::string_view reference, std::string_view candidate) {
    const auto ref = tokenize(reference);
    const auto cand = tokenize(candidate);
    return rouge_l_tokens(ref, cand);
}

std::string evidence_premise(const EvidenceSet& evidence) {
    std::string premise;
    for (std::size_t i = 0; i < evidence.items.size(); ++i) {
        if (i > 0) {
            premise += '\n';
        }
        premise += evidence.items[i].text;
    }
    return premise;
}

double clamp_entailment(double raw) {
    if (std::isnan(raw)) {
        spdlog::warn("entailment service returned NaN, using 0");
        return 0.0;
    }
    if (raw < 0.0 || raw > 1.0) {
        const double clamped = std::clamp(raw, 0.0, 1.0);
        spdlog::warn("entailment {} outside [0, 1], clamped to {}", raw, clamped);
        return clamped;
    }
    return raw;
}

double entailment(const std::string& premise, const std::string& hypothesis, ModelClient* client,
                  const ScoringConfig& cfg) {
    if (cfg.entailment_backend == EntailmentBackend::Stub) {
        return stub::entail(premise, hypothesis);
    }
    if (client == nullptr) {
        fail(ErrorCode::EntailmentServiceUnavailable, "no entailment client configured");
    }
    return clamp_entailment(client->entail(premise, hypothesis));
}

double combine(double lambda, double entailment, double rouge_l) noexcept {
    return lambda * entailment + (1.0 - lambda) * rouge_l;
}

std::size_t select_best(std::span<const CorrectionScore> scores) {
    if (scores.empty()) {
        fail(ErrorCode::NoCandidates, "no candidates to score");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        const auto& a = scores[i];
        const auto& b = scores[best];
        if (a.combined != b.combined) {
            if (a.combined > b.combined) {
                best = i;
            }
        } else if (a.entailment != b.entailment) {
            if (a.entailment > b.entailment) {
                best = i;
            }
        } else if (a.rouge_l > b.rouge_l) {
            best = i;
        }
    }
    return best;
}

Selection score_and_select(const Claim& claim, std::span<const CandidateCorrection> candidates,
                           const EvidenceSet& evidence, const ScoringConfig& cfg, ModelClient* client) {
    if (candidates.empty()) {
        fail(ErrorCode::NoCandidates, "claim " + claim.id + ": no candidates to score");
    }
    const auto premise = evidence_premise(evidence);
    const auto claim_tokens = tokenize(claim.text);
    Selection out;
    out.all.reserve(candidates.size());
    for (const auto& c : candidates) {
        CorrectionScore s;
        s.candidate = c;
        s.entailment = entailment(premise, c.text, client, cfg);
        s.rouge_l = rouge_l_tokens(claim_tokens, tokenize(c.text));
        s.combined = combine(cfg.lambda, s.entailment, s.rouge_l);
        out.all.push_back(std::move(s));
    }
    out.winner_index = select_best(out.all);
    out.winner = out.all[out.winner_index].candidate;
    return out;
}

}  // namespace factfix
