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

#include "factfix/pipeline.hpp"

#include <spdlog/spdlog.h>

#include "factfix/backends.hpp"
#include "factfix/correction.hpp"
#include "factfix/error.hpp"
#include "factfix/text.hpp"

namespace factfix {

using nlohmann::json;

namespace {

constexpr std::size_t kMinVotes = 3;

std::string describe(const Error& e) { return std::string(e.name()) + ": " + e.what(); }

json span_json(const SpanCandidate& s) {
    return {{"surface", s.surface}, {"start", s.char_start}, {"end", s.char_end}, {"source", to_string(s.source)}};
}

json candidate_json(const CandidateCorrection& c) {
    json j = {{"text", c.text}, {"fallback", c.fallback}};
    if (c.source_mask) {
        j["masked_text"] = c.source_mask->masked_text;
        j["rank"] = c.source_mask->rank;
    } else {
        j["masked_text"] = nullptr;
    }
    return j;
}

CandidateCorrection unedited(const Claim& claim, const std::string& retriever) {
    CandidateCorrection c;
    c.claim_id = claim.id;
    c.text = collapse_whitespace(claim.text);
    c.retriever = retriever;
    return c;
}

}  // namespace

json RetrieverOutcome::to_json() const {
    json evidence_items = json::array();
    for (const auto& item : evidence.items) {
        evidence_items.push_back({{"doc_id", item.doc_id}, {"text", item.text}, {"score", item.score}});
    }
    json candidates = json::array();
    for (const auto& s : scores) {
        auto c = candidate_json(s.candidate);
        c["entailment"] = s.entailment;
        c["rouge_l"] = s.rouge_l;
        c["combined"] = s.combined;
        candidates.push_back(std::move(c));
    }
    json j = {{"retriever", retriever}, {"kind", to_string(kind)}, {"evidence", std::move(evidence_items)},
              {"candidates", std::move(candidates)}};
    if (ok() && !scores.empty()) {
        j["winner"] = winner().candidate.text;
        j["winner_index"] = winner_index;
        j["winner_score"] = winner().combined;
    }
    j["error"] = error ? json(*error) : json(nullptr);
    return j;
}

std::size_t ClaimResult::fallbacks() const {
    std::size_t n = direct && direct->fallback ? 1 : 0;
    for (const auto& r : per_retriever) {
        for (const auto& s : r.scores) {
            n += s.candidate.fallback ? 1 : 0;
        }
    }
    return n;
}

std::size_t ClaimResult::backend_failures() const {
    std::size_t n = 0;
    for (const auto& r : per_retriever) {
        n += r.ok() ? 0 : 1;
    }
    return n;
}

bool ClaimResult::changed() const { return normalize(final_text) != normalize(input); }

json ClaimResult::to_json() const {
    json retrievers = json::array();
    for (const auto& r : per_retriever) {
        retrievers.push_back(r.to_json());
    }
    json spans = json::array();
    for (const auto& s : selected_spans) {
        spans.push_back(span_json(s));
    }
    json scores = json::object();
    if (mode != Mode::M2CPlus && per_retriever.size() == 1 && per_retriever.front().ok() &&
        !per_retriever.front().scores.empty()) {
        const auto& w = per_retriever.front().winner();
        scores = {{"entailment", w.entailment}, {"rouge_l", w.rouge_l}, {"combined", w.combined}};
    } else if (decision) {
        for (const auto& g : decision->tally) {
            for (const auto& m : g.members) {
                scores[m.retriever] = m.score;
            }
        }
    }
    json j = {{"claim_id", claim_id},
              {"input", input},
              {"final_text", final_text},
              {"mode", to_string(mode)},
              {"selected_spans", std::move(spans)},
              {"per_retriever", std::move(retrievers)},
              {"scores", std::move(scores)}};
    if (direct) {
        j["raw_generation"] = direct->raw_generation;
        j["fallback"] = direct->fallback;
    }
    if (verified_correct) {
        j["verified_correct"] = *verified_correct;
    }
    if (decision) {
        j["decision"] = decision->to_json();
    }
    j["error"] = error ? json(*error) : json(nullptr);
    return j;
}

Pipeline::Pipeline(PipelineConfig cfg, std::shared_ptr<ModelClient> client, const InvertedIndex* index,
                   const EmbeddingStore* embeddings)
    : cfg_(std::move(cfg)), client_(std::move(client)), index_(index), embeddings_(embeddings) {
    cfg_.validate();
}

EvidenceSet Pipeline::retrieve(const Claim& claim, const RetrieverSpec& spec) const {
    return retrieve_evidence(claim, spec, {index_, embeddings_, client_.get()});
}

Pipeline::Masks Pipeline::prepare_masks(const Claim& claim) const {
    Masks masks;
    const auto& mc = cfg_.masking;
    if (mc.strategy == MaskStrategy::Heuristic) {
        return masks;
    }
    if (mc.strategy == MaskStrategy::Random) {
        try {
            masks.shared = build_masked_claims(claim, mc, {}, nullptr);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NothingToMask) {
                throw;
            }
            masks.shared.emplace();
        }
        return masks;
    }

    std::unique_ptr<SpanProvider> provider;
    if (mc.external_spans) {
        if (!client_) {
            fail(ErrorCode::SpanProviderUnavailable, "external spans requested without a model client");
        }
        provider = std::make_unique<ExternalSpanProvider>(*client_);
    } else {
        provider = std::make_unique<HeuristicSpanProvider>();
    }
    auto spans = extract_spans(claim, *provider);
    if (spans.empty()) {
        spdlog::info("claim {}: no maskable spans, keeping the claim as the only candidate", claim.id);
        masks.shared.emplace();
        return masks;
    }
    if (mc.strategy == MaskStrategy::Diversity) {
        std::unique_ptr<SimilarityModel> sim;
        if (mc.similarity == SimilarityProvider::EmbeddingClient && client_) {
            sim = std::make_unique<EmbeddingSimilarity>(*client_);
        } else {
            sim = std::make_unique<CharNgramTfidfSimilarity>();
        }
        spans = mmr_select(claim, std::move(spans), mc, *sim).ordered_spans;
    }
    masks.spans = spans;
    masks.shared = build_masked_claims(claim, mc, masks.spans, nullptr);
    return masks;
}

std::vector<MaskedClaim> Pipeline::masks_for(const Claim& claim, const Masks& masks,
                                             const EvidenceSet& evidence) const {
    if (masks.shared) {
        return *masks.shared;
    }
    try {
        return build_masked_claims(claim, cfg_.masking, {}, &evidence);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NothingToMask) {
            throw;
        }
        spdlog::info("claim {}: nothing to mask against {} evidence", claim.id, evidence.retriever);
        return {};
    }
}

RetrieverOutcome Pipeline::correct_with(const Claim& claim, const RetrieverSpec& spec, const Masks& masks) const {
    RetrieverOutcome out;
    out.retriever = spec.name;
    out.kind = spec.kind;
    try {
        out.evidence = retrieve(claim, spec);
        std::vector<CandidateCorrection> candidates{unedited(claim, spec.name)};
        for (const auto& masked : masks_for(claim, masks, out.evidence)) {
            const auto bundle = build_prompt(claim, &masked, &out.evidence, Mode::M2C);
            candidates.push_back(generate_correction(claim, bundle, *client_, cfg_.generation, masked, spec.name));
        }
        auto selection = score_and_select(claim, candidates, out.evidence, cfg_.scoring, client_.get());
        out.scores = std::move(selection.all);
        out.winner_index = selection.winner_index;
    } catch (const Error& e) {
        spdlog::warn("claim {}: retriever {} failed: {}", claim.id, spec.name, e.what());
        out.error = describe(e);
        out.scores.clear();
    }
    return out;
}

ClaimResult Pipeline::run(const Claim& claim) const {
    try {
        return run_unchecked(claim);
    } catch (const Error& e) {
        spdlog::warn("claim {}: {}", claim.id, e.what());
        ClaimResult r;
        r.claim_id = claim.id;
        r.input = claim.text;
        r.final_text = collapse_whitespace(claim.text);
        r.mode = cfg_.mode;
        r.error = describe(e);
        return r;
    }
}

ClaimResult Pipeline::run_unchecked(const Claim& claim) const {
    claim.validate();
    ClaimResult r;
    r.claim_id = claim.id;
    r.input = claim.text;
    r.mode = cfg_.mode;
    const auto needs_client = [&] {
        if (!client_) {
            fail(ErrorCode::InvalidConfig, "mode " + std::string(to_string(cfg_.mode)) + " needs a model client");
        }
    };

    switch (cfg_.mode) {
        case Mode::ZeroShot: {
            needs_client();
            const auto bundle = build_prompt(claim, nullptr, nullptr, Mode::ZeroShot);
            r.direct = generate_correction(claim, bundle, *client_, cfg_.generation);
            r.final_text = r.direct->text;
            return r;
        }
        case Mode::Rag: {
            needs_client();
            const auto& spec = cfg_.retrieval.find(cfg_.retrieval.primary);
            RetrieverOutcome outcome;
            outcome.retriever = spec.name;
            outcome.kind = spec.kind;
            outcome.evidence = retrieve(claim, spec);
            const auto bundle = build_prompt(claim, nullptr, &outcome.evidence, Mode::Rag);
            r.direct = generate_correction(claim, bundle, *client_, cfg_.generation, std::nullopt, spec.name);
            r.final_text = r.direct->text;
            r.per_retriever.push_back(std::move(outcome));
            return r;
        }
        case Mode::M2C:
        case Mode::M2CWithVerify: {
            needs_client();
            const auto& spec = cfg_.retrieval.find(cfg_.retrieval.primary);
            if (cfg_.mode == Mode::M2CWithVerify) {
                const auto evidence = retrieve(claim, spec);
                const bool correct = verify_claim(claim, evidence, *client_, cfg_.generation) == Verdict::Correct;
                r.verified_correct = correct;
                if (correct) {
                    RetrieverOutcome outcome;
                    outcome.retriever = spec.name;
                    outcome.kind = spec.kind;
                    outcome.evidence = evidence;
                    r.per_retriever.push_back(std::move(outcome));
                    r.final_text = collapse_whitespace(claim.text);
                    return r;
                }
            }
            const auto masks = prepare_masks(claim);
            r.selected_spans = masks.spans;
            auto outcome = correct_with(claim, spec, masks);
            if (!outcome.ok()) {
                r.per_retriever.push_back(std::move(outcome));
                r.error = r.per_retriever.back().error;
                r.final_text = collapse_whitespace(claim.text);
                return r;
            }
            r.final_text = outcome.winner().candidate.text;
            r.per_retriever.push_back(std::move(outcome));
            return r;
        }
        case Mode::M2CPlus: {
            needs_client();
            const auto masks = prepare_masks(claim);
            r.selected_spans = masks.spans;
            std::vector<Vote> votes;
            for (const auto& name : cfg_.ensemble.members) {
                auto outcome = correct_with(claim, cfg_.retrieval.find(name), masks);
                if (outcome.ok()) {
                    votes.push_back({name, outcome.winner().candidate, outcome.winner().combined});
                }
                r.per_retriever.push_back(std::move(outcome));
            }
            if (votes.empty()) {
                fail(ErrorCode::AllBackendsFailed, "claim " + claim.id + ": every retriever failed");
            }
            auto decision = majority_vote(claim.id, votes, cfg_.ensemble);
            if (votes.size() < kMinVotes) {
                std::vector<CorrectionScore> winners;
                for (const auto& outcome : r.per_retriever) {
                    if (outcome.ok()) {
                        winners.push_back(outcome.winner());
                    }
                }
                decision.final_text = winners[select_best(winners)].candidate.text;
                decision.tie_break_used = true;
                spdlog::warn("claim {}: only {} vote(s), using the best single winner", claim.id, votes.size());
            }
            r.final_text = decision.final_text;
            r.decision = std::move(decision);
            return r;
        }
    }
    return r;
}

EnsembleDecision run_m2c_plus(const Claim& claim, const Pipeline& pipeline) {
    auto cfg = pipeline.config();
    if (cfg.mode != Mode::M2CPlus) {
        fail(ErrorCode::InvalidConfig, "run_m2c_plus needs a pipeline in M2C_PLUS mode");
    }
    auto result = pipeline.run(claim);
    if (!result.decision) {
        fail(ErrorCode::AllBackendsFailed, result.error.value_or("claim " + claim.id + ": no decision"));
    }
    return *result.decision;
}

}  // namespace factfix
