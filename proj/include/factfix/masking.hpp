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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factfix/config.hpp"
#include "factfix/types.hpp"

namespace factfix {

class ModelClient;

// ---------------------------------------------------------------------------
// Span extraction
// ---------------------------------------------------------------------------

class SpanProvider {
public:
    virtual ~SpanProvider() = default;
    virtual std::vector<SpanCandidate> spans(const Claim& claim) = 0;
};

/// Rule-based extraction, no model needed:
///   (a) maximal runs of capitalized tokens; a sentence-initial stopword
///       ("The") is dropped from the front of its run,
///   (b) runs of numeric tokens and month names,
///   (c) text inside double quotes,
///   (d) maximal runs of non-stopword tokens.
/// Runs (a), (b) and (d) never cross punctuation between tokens.
std::vector<SpanCandidate> heuristic_spans(std::string_view text);

class HeuristicSpanProvider final : public SpanProvider {
public:
    std::vector<SpanCandidate> spans(const Claim& claim) override { return heuristic_spans(claim.text); }
};

/// Delegates to the /spans endpoint. Offsets that do not address their
/// surface (e.g. code-point offsets on non-ASCII text) are re-anchored by
/// searching for the surface; spans that cannot be found are dropped.
class ExternalSpanProvider final : public SpanProvider {
public:
    explicit ExternalSpanProvider(ModelClient& client) : client_(client) {}
    std::vector<SpanCandidate> spans(const Claim& claim) override;

private:
    ModelClient& client_;
};

/// Validated, deduplicated on (char_start, char_end), sorted by
/// (char_start, surface). Throws EmptyClaim.
std::vector<SpanCandidate> extract_spans(const Claim& claim, SpanProvider& provider);

// ---------------------------------------------------------------------------
// Similarity
// ---------------------------------------------------------------------------

class SimilarityModel {
public:
    virtual ~SimilarityModel() = default;
    /// Symmetric matrix with a maximal diagonal.
    virtual std::vector<std::vector<double>> similarity_matrix(std::span<const std::string> texts) = 0;
};

/// Cosine over character-trigram TF-IDF vectors fitted on the given texts.
/// Texts are lowercased and padded with one space on each side; idf is
/// ln((1 + N) / (1 + df)) + 1.
class CharNgramTfidfSimilarity final : public SimilarityModel {
public:
    std::vector<std::vector<double>> similarity_matrix(std::span<const std::string> texts) override;
};

/// Cosine over /embed vectors.
class EmbeddingSimilarity final : public SimilarityModel {
public:
    explicit EmbeddingSimilarity(ModelClient& client) : client_(client) {}
    std::vector<std::vector<double>> similarity_matrix(std::span<const std::string> texts) override;

private:
    ModelClient& client_;
};

// ---------------------------------------------------------------------------
// Diversity-aware selection
// ---------------------------------------------------------------------------

struct MmrStep {
    std::size_t index;
    double score;
};

/// Greedy maximal-marginal-relevance ranking over precomputed similarities.
///
/// At each step the unselected item v maximizing
///     alpha * relevance[v] - (1 - alpha) * max_{s selected} pairwise[v][s]
/// is taken; the max over an empty selection is 0. Ties go to the lower index.
/// Stops after min(m, relevance.size()) steps.
std::vector<MmrStep> mmr_rank(std::span<const double> relevance,
                              const std::vector<std::vector<double>>& pairwise, double alpha,
                              std::size_t m);

struct MaskSelection {
    std::vector<SpanCandidate> ordered_spans;
    std::vector<double> selection_scores;
};

/// Relevance is similarity to the claim text, redundancy is span-to-span
/// similarity. Candidates are first put in (char_start, surface) order so
/// mmr_rank's index tie-break realizes the offset/lexicographic tie-break.
/// Throws NoCandidates.
MaskSelection mmr_select(const Claim& claim, std::vector<SpanCandidate> candidates,
                         const MaskingConfig& cfg, SimilarityModel& sim);

// ---------------------------------------------------------------------------
// Masked variants
// ---------------------------------------------------------------------------

/// One variant per span, in order, ranks 1..n. Throws NothingToMask on an empty list.
std::vector<MaskedClaim> mask_spans(const Claim& claim, std::span<const SpanCandidate> spans,
                                    MaskStrategy strategy);

/// Single variant masking every claim token absent from the evidence tokens.
/// Throws NothingToMask when every token is covered.
MaskedClaim mask_absent_tokens(const Claim& claim, const EvidenceSet& evidence);

/// Single variant masking ceil(ratio * n) token positions drawn uniformly
/// without replacement from an mt19937_64 seeded with seed ^ fnv1a64(claim.id).
MaskedClaim mask_random_tokens(const Claim& claim, double ratio, std::uint64_t seed);

/// Number of positions mask_random_tokens masks for n tokens.
std::size_t random_mask_count(std::size_t n_tokens, double ratio);

/// Strategy dispatch. DM/EM take `spans` (at most cfg.max_masks are used),
/// HM needs `evidence` (MissingEvidence otherwise), RM uses cfg.rm_mask_ratio and cfg.seed.
std::vector<MaskedClaim> build_masked_claims(const Claim& claim, const MaskingConfig& cfg,
                                             std::span<const SpanCandidate> spans,
                                             const EvidenceSet* evidence);

}  // namespace factfix
