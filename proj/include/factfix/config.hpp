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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "factfix/types.hpp"

namespace factfix {

enum class SimilarityProvider { EmbeddingClient, CharNgramTfidf };

struct MaskingConfig {
    MaskStrategy strategy = MaskStrategy::Diversity;
    double alpha = 0.3;
    int max_masks = 10;
    double rm_mask_ratio = 0.15;
    SimilarityProvider similarity = SimilarityProvider::EmbeddingClient;
    bool external_spans = false;  // ask the /spans endpoint instead of the built-in heuristics
    std::uint64_t seed = 7;

    void validate() const;
};

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

struct Rm3Params {
    int fb_docs = 10;
    int fb_terms = 10;
    double orig_weight = 0.5;
};

struct RetrieverSpec {
    std::string name;
    RetrieverKind kind = RetrieverKind::Bm25;
    Bm25Params bm25;
    Rm3Params rm3;
    int pool_size = 50;
    int context_size = 3;
    // Forwarded as "model" in the /rerank payload; lets two RERANK retrievers
    // address different cross-encoders behind one shim.
    std::optional<std::string> model;

    void validate() const;
};

struct RetrievalConfig {
    std::vector<RetrieverSpec> retrievers;
    // Retriever used by the single-retriever modes (RAG, M2C, M2C_WITH_VERIFY).
    std::string primary;

    const RetrieverSpec& find(const std::string& name) const;
    void validate() const;
};

enum class EntailmentBackend { Client, Stub };

struct ScoringConfig {
    double lambda = 0.5;
    EntailmentBackend entailment_backend = EntailmentBackend::Client;

    void validate() const;
};

enum class TieBreak { ByScore, ByPriority };

struct EnsembleConfig {
    // Names of RetrievalConfig::retrievers, in priority order.
    std::vector<std::string> members;
    TieBreak tie_break = TieBreak::ByScore;

    void validate() const;
};

struct GenerationParams {
    int max_tokens = 128;
    double temperature = 0.0;
};

struct RetryPolicy {
    int attempts = 3;
    int backoff_ms = 200;
};

struct BackendProfile {
    std::string base_url;
    int timeout_ms = 30000;
    int max_in_flight = 8;
    RetryPolicy retry;
    bool stub_mode = false;
    std::uint64_t stub_seed = 0;
    int stub_embedding_dim = 64;
    int embed_batch = 64;

    void validate() const;
};

struct PipelineConfig {
    MaskingConfig masking;
    RetrievalConfig retrieval;
    ScoringConfig scoring;
    EnsembleConfig ensemble;
    Mode mode = Mode::M2CPlus;
    GenerationParams generation;
    BackendProfile backends;

    void validate() const;
};

/// BM25, dense, and two rerankers (the second one named "colbert"); RM3 is
/// defined but left out of the ensemble.
PipelineConfig default_config();

/// Missing keys keep their default_config() values. Throws InvalidConfig.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& cfg);
nlohmann::json to_json(const RetrieverSpec& spec);

PipelineConfig load_config(const std::string& path);

}  // namespace factfix
