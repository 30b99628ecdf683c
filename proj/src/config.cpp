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

#include "factfix/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "factfix/error.hpp"
#include "factfix/text.hpp"

namespace factfix {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        fail(ErrorCode::InvalidConfig, what);
    }
}

std::string_view to_string(SimilarityProvider p) {
    return p == SimilarityProvider::EmbeddingClient ? "EMBEDDING_CLIENT" : "CHAR_NGRAM_TFIDF";
}

std::string_view to_string(EntailmentBackend b) { return b == EntailmentBackend::Client ? "CLIENT" : "STUB"; }

std::string_view to_string(TieBreak t) { return t == TieBreak::ByScore ? "BY_SCORE" : "BY_PRIORITY"; }

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end() && !it->is_null()) {
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            fail(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

template <typename Enum, typename Parse>
void read_enum(const json& j, const char* key, Enum& out, Parse parse) {
    std::string text;
    read(j, key, text);
    if (text.empty()) {
        return;
    }
    const auto parsed = parse(text);
    require(parsed.has_value(), std::string("unknown value '") + text + "' for '" + key + "'");
    out = *parsed;
}

RetrieverSpec make_spec(std::string name, RetrieverKind kind) {
    RetrieverSpec spec;
    spec.name = std::move(name);
    spec.kind = kind;
    return spec;
}

RetrieverSpec spec_from_json(const json& j) {
    RetrieverSpec spec;
    read(j, "name", spec.name);
    read_enum(j, "kind", spec.kind, parse_retriever_kind);
    if (spec.name.empty()) {
        spec.name = to_lower_ascii(to_string(spec.kind));
    }
    read(j, "k1", spec.bm25.k1);
    read(j, "b", spec.bm25.b);
    read(j, "fb_docs", spec.rm3.fb_docs);
    read(j, "fb_terms", spec.rm3.fb_terms);
    read(j, "orig_weight", spec.rm3.orig_weight);
    read(j, "pool_size", spec.pool_size);
    read(j, "context_size", spec.context_size);
    if (j.contains("model") && j["model"].is_string()) {
        spec.model = j["model"].get<std::string>();
    }
    return spec;
}

}  // namespace

void MaskingConfig::validate() const {
    require(alpha >= 0.0 && alpha <= 1.0, "masking.alpha must lie in [0,1]");
    require(max_masks >= 1, "masking.max_masks must be >= 1");
    require(rm_mask_ratio > 0.0 && rm_mask_ratio < 1.0, "masking.rm_mask_ratio must lie in (0,1)");
}

void RetrieverSpec::validate() const {
    require(!name.empty(), "retriever name must be non-empty");
    require(bm25.k1 > 0.0, "retriever '" + name + "': k1 must be > 0");
    require(bm25.b >= 0.0 && bm25.b <= 1.0, "retriever '" + name + "': b must lie in [0,1]");
    require(context_size >= 1, "retriever '" + name + "': context_size must be >= 1");
    require(pool_size >= context_size, "retriever '" + name + "': pool_size must be >= context_size");
    require(rm3.fb_docs >= 0 && rm3.fb_terms >= 0, "retriever '" + name + "': rm3 counts must be >= 0");
    require(rm3.orig_weight >= 0.0 && rm3.orig_weight <= 1.0,
            "retriever '" + name + "': orig_weight must lie in [0,1]");
}

const RetrieverSpec& RetrievalConfig::find(const std::string& name) const {
    const auto it = std::find_if(retrievers.begin(), retrievers.end(),
                                 [&](const RetrieverSpec& s) { return s.name == name; });
    if (it == retrievers.end()) {
        fail(ErrorCode::InvalidConfig, "unknown retriever '" + name + "'");
    }
    return *it;
}

void RetrievalConfig::validate() const {
    require(!retrievers.empty(), "retrieval.retrievers must not be empty");
    std::set<std::string> names;
    for (const auto& spec : retrievers) {
        spec.validate();
        require(names.insert(spec.name).second, "duplicate retriever name '" + spec.name + "'");
    }
    find(primary);
}

void ScoringConfig::validate() const {
    require(lambda >= 0.0 && lambda <= 1.0, "scoring.lambda must lie in [0,1]");
}

void EnsembleConfig::validate() const {
    // Hard majority voting needs three voters to break a two-way split.
    require(members.size() >= 3, "ensemble.members needs at least three retrievers");
    std::set<std::string> names(members.begin(), members.end());
    require(names.size() == members.size(), "ensemble.members contains duplicates");
}

void BackendProfile::validate() const {
    require(retry.attempts >= 1, "backends.retry.attempts must be >= 1");
    require(retry.backoff_ms >= 0, "backends.retry.backoff_ms must be >= 0");
    require(max_in_flight >= 1, "backends.max_in_flight must be >= 1");
    require(timeout_ms >= 1, "backends.timeout_ms must be >= 1");
    require(stub_embedding_dim >= 1, "backends.stub_embedding_dim must be >= 1");
    require(embed_batch >= 1, "backends.embed_batch must be >= 1");
}

void PipelineConfig::validate() const {
    masking.validate();
    retrieval.validate();
    scoring.validate();
    ensemble.validate();
    for (const auto& member : ensemble.members) {
        retrieval.find(member);
    }
    backends.validate();
    require(generation.max_tokens >= 1, "generation.max_tokens must be >= 1");
    require(generation.temperature >= 0.0, "generation.temperature must be >= 0");
}

PipelineConfig default_config() {
    PipelineConfig cfg;
    cfg.retrieval.retrievers = {
        make_spec("bm25", RetrieverKind::Bm25),
        make_spec("rm3", RetrieverKind::Rm3),
        make_spec("dense", RetrieverKind::Dense),
        make_spec("monot5", RetrieverKind::Rerank),
        make_spec("colbert", RetrieverKind::Rerank),
    };
    cfg.retrieval.retrievers.back().model = "colbert";
    cfg.retrieval.primary = "monot5";
    cfg.ensemble.members = {"bm25", "dense", "monot5", "colbert"};
    return cfg;
}

PipelineConfig config_from_json(const json& j) {
    require(j.is_object(), "config root must be a JSON object");
    PipelineConfig cfg = default_config();
    read_enum(j, "mode", cfg.mode, parse_mode);

    if (const auto it = j.find("masking"); it != j.end()) {
        const json& m = *it;
        read_enum(m, "strategy", cfg.masking.strategy, parse_mask_strategy);
        read(m, "alpha", cfg.masking.alpha);
        read(m, "max_masks", cfg.masking.max_masks);
        read(m, "rm_mask_ratio", cfg.masking.rm_mask_ratio);
        read(m, "external_spans", cfg.masking.external_spans);
        read(m, "seed", cfg.masking.seed);
        read_enum(m, "similarity", cfg.masking.similarity, [](std::string_view s) -> std::optional<SimilarityProvider> {
            if (s == "EMBEDDING_CLIENT") return SimilarityProvider::EmbeddingClient;
            if (s == "CHAR_NGRAM_TFIDF") return SimilarityProvider::CharNgramTfidf;
            return std::nullopt;
        });
    }
    if (const auto it = j.find("retrieval"); it != j.end()) {
        const json& r = *it;
        if (const auto list = r.find("retrievers"); list != r.end()) {
            require(list->is_array(), "retrieval.retrievers must be an array");
            cfg.retrieval.retrievers.clear();
            for (const auto& item : *list) {
                cfg.retrieval.retrievers.push_back(spec_from_json(item));
            }
        }
        read(r, "primary", cfg.retrieval.primary);
        // Convenience overrides applied to every retriever.
        if (r.contains("context_size")) {
            for (auto& spec : cfg.retrieval.retrievers) read(r, "context_size", spec.context_size);
        }
        if (r.contains("pool_size")) {
            for (auto& spec : cfg.retrieval.retrievers) read(r, "pool_size", spec.pool_size);
        }
    }
    if (const auto it = j.find("scoring"); it != j.end()) {
        read(*it, "lambda", cfg.scoring.lambda);
        read_enum(*it, "entailment_backend", cfg.scoring.entailment_backend,
                  [](std::string_view s) -> std::optional<EntailmentBackend> {
                      if (s == "CLIENT" || s == "ENTAIL_CLIENT") return EntailmentBackend::Client;
                      if (s == "STUB") return EntailmentBackend::Stub;
                      return std::nullopt;
                  });
    }
    if (const auto it = j.find("ensemble"); it != j.end()) {
        read(*it, "members", cfg.ensemble.members);
        read_enum(*it, "tie_break", cfg.ensemble.tie_break, [](std::string_view s) -> std::optional<TieBreak> {
            if (s == "BY_SCORE") return TieBreak::ByScore;
            if (s == "BY_PRIORITY") return TieBreak::ByPriority;
            return std::nullopt;
        });
    }
    if (const auto it = j.find("generation"); it != j.end()) {
        read(*it, "max_tokens", cfg.generation.max_tokens);
        read(*it, "temperature", cfg.generation.temperature);
    }
    if (const auto it = j.find("backends"); it != j.end()) {
        const json& b = *it;
        read(b, "base_url", cfg.backends.base_url);
        read(b, "timeout_ms", cfg.backends.timeout_ms);
        read(b, "max_in_flight", cfg.backends.max_in_flight);
        read(b, "stub_mode", cfg.backends.stub_mode);
        read(b, "stub_seed", cfg.backends.stub_seed);
        read(b, "stub_embedding_dim", cfg.backends.stub_embedding_dim);
        read(b, "embed_batch", cfg.backends.embed_batch);
        if (const auto retry = b.find("retry"); retry != b.end()) {
            read(*retry, "attempts", cfg.backends.retry.attempts);
            read(*retry, "backoff_ms", cfg.backends.retry.backoff_ms);
        }
    }
    cfg.validate();
    return cfg;
}

json to_json(const RetrieverSpec& spec) {
    json j = {
        {"name", spec.name},
        {"kind", to_string(spec.kind)},
        {"k1", spec.bm25.k1},
        {"b", spec.bm25.b},
        {"fb_docs", spec.rm3.fb_docs},
        {"fb_terms", spec.rm3.fb_terms},
        {"orig_weight", spec.rm3.orig_weight},
        {"pool_size", spec.pool_size},
        {"context_size", spec.context_size},
    };
    if (spec.model) {
        j["model"] = *spec.model;
    }
    return j;
}

json to_json(const PipelineConfig& cfg) {
    json retrievers = json::array();
    for (const auto& spec : cfg.retrieval.retrievers) {
        retrievers.push_back(to_json(spec));
    }
    return {
        {"mode", to_string(cfg.mode)},
        {"masking",
         {{"strategy", to_string(cfg.masking.strategy)},
          {"alpha", cfg.masking.alpha},
          {"max_masks", cfg.masking.max_masks},
          {"rm_mask_ratio", cfg.masking.rm_mask_ratio},
          {"similarity", to_string(cfg.masking.similarity)},
          {"external_spans", cfg.masking.external_spans},
          {"seed", cfg.masking.seed}}},
        {"retrieval", {{"primary", cfg.retrieval.primary}, {"retrievers", retrievers}}},
        {"scoring",
         {{"lambda", cfg.scoring.lambda}, {"entailment_backend", to_string(cfg.scoring.entailment_backend)}}},
        {"ensemble", {{"members", cfg.ensemble.members}, {"tie_break", to_string(cfg.ensemble.tie_break)}}},
        {"generation", {{"max_tokens", cfg.generation.max_tokens}, {"temperature", cfg.generation.temperature}}},
        {"backends",
         {{"base_url", cfg.backends.base_url},
          {"timeout_ms", cfg.backends.timeout_ms},
          {"max_in_flight", cfg.backends.max_in_flight},
          {"retry", {{"attempts", cfg.backends.retry.attempts}, {"backoff_ms", cfg.backends.retry.backoff_ms}}},
          {"stub_mode", cfg.backends.stub_mode},
          {"stub_seed", cfg.backends.stub_seed},
          {"stub_embedding_dim", cfg.backends.stub_embedding_dim},
          {"embed_batch", cfg.backends.embed_batch}}},
    };
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::IoFailure, "cannot open config '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidConfig, "config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

}  // namespace factfix
