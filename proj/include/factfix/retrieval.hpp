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

// Evidence retrieval over a JSONL corpus.
//
// BM25 scores a document d for a weighted query {t: w_t} as
//     sum_t w_t * idf(t) * tf(t,d) * (k1 + 1) / (tf(t,d) + k1 * (1 - b + b * |d| / avgdl))
// with idf(t) = ln(1 + (N - df(t) + 0.5) / (df(t) + 0.5)). A plain query has
// w_t = number of occurrences of t. RM3 re-runs the same scorer with an
// expanded weight vector, so orig_weight = 1 reproduces BM25 exactly.
//
// On-disk layout of an index directory:
//     index.bin        cereal portable-binary inverted index and document store
//     manifest.json    IndexManifest
//     embeddings.f32   optional, little-endian float32 rows
//     embeddings.json  optional, {"dim", "count", "doc_ids"}

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "factfix/config.hpp"
#include "factfix/types.hpp"

namespace factfix {

class ModelClient;

struct CorpusDoc {
    std::string doc_id;
    std::string text;
    std::optional<std::string> title;
};

/// Throws CorpusNotFound, ParseError, DuplicateDocId, EmptyCorpus.
std::vector<CorpusDoc> read_corpus(const std::string& path);

struct AnalyzerSettings {
    bool remove_stopwords = true;

    friend bool operator==(const AnalyzerSettings&, const AnalyzerSettings&) = default;
};

/// tokenize() minus stopwords when enabled.
std::vector<std::string> analyze(std::string_view text, const AnalyzerSettings& settings);

struct IndexManifest {
    std::string corpus_hash;  // SHA-256 over the (doc_id, title, text) records in corpus order
    std::size_t doc_count = 0;
    std::size_t vocab_size = 0;
    double avg_doc_length = 0.0;
    nlohmann::json build_params;
    std::string index_sha256;  // of index.bin
    std::string built_at;

    /// Everything except built_at.
    nlohmann::json stable_json() const;
    nlohmann::json to_json() const;
    static IndexManifest from_json(const nlohmann::json& j);
};

struct ScoredDoc {
    std::size_t doc = 0;  // position in the index document store
    double score = 0.0;
};

using WeightedQuery = std::vector<std::pair<std::string, double>>;

class InvertedIndex {
public:
    struct Posting {
        std::uint32_t doc = 0;
        std::uint32_t tf = 0;

        template <class Archive>
        void serialize(Archive& ar) {
            ar(doc, tf);
        }
    };

    InvertedIndex() = default;

    /// Throws EmptyCorpus, DuplicateDocId.
    static InvertedIndex build(std::span<const CorpusDoc> docs, AnalyzerSettings settings = {});

    /// Writes index.bin and manifest.json into out_dir (created if needed). Throws IoFailure.
    IndexManifest save(const std::string& out_dir) const;

    /// Throws IndexNotLoaded when the files are missing, IndexCorrupt when
    /// the manifest and the index disagree.
    static InvertedIndex load(const std::string& dir);

    bool loaded() const noexcept { return !docs_.empty(); }
    std::size_t doc_count() const noexcept { return docs_.size(); }
    std::size_t vocab_size() const noexcept { return terms_.size(); }
    double avg_doc_length() const noexcept { return avg_len_; }
    const AnalyzerSettings& settings() const noexcept { return settings_; }

    const CorpusDoc& doc(std::size_t i) const { return docs_.at(i); }
    std::uint32_t doc_length(std::size_t i) const { return doc_len_.at(i); }
    std::optional<std::size_t> find_doc(const std::string& doc_id) const;

    std::optional<std::uint32_t> term_id(const std::string& term) const;
    const std::string& term(std::uint32_t id) const { return terms_.at(id); }
    std::size_t df(std::uint32_t id) const { return postings_.at(id).size(); }
    const std::vector<Posting>& postings(std::uint32_t id) const { return postings_.at(id); }
    /// (term id, tf) pairs of one document, term ids ascending.
    const std::vector<Posting>& doc_terms(std::size_t i) const { return forward_.at(i); }

    /// Content fields only; save() adds index_sha256 and built_at.
    IndexManifest manifest() const;

    template <class Archive>
    void serialize(Archive& ar);

private:
    void rebuild_lookups();

    AnalyzerSettings settings_;
    std::vector<CorpusDoc> docs_;
    std::vector<std::uint32_t> doc_len_;
    double avg_len_ = 0.0;
    std::vector<std::string> terms_;               // sorted
    std::vector<std::vector<Posting>> postings_;   // aligned with terms_, docs ascending
    std::vector<std::vector<Posting>> forward_;    // per doc; Posting::doc holds the term id
    std::string corpus_hash_;
    std::unordered_map<std::string, std::uint32_t> term_lookup_;
    std::unordered_map<std::string, std::size_t> doc_lookup_;
};

/// Occurrence counts of the analyzed query terms, terms ascending.
WeightedQuery query_weights(const InvertedIndex& index, std::string_view query);

/// Best k by score, ties by doc_id ascending. Throws IndexNotLoaded.
std::vector<ScoredDoc> bm25_search_weighted(const InvertedIndex& index, const WeightedQuery& query, std::size_t k,
                                            const Bm25Params& params);

std::vector<ScoredDoc> bm25_search(const InvertedIndex& index, std::string_view query, std::size_t k,
                                   const Bm25Params& params = {});

/// Relevance model over the top fb_docs BM25 hits:
///     P(w|R) proportional to sum_d (tf(w,d) / |d|) * score(d) / sum_d score(d)
/// truncated to the fb_terms most probable terms (ties by term) and renormalized.
WeightedQuery relevance_model(const InvertedIndex& index, std::span<const ScoredDoc> feedback, int fb_terms);

/// Interpolated query orig_weight * q + (1 - orig_weight) * |q| * P(.|R), where
/// q holds raw counts and |q| their sum. Zero weights are dropped.
WeightedQuery rm3_expand(const WeightedQuery& original, const WeightedQuery& model, double orig_weight);

std::vector<ScoredDoc> rm3_search(const InvertedIndex& index, std::string_view query, std::size_t k,
                                  const Rm3Params& rm3, const Bm25Params& bm25 = {});

/// Dense document vectors aligned with doc ids.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    EmbeddingStore(std::size_t dim, std::vector<std::string> doc_ids, std::vector<float> data);

    /// Embeds every document text through /embed.
    static EmbeddingStore build(const InvertedIndex& index, ModelClient& client);

    /// Writes embeddings.f32 and embeddings.json. Throws IoFailure.
    void save(const std::string& dir) const;
    /// Throws IndexNotLoaded when absent, IndexCorrupt on size mismatch.
    static EmbeddingStore load(const std::string& dir);
    static bool exists(const std::string& dir);

    bool loaded() const noexcept { return !doc_ids_.empty(); }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t count() const noexcept { return doc_ids_.size(); }
    const std::string& doc_id(std::size_t row) const { return doc_ids_.at(row); }
    std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> doc_ids_;
    std::vector<float> data_;
};

struct DenseHit {
    std::string doc_id;
    double score = 0.0;
};

/// Exact cosine scan, ties by doc_id. Throws IndexNotLoaded, DimensionMismatch,
/// EmbeddingServiceUnavailable.
std::vector<DenseHit> dense_search(const EmbeddingStore& store, std::string_view query, std::size_t k,
                                   ModelClient& client);

double cosine(std::span<const float> a, std::span<const float> b) noexcept;

/// Sorts the pool by the /rerank scores, descending; equal scores keep pool
/// order. Membership is unchanged. Throws RerankServiceUnavailable, MalformedScores.
std::vector<EvidenceItem> rerank(std::span<const EvidenceItem> pool, const std::string& query, ModelClient& client,
                                 const std::optional<std::string>& model = std::nullopt);

struct RetrievalResources {
    const InvertedIndex* index = nullptr;
    const EmbeddingStore* embeddings = nullptr;  // DENSE only
    ModelClient* client = nullptr;               // DENSE and RERANK
};

/// Top context_size evidence for the raw claim text. RERANK reranks the BM25
/// top pool_size. An empty result is logged, not an error.
EvidenceSet retrieve_evidence(const Claim& claim, const RetrieverSpec& spec, const RetrievalResources& resources);

}  // namespace factfix
