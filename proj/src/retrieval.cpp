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

#include "factfix/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <cereal/archives/portable_binary.hpp>
#include <cereal/types/optional.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/vector.hpp>
#include <spdlog/spdlog.h>

#include "factfix/backends.hpp"
#include "factfix/error.hpp"
#include "factfix/io.hpp"
#include "factfix/text.hpp"

namespace factfix {

using nlohmann::json;
namespace fs = std::filesystem;

template <class Archive>
void serialize(Archive& ar, CorpusDoc& doc) {
    ar(doc.doc_id, doc.text, doc.title);
}

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kIndexFile = "index.bin";
constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kEmbeddingFile = "embeddings.f32";
constexpr const char* kEmbeddingSidecar = "embeddings.json";

std::string join_path(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

json build_params_json(const AnalyzerSettings& settings) {
    return {{"format_version", kFormatVersion},
            {"analyzer", {{"tokenizer", "whitespace+edge-punctuation"},
                          {"lowercase", true},
                          {"remove_stopwords", settings.remove_stopwords}}}};
}

std::string corpus_hash(std::span<const CorpusDoc> docs) {
    std::string buf;
    for (const auto& d : docs) {
        buf += d.doc_id;
        buf += '\x1f';
        buf += d.title.value_or("");
        buf += '\x1f';
        buf += d.text;
        buf += '\x1e';
    }
    return sha256_hex(buf);
}

bool better(const ScoredDoc& a, const ScoredDoc& b, const InvertedIndex& index) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return index.doc(a.doc).doc_id < index.doc(b.doc).doc_id;
}

void require_loaded(const InvertedIndex& index) {
    if (!index.loaded()) {
        fail(ErrorCode::IndexNotLoaded, "no index loaded");
    }
}

}  // namespace

std::vector<CorpusDoc> read_corpus(const std::string& path) {
    if (!fs::exists(path)) {
        fail(ErrorCode::CorpusNotFound, "corpus file '" + path + "' does not exist");
    }
    JsonlReader reader(path);
    std::vector<CorpusDoc> docs;
    std::set<std::string> seen;
    while (auto j = reader.next()) {
        CorpusDoc doc;
        try {
            const auto& id = j->at("doc_id");
            doc.doc_id = id.is_string() ? id.get<std::string>() : id.dump();
            doc.text = j->at("text").get<std::string>();
            if (j->contains("title") && (*j)["title"].is_string()) {
                doc.title = (*j)["title"].get<std::string>();
            }
        } catch (const json::exception& e) {
            fail(ErrorCode::ParseError, path + ":" + std::to_string(reader.line_number()) + ": " + e.what());
        }
        if (trim(doc.text).empty()) {
            fail(ErrorCode::ParseError,
                 path + ":" + std::to_string(reader.line_number()) + ": empty text for '" + doc.doc_id + "'");
        }
        if (!seen.insert(doc.doc_id).second) {
            fail(ErrorCode::DuplicateDocId, "duplicate doc_id '" + doc.doc_id + "' at " + path + ":" +
                                                std::to_string(reader.line_number()));
        }
        docs.push_back(std::move(doc));
    }
    if (docs.empty()) {
        fail(ErrorCode::EmptyCorpus, "corpus '" + path + "' has no documents");
    }
    return docs;
}

std::vector<std::string> analyze(std::string_view text, const AnalyzerSettings& settings) {
    auto tokens = tokenize(text);
    if (settings.remove_stopwords) {
        std::erase_if(tokens, [](const std::string& t) { return is_stopword(t); });
    }
    return tokens;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

json IndexManifest::stable_json() const {
    return {{"corpus_hash", corpus_hash},       {"doc_count", doc_count},
            {"vocab_size", vocab_size},         {"avg_doc_length", avg_doc_length},
            {"build_params", build_params},     {"index_sha256", index_sha256}};
}

json IndexManifest::to_json() const {
    auto j = stable_json();
    j["built_at"] = built_at;
    return j;
}

IndexManifest IndexManifest::from_json(const json& j) {
    IndexManifest m;
    try {
        m.corpus_hash = j.at("corpus_hash").get<std::string>();
        m.doc_count = j.at("doc_count").get<std::size_t>();
        m.vocab_size = j.at("vocab_size").get<std::size_t>();
        m.avg_doc_length = j.at("avg_doc_length").get<double>();
        m.build_params = j.at("build_params");
        m.index_sha256 = j.at("index_sha256").get<std::string>();
        m.built_at = j.value("built_at", "");
    } catch (const json::exception& e) {
        fail(ErrorCode::IndexCorrupt, std::string("malformed index manifest: ") + e.what());
    }
    return m;
}

// ---------------------------------------------------------------------------
// Inverted index
// ---------------------------------------------------------------------------

template <class Archive>
void InvertedIndex::serialize(Archive& ar) {
    ar(settings_.remove_stopwords, docs_, doc_len_, avg_len_, terms_, postings_, forward_, corpus_hash_);
}

InvertedIndex InvertedIndex::build(std::span<const CorpusDoc> docs, AnalyzerSettings settings) {
    if (docs.empty()) {
        fail(ErrorCode::EmptyCorpus, "cannot index an empty corpus");
    }
    InvertedIndex index;
    index.settings_ = settings;
    std::set<std::string> seen;
    std::map<std::string, std::vector<Posting>> postings;
    std::vector<std::map<std::string, std::uint32_t>> per_doc;
    per_doc.reserve(docs.size());
    std::uint64_t total_len = 0;

    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& d = docs[i];
        if (!seen.insert(d.doc_id).second) {
            fail(ErrorCode::DuplicateDocId, "duplicate doc_id '" + d.doc_id + "'");
        }
        if (trim(d.text).empty()) {
            fail(ErrorCode::InvalidArgument, "document '" + d.doc_id + "' has empty text");
        }
        std::map<std::string, std::uint32_t> tf;
        for (auto& t : analyze(d.text, settings)) {
            ++tf[std::move(t)];
        }
        std::uint32_t len = 0;
        for (const auto& [term, count] : tf) {
            postings[term].push_back({static_cast<std::uint32_t>(i), count});
            len += count;
        }
        index.docs_.push_back(d);
        index.doc_len_.push_back(len);
        total_len += len;
        per_doc.push_back(std::move(tf));
    }

    index.avg_len_ = static_cast<double>(total_len) / static_cast<double>(docs.size());
    index.terms_.reserve(postings.size());
    index.postings_.reserve(postings.size());
    for (auto& [term, list] : postings) {
        index.terms_.push_back(term);
        index.postings_.push_back(std::move(list));
    }
    index.rebuild_lookups();
    index.forward_.resize(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        for (const auto& [term, count] : per_doc[i]) {
            index.forward_[i].push_back({index.term_lookup_.at(term), count});
        }
    }
    index.corpus_hash_ = corpus_hash(docs);
    return index;
}

void InvertedIndex::rebuild_lookups() {
    term_lookup_.clear();
    doc_lookup_.clear();
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        term_lookup_.emplace(terms_[i], static_cast<std::uint32_t>(i));
    }
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        doc_lookup_.emplace(docs_[i].doc_id, i);
    }
}

std::optional<std::size_t> InvertedIndex::find_doc(const std::string& doc_id) const {
    const auto it = doc_lookup_.find(doc_id);
    return it == doc_lookup_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
}

std::optional<std::uint32_t> InvertedIndex::term_id(const std::string& term) const {
    const auto it = term_lookup_.find(term);
    return it == term_lookup_.end() ? std::nullopt : std::optional<std::uint32_t>(it->second);
}

IndexManifest InvertedIndex::manifest() const {
    IndexManifest m;
    m.corpus_hash = corpus_hash_;
    m.doc_count = docs_.size();
    m.vocab_size = terms_.size();
    m.avg_doc_length = avg_len_;
    m.build_params = build_params_json(settings_);
    return m;
}

IndexManifest InvertedIndex::save(const std::string& out_dir) const {
    require_loaded(*this);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        fail(ErrorCode::IoFailure, "cannot create '" + out_dir + "': " + ec.message());
    }
    std::ostringstream buf(std::ios::binary);
    {
        cereal::PortableBinaryOutputArchive ar(buf);
        ar(*const_cast<InvertedIndex*>(this));
    }
    const auto bytes = buf.str();
    write_file(join_path(out_dir, kIndexFile), bytes);

    auto m = manifest();
    m.index_sha256 = sha256_hex(bytes);
    m.built_at = utc_timestamp();
    write_file(join_path(out_dir, kManifestFile), m.to_json().dump(2) + "\n");
    return m;
}

InvertedIndex InvertedIndex::load(const std::string& dir) {
    const auto index_path = join_path(dir, kIndexFile);
    const auto manifest_path = join_path(dir, kManifestFile);
    if (!fs::exists(index_path) || !fs::exists(manifest_path)) {
        fail(ErrorCode::IndexNotLoaded, "no index in '" + dir + "' (run the index command first)");
    }
    IndexManifest expected;
    try {
        expected = IndexManifest::from_json(json::parse(read_file(manifest_path)));
    } catch (const json::parse_error& e) {
        fail(ErrorCode::IndexCorrupt, "unreadable manifest: " + std::string(e.what()));
    }
    const auto bytes = read_file(index_path);
    if (sha256_hex(bytes) != expected.index_sha256) {
        fail(ErrorCode::IndexCorrupt, "index.bin does not match the manifest checksum");
    }
    InvertedIndex index;
    try {
        std::istringstream in(bytes, std::ios::binary);
        cereal::PortableBinaryInputArchive ar(in);
        ar(index);
    } catch (const std::exception& e) {
        fail(ErrorCode::IndexCorrupt, std::string("cannot decode index.bin: ") + e.what());
    }
    index.rebuild_lookups();
    const auto actual = index.manifest();
    if (actual.doc_count != expected.doc_count || actual.vocab_size != expected.vocab_size ||
        actual.corpus_hash != expected.corpus_hash || actual.build_params != expected.build_params) {
        fail(ErrorCode::IndexCorrupt, "index contents disagree with the manifest");
    }
    return index;
}

// ---------------------------------------------------------------------------
// Lexical search
// ---------------------------------------------------------------------------

WeightedQuery query_weights(const InvertedIndex& index, std::string_view query) {
    std::map<std::string, double> counts;
    for (auto& t : analyze(query, index.settings())) {
        counts[std::move(t)] += 1.0;
    }
    return {counts.begin(), counts.end()};
}

std::vector<ScoredDoc> bm25_search_weighted(const InvertedIndex& index, const WeightedQuery& query, std::size_t k,
                                            const Bm25Params& params) {
    require_loaded(index);
    if (k == 0) {
        return {};
    }
    const auto n = static_cast<double>(index.doc_count());
    const auto avgdl = index.avg_doc_length() > 0.0 ? index.avg_doc_length() : 1.0;
    std::vector<double> acc(index.doc_count(), 0.0);
    std::vector<char> touched(index.doc_count(), 0);
    for (const auto& [term, weight] : query) {
        const auto id = index.term_id(term);
        if (!id || weight == 0.0) {
            continue;
        }
        const auto df = static_cast<double>(index.df(*id));
        const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
        for (const auto& p : index.postings(*id)) {
            const double tf = p.tf;
            const double norm = params.k1 * (1.0 - params.b + params.b * index.doc_length(p.doc) / avgdl);
            acc[p.doc] += weight * idf * tf * (params.k1 + 1.0) / (tf + norm);
            touched[p.doc] = 1;
        }
    }
    std::vector<ScoredDoc> hits;
    for (std::size_t d = 0; d < acc.size(); ++d) {
        if (touched[d]) {
            hits.push_back({d, acc[d]});
        }
    }
    const auto cmp = [&](const ScoredDoc& a, const ScoredDoc& b) { return better(a, b, index); };
    if (hits.size() > k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), cmp);
        hits.resize(k);
    } else {
        std::sort(hits.begin(), hits.end(), cmp);
    }
    return hits;
}

std::vector<ScoredDoc> bm25_search(const InvertedIndex& index, std::string_view query, std::size_t k,
                                   const Bm25Params& params) {
    require_loaded(index);
    return bm25_search_weighted(index, query_weights(index, query), k, params);
}

WeightedQuery relevance_model(const InvertedIndex& index, std::span<const ScoredDoc> feedback, int fb_terms) {
    double total = 0.0;
    for (const auto& f : feedback) {
        total += f.score;
    }
    if (feedback.empty() || fb_terms <= 0 || total <= 0.0) {
        return {};
    }
    std::map<std::uint32_t, double> weight;
    for (const auto& f : feedback) {
        const double len = index.doc_length(f.doc);
        if (len == 0.0) {
            continue;
        }
        for (const auto& [term, tf] : index.doc_terms(f.doc)) {
            weight[term] += (tf / len) * (f.score / total);
        }
    }
    WeightedQuery model;
    model.reserve(weight.size());
    for (const auto& [term, w] : weight) {
        model.emplace_back(index.term(term), w);
    }
    std::sort(model.begin(), model.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (model.size() > static_cast<std::size_t>(fb_terms)) {
        model.resize(static_cast<std::size_t>(fb_terms));
    }
    double mass = 0.0;
    for (const auto& entry : model) {
        mass += entry.second;
    }
    for (auto& entry : model) {
        entry.second /= mass;
    }
    std::sort(model.begin(), model.end());
    return model;
}

WeightedQuery rm3_expand(const WeightedQuery& original, const WeightedQuery& model, double orig_weight) {
    double length = 0.0;
    for (const auto& entry : original) {
        length += entry.second;
    }
    std::map<std::string, double> merged;
    for (const auto& [term, w] : original) {
        merged[term] += orig_weight * w;
    }
    for (const auto& [term, p] : model) {
        merged[term] += (1.0 - orig_weight) * length * p;
    }
    WeightedQuery out;
    for (const auto& [term, w] : merged) {
        if (w != 0.0) {
            out.emplace_back(term, w);
        }
    }
    return out;
}

std::vector<ScoredDoc> rm3_search(const InvertedIndex& index, std::string_view query, std::size_t k,
                                  const Rm3Params& rm3, const Bm25Params& bm25) {
    require_loaded(index);
    const auto original = query_weights(index, query);
    if (rm3.fb_docs <= 0 || rm3.fb_terms <= 0) {
        return bm25_search_weighted(index, original, k, bm25);
    }
    const auto feedback = bm25_search_weighted(index, original, static_cast<std::size_t>(rm3.fb_docs), bm25);
    if (feedback.empty()) {
        return {};
    }
    const auto model = relevance_model(index, feedback, rm3.fb_terms);
    return bm25_search_weighted(index, rm3_expand(original, model, rm3.orig_weight), k, bm25);
}

// ---------------------------------------------------------------------------
// Dense search
// ---------------------------------------------------------------------------

EmbeddingStore::EmbeddingStore(std::size_t dim, std::vector<std::string> doc_ids, std::vector<float> data)
    : dim_(dim), doc_ids_(std::move(doc_ids)), data_(std::move(data)) {
    if (dim_ == 0 || data_.size() != dim_ * doc_ids_.size()) {
        fail(ErrorCode::DimensionMismatch, "embedding data does not hold count x dim floats");
    }
}

EmbeddingStore EmbeddingStore::build(const InvertedIndex& index, ModelClient& client) {
    require_loaded(index);
    std::vector<std::string> texts;
    std::vector<std::string> ids;
    texts.reserve(index.doc_count());
    for (std::size_t i = 0; i < index.doc_count(); ++i) {
        texts.push_back(index.doc(i).text);
        ids.push_back(index.doc(i).doc_id);
    }
    const auto vectors = client.embed(texts);
    const auto dim = vectors.front().size();
    std::vector<float> data;
    data.reserve(dim * vectors.size());
    for (const auto& v : vectors) {
        if (v.size() != dim) {
            fail(ErrorCode::DimensionMismatch, "/embed returned vectors of differing length");
        }
        data.insert(data.end(), v.begin(), v.end());
    }
    return {dim, std::move(ids), std::move(data)};
}

void EmbeddingStore::save(const std::string& dir) const {
    std::string bytes;
    bytes.reserve(data_.size() * 4);
    for (const float x : data_) {
        const auto bits = std::bit_cast<std::uint32_t>(x);
        for (int shift = 0; shift < 32; shift += 8) {
            bytes += static_cast<char>((bits >> shift) & 0xFF);
        }
    }
    write_file(join_path(dir, kEmbeddingFile), bytes);
    const json sidecar = {{"dim", dim_}, {"count", doc_ids_.size()}, {"doc_ids", doc_ids_}};
    write_file(join_path(dir, kEmbeddingSidecar), sidecar.dump(2) + "\n");
}

bool EmbeddingStore::exists(const std::string& dir) {
    return fs::exists(join_path(dir, kEmbeddingFile)) && fs::exists(join_path(dir, kEmbeddingSidecar));
}

EmbeddingStore EmbeddingStore::load(const std::string& dir) {
    if (!exists(dir)) {
        fail(ErrorCode::IndexNotLoaded, "no embedding store in '" + dir + "'");
    }
    std::size_t dim = 0;
    std::size_t count = 0;
    std::vector<std::string> ids;
    try {
        const auto sidecar = json::parse(read_file(join_path(dir, kEmbeddingSidecar)));
        dim = sidecar.at("dim").get<std::size_t>();
        count = sidecar.at("count").get<std::size_t>();
        ids = sidecar.at("doc_ids").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        fail(ErrorCode::IndexCorrupt, std::string("malformed embedding sidecar: ") + e.what());
    }
    const auto bytes = read_file(join_path(dir, kEmbeddingFile));
    if (ids.size() != count || dim == 0 || bytes.size() != dim * count * 4) {
        fail(ErrorCode::IndexCorrupt, "embedding file size does not match its sidecar");
    }
    std::vector<float> data(dim * count);
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
            bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b])) << (8 * b);
        }
        data[i] = std::bit_cast<float>(bits);
    }
    return {dim, std::move(ids), std::move(data)};
}

double cosine(std::span<const float> a, std::span<const float> b) noexcept {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<DenseHit> dense_search(const EmbeddingStore& store, std::string_view query, std::size_t k,
                                   ModelClient& client) {
    if (!store.loaded()) {
        fail(ErrorCode::IndexNotLoaded, "no embedding store loaded");
    }
    const std::string text(query);
    const auto vectors = client.embed(std::span<const std::string>(&text, 1));
    const auto& q = vectors.front();
    if (q.size() != store.dim()) {
        fail(ErrorCode::DimensionMismatch, "query vector has " + std::to_string(q.size()) +
                                               " components, store has " + std::to_string(store.dim()));
    }
    std::vector<DenseHit> hits;
    hits.reserve(store.count());
    for (std::size_t i = 0; i < store.count(); ++i) {
        hits.push_back({store.doc_id(i), cosine(q, store.row(i))});
    }
    const auto cmp = [](const DenseHit& a, const DenseHit& b) {
        return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
    };
    if (hits.size() > k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), cmp);
        hits.resize(k);
    } else {
        std::sort(hits.begin(), hits.end(), cmp);
    }
    return hits;
}

// ---------------------------------------------------------------------------
// Reranking and dispatch
// ---------------------------------------------------------------------------

std::vector<EvidenceItem> rerank(std::span<const EvidenceItem> pool, const std::string& query, ModelClient& client,
                                 const std::optional<std::string>& model) {
    if (pool.empty()) {
        return {};
    }
    std::vector<std::string> texts;
    texts.reserve(pool.size());
    for (const auto& item : pool) {
        texts.push_back(item.text);
    }
    const auto scores = client.rerank(query, texts, model);
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<EvidenceItem> out;
    out.reserve(pool.size());
    for (const auto i : order) {
        out.push_back({pool[i].doc_id, pool[i].text, scores[i]});
    }
    return out;
}

EvidenceSet retrieve_evidence(const Claim& claim, const RetrieverSpec& spec, const RetrievalResources& resources) {
    claim.validate();
    if (resources.index == nullptr) {
        fail(ErrorCode::IndexNotLoaded, "retriever '" + spec.name + "' needs an index");
    }
    const auto& index = *resources.index;
    const auto p = static_cast<std::size_t>(spec.context_size);

    EvidenceSet out;
    out.claim_id = claim.id;
    out.retriever = spec.name;
    out.kind = spec.kind;

    const auto from_hits = [&](const std::vector<ScoredDoc>& hits) {
        std::vector<EvidenceItem> items;
        for (const auto& h : hits) {
            items.push_back({index.doc(h.doc).doc_id, index.doc(h.doc).text, h.score});
        }
        return items;
    };

    switch (spec.kind) {
        case RetrieverKind::Bm25:
            out.items = from_hits(bm25_search(index, claim.text, p, spec.bm25));
            break;
        case RetrieverKind::Rm3:
            out.items = from_hits(rm3_search(index, claim.text, p, spec.rm3, spec.bm25));
            break;
        case RetrieverKind::Dense: {
            if (resources.client == nullptr || resources.embeddings == nullptr) {
                fail(ErrorCode::IndexNotLoaded, "retriever '" + spec.name + "' needs an embedding store and client");
            }
            for (const auto& hit : dense_search(*resources.embeddings, claim.text, p, *resources.client)) {
                const auto doc = index.find_doc(hit.doc_id);
                if (!doc) {
                    fail(ErrorCode::IndexCorrupt, "embedding store names unknown doc_id '" + hit.doc_id + "'");
                }
                out.items.push_back({hit.doc_id, index.doc(*doc).text, hit.score});
            }
            break;
        }
        case RetrieverKind::Rerank: {
            if (resources.client == nullptr) {
                fail(ErrorCode::RerankServiceUnavailable, "retriever '" + spec.name + "' needs a rerank client");
            }
            const auto pool = from_hits(bm25_search(index, claim.text, static_cast<std::size_t>(spec.pool_size), spec.bm25));
            out.items = rerank(pool, claim.text, *resources.client, spec.model);
            if (out.items.size() > p) {
                out.items.resize(p);
            }
            break;
        }
    }
    if (out.items.empty()) {
        spdlog::info("claim {}: retriever {} found no evidence", claim.id, spec.name);
    }
    return out;
}

}  // namespace factfix
