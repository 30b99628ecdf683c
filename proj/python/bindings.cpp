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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <spdlog/spdlog.h>

#include "json.hpp"

#include "factfix/backends.hpp"
#include "factfix/config.hpp"
#include "factfix/ensemble.hpp"
#include "factfix/error.hpp"
#include "factfix/evaluation.hpp"
#include "factfix/io.hpp"
#include "factfix/masking.hpp"
#include "factfix/pipeline.hpp"
#include "factfix/retrieval.hpp"
#include "factfix/scoring.hpp"
#include "factfix/stub.hpp"
#include "factfix/text.hpp"

namespace py = pybind11;
using namespace factfix;
using nlohmann::json;

namespace {

PipelineConfig parse_config(const std::string& text) {
    auto cfg = text.empty() ? default_config() : config_from_json(json::parse(text));
    cfg.backends = apply_environment(cfg.backends);
    cfg.validate();
    return cfg;
}

class Index {
public:
    explicit Index(InvertedIndex index) : index_(std::move(index)) {}

    static Index from_corpus(const std::string& path) { return Index(InvertedIndex::build(read_corpus(path))); }

    static Index from_docs(const std::string& docs_json) {
        std::vector<CorpusDoc> docs;
        for (const auto& d : json::parse(docs_json)) {
            CorpusDoc doc;
            doc.doc_id = d.at("doc_id").get<std::string>();
            doc.text = d.at("text").get<std::string>();
            if (d.contains("title") && d.at("title").is_string()) {
                doc.title = d.at("title").get<std::string>();
            }
            docs.push_back(std::move(doc));
        }
        return Index(InvertedIndex::build(docs));
    }

    static Index load(const std::string& dir) { return Index(InvertedIndex::load(dir)); }

    std::string save(const std::string& dir) const { return index_.save(dir).to_json().dump(); }

    std::size_t doc_count() const { return index_.doc_count(); }

    std::vector<std::pair<std::string, double>> search(const std::string& query, std::size_t k,
                                                       const std::string& method) const {
        std::vector<ScoredDoc> hits;
        if (method == "bm25") {
            hits = bm25_search(index_, query, k);
        } else if (method == "rm3") {
            hits = rm3_search(index_, query, k, Rm3Params{});
        } else {
            fail(ErrorCode::InvalidArgument, "unknown search method '" + method + "'");
        }
        std::vector<std::pair<std::string, double>> out;
        for (const auto& h : hits) {
            out.emplace_back(index_.doc(h.doc).doc_id, h.score);
        }
        return out;
    }

    const InvertedIndex& get() const { return index_; }

private:
    InvertedIndex index_;
};

class PyPipeline {
public:
    PyPipeline(const std::string& config_json, std::shared_ptr<Index> index)
        : cfg_(parse_config(config_json)), index_(std::move(index)) {
        if (cfg_.backends.stub_mode || !cfg_.backends.base_url.empty()) {
            client_ = make_client(cfg_.backends);
        }
        const bool wants_dense = std::any_of(cfg_.retrieval.retrievers.begin(), cfg_.retrieval.retrievers.end(),
                                             [](const RetrieverSpec& s) { return s.kind == RetrieverKind::Dense; });
        if (index_ && client_ && wants_dense) {
            embeddings_ = EmbeddingStore::build(index_->get(), *client_);
        }
        pipeline_ = std::make_unique<Pipeline>(cfg_, client_, index_ ? &index_->get() : nullptr,
                                               embeddings_ ? &*embeddings_ : nullptr);
    }

    std::string run(const std::string& claim_json) const {
        const auto claim = claim_from_json(json::parse(claim_json));
        py::gil_scoped_release release;
        return pipeline_->run(claim).to_json().dump();
    }

    std::string config() const { return to_json(cfg_).dump(); }

private:
    PipelineConfig cfg_;
    std::shared_ptr<Index> index_;
    std::shared_ptr<ModelClient> client_;
    std::optional<EmbeddingStore> embeddings_;
    std::unique_ptr<Pipeline> pipeline_;
};

std::string vote(const std::string& claim_id, const std::vector<std::tuple<std::string, std::string, double>>& votes,
                 const std::string& tie_break) {
    EnsembleConfig cfg;
    if (tie_break == "BY_PRIORITY") {
        cfg.tie_break = TieBreak::ByPriority;
    } else if (tie_break != "BY_SCORE") {
        fail(ErrorCode::InvalidArgument, "tie_break must be BY_SCORE or BY_PRIORITY");
    }
    std::vector<Vote> vs;
    for (const auto& [retriever, text, score] : votes) {
        cfg.members.push_back(retriever);
        Vote v;
        v.retriever = retriever;
        v.candidate.claim_id = claim_id;
        v.candidate.text = text;
        v.candidate.retriever = retriever;
        v.score = score;
        vs.push_back(std::move(v));
    }
    return majority_vote(claim_id, vs, cfg).to_json().dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "factfix native core";
    spdlog::set_level(spdlog::level::err);

    static py::exception<Error> error_type(m, "FactfixError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
            err.attr("code") = std::string(e.name());
            PyErr_SetObject(error_type.ptr(), err.ptr());
        } catch (const json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("normalize", [](const std::string& s) { return normalize(s).value(); });
    m.def("tokenize", [](const std::string& s) { return tokenize(s); });
    m.def("rouge_l", [](const std::string& ref, const std::string& cand) { return rouge_l(ref, cand); },
          py::arg("reference"), py::arg("candidate"));
    m.def("sari",
          [](const std::string& src, const std::string& pred, const std::vector<std::string>& refs) {
              return sari(src, pred, refs);
          },
          py::arg("source"), py::arg("prediction"), py::arg("references"));
    m.def("ndcg_at_10",
          [](const std::vector<std::string>& ranked, const std::map<std::string, int>& grades) {
              return ndcg_at_10(ranked, grades).value;
          },
          py::arg("ranked"), py::arg("grades"));
    m.def("combine", &combine, py::arg("lam"), py::arg("entailment"), py::arg("rouge_l"));
    m.def("mmr_rank",
          [](const std::vector<double>& rel, const std::vector<std::vector<double>>& sim, double alpha,
             std::size_t k) {
              std::vector<std::pair<std::size_t, double>> out;
              for (const auto& s : mmr_rank(rel, sim, alpha, k)) {
                  out.emplace_back(s.index, s.score);
              }
              return out;
          },
          py::arg("relevance"), py::arg("similarity"), py::arg("alpha"), py::arg("m"));
    m.def("majority_vote", &vote, py::arg("claim_id"), py::arg("votes"), py::arg("tie_break") = "BY_SCORE");
    m.def("heuristic_spans",
          [](const std::string& text) {
              std::vector<std::tuple<std::string, std::size_t, std::size_t>> out;
              for (const auto& s : heuristic_spans(text)) {
                  out.emplace_back(s.surface, s.char_start, s.char_end);
              }
              return out;
          },
          py::arg("text"));
    m.def("stub_handle",
          [](const std::string& path, const std::string& payload, std::uint64_t seed, int dim) {
              BackendProfile profile;
              profile.stub_mode = true;
              profile.stub_seed = seed;
              profile.stub_embedding_dim = dim;
              return stub::StubTransport(profile).handle(path, json::parse(payload)).dump();
          },
          py::arg("path"), py::arg("payload_json"), py::arg("seed") = 0, py::arg("dim") = 64);
    m.def("config_json", [](const std::string& text) { return to_json(parse_config(text)).dump(); },
          py::arg("config_json") = "");

    py::class_<Index, std::shared_ptr<Index>>(m, "Index")
        .def_static("from_corpus", &Index::from_corpus, py::arg("path"))
        .def_static("from_docs_json", &Index::from_docs, py::arg("docs_json"))
        .def_static("load", &Index::load, py::arg("dir"))
        .def("save_json", &Index::save, py::arg("dir"))
        .def_property_readonly("doc_count", &Index::doc_count)
        .def("search", &Index::search, py::arg("query"), py::arg("k") = 10, py::arg("method") = "bm25");

    py::class_<PyPipeline>(m, "Pipeline")
        .def(py::init<const std::string&, std::shared_ptr<Index>>(), py::arg("config_json"),
             py::arg("index") = nullptr, py::call_guard<py::gil_scoped_release>())
        .def("run_json", &PyPipeline::run, py::arg("claim_json"))
        .def("config_json", &PyPipeline::config);
}
