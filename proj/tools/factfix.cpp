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

// factfix command line: index, run, sweep, eval.
//
// Exit codes: 0 ok, 1 other failure, 2 CorpusNotFound, 3 DuplicateDocId,
// 64 usage error. Failures print one JSON line {"error", "message"} to stderr.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "factfix/backends.hpp"
#include "factfix/config.hpp"
#include "factfix/error.hpp"
#include "factfix/evaluation.hpp"
#include "factfix/io.hpp"
#include "factfix/pipeline.hpp"
#include "factfix/retrieval.hpp"
#include "factfix/runner.hpp"

namespace {

using namespace factfix;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kUsageExit = 64;

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::CorpusNotFound:
            return 2;
        case ErrorCode::DuplicateDocId:
            return 3;
        default:
            return 1;
    }
}

void report_error(std::string_view name, std::string_view message) {
    std::cerr << json{{"error", name}, {"message", message}}.dump() << std::endl;
}

struct Options {
    std::string config;
    std::string claims;
    std::string corpus;
    std::string index_dir;
    std::string out;
    std::string mode;
    std::optional<std::uint64_t> seed;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string grid;
    std::string qrels;
    std::string retriever;
    std::string report;
    bool verbose = false;
};

PipelineConfig resolve_config(const Options& opt) {
    auto cfg = opt.config.empty() ? default_config() : load_config(opt.config);
    cfg.backends = apply_environment(cfg.backends);
    if (!opt.mode.empty()) {
        const auto mode = parse_mode(opt.mode);
        if (!mode) {
            fail(ErrorCode::InvalidArgument, "unknown mode '" + opt.mode + "'");
        }
        cfg.mode = *mode;
    }
    if (opt.seed) {
        cfg.masking.seed = *opt.seed;
        cfg.backends.stub_seed = *opt.seed;
    }
    cfg.validate();
    return cfg;
}

bool client_configured(const BackendProfile& profile) {
    return profile.stub_mode || !profile.base_url.empty();
}

/// Index and embedding store for a run: loaded from --index-dir, or built in
/// memory from --corpus.
struct Resources {
    std::optional<InvertedIndex> index;
    std::optional<EmbeddingStore> embeddings;
};

Resources load_resources(const Options& opt, const PipelineConfig& cfg, ModelClient& client) {
    Resources res;
    if (!opt.index_dir.empty()) {
        res.index = InvertedIndex::load(opt.index_dir);
        if (EmbeddingStore::exists(opt.index_dir)) {
            res.embeddings = EmbeddingStore::load(opt.index_dir);
        }
    } else if (!opt.corpus.empty()) {
        const auto docs = read_corpus(opt.corpus);
        res.index = InvertedIndex::build(docs);
        const bool wants_dense = std::any_of(cfg.retrieval.retrievers.begin(), cfg.retrieval.retrievers.end(),
                                             [](const RetrieverSpec& s) { return s.kind == RetrieverKind::Dense; });
        if (wants_dense) {
            res.embeddings = EmbeddingStore::build(*res.index, client);
        }
    } else if (cfg.mode != Mode::ZeroShot) {
        fail(ErrorCode::IndexNotLoaded, std::string("mode ") + std::string(to_string(cfg.mode)) +
                                            " needs --index-dir or --corpus");
    }
    return res;
}

int cmd_index(const Options& opt) {
    if (opt.corpus.empty() || opt.index_dir.empty()) {
        fail(ErrorCode::InvalidArgument, "index needs --corpus and --index-dir");
    }
    const auto cfg = resolve_config(opt);
    const auto docs = read_corpus(opt.corpus);
    const auto index = InvertedIndex::build(docs);
    const auto manifest = index.save(opt.index_dir);
    json summary = manifest.to_json();
    if (client_configured(cfg.backends)) {
        const auto client = make_client(cfg.backends);
        EmbeddingStore::build(index, *client).save(opt.index_dir);
        summary["embeddings"] = true;
    } else {
        spdlog::info("no model backend configured; skipping the embedding store");
        summary["embeddings"] = false;
    }
    std::cout << summary.dump() << std::endl;
    return 0;
}

int cmd_run(const Options& opt) {
    if (opt.claims.empty() || opt.out.empty()) {
        fail(ErrorCode::InvalidArgument, "run needs --claims and --out");
    }
    const auto cfg = resolve_config(opt);
    const auto client = make_client(cfg.backends);
    auto res = load_resources(opt, cfg, *client);
    Pipeline pipeline(cfg, client, res.index ? &*res.index : nullptr, res.embeddings ? &*res.embeddings : nullptr);
    std::map<std::string, std::string> inputs;
    if (!opt.config.empty()) {
        inputs["config"] = opt.config;
    }
    if (!opt.index_dir.empty()) {
        inputs["index_dir"] = opt.index_dir;
    }
    if (!opt.corpus.empty()) {
        inputs["corpus"] = opt.corpus;
    }
    const auto manifest = run_to_file(pipeline, opt.claims, opt.out, opt.workers, std::move(inputs));
    std::cout << manifest.counts.to_json().dump() << std::endl;
    return 0;
}

int cmd_sweep(const Options& opt) {
    if (opt.claims.empty() || opt.out.empty()) {
        fail(ErrorCode::InvalidArgument, "sweep needs --claims and --out");
    }
    const auto cfg = resolve_config(opt);
    json grid = json::object();
    if (!opt.grid.empty()) {
        try {
            grid = json::parse(read_file(opt.grid));
        } catch (const json::exception& e) {
            fail(ErrorCode::InvalidConfig, "grid '" + opt.grid + "': " + e.what());
        }
    }
    expand_grid(grid);  // reject a malformed grid before any work
    const auto client = make_client(cfg.backends);
    auto res = load_resources(opt, cfg, *client);
    const auto rows = run_sweep(
        cfg, grid, opt.claims, opt.out, opt.workers, res.index ? &*res.index : nullptr,
        res.embeddings ? &*res.embeddings : nullptr, [&](const PipelineConfig&) { return client; });
    std::size_t failed = 0;
    for (const auto& row : rows) {
        failed += row.status != "ok";
    }
    std::cout << json{{"points", rows.size()}, {"failed", failed}, {"csv", (fs::path(opt.out) / "sweep.csv").string()}}
                     .dump()
              << std::endl;
    return 0;
}

int cmd_eval(const Options& opt) {
    if (opt.claims.empty() || opt.out.empty()) {
        fail(ErrorCode::InvalidArgument, "eval needs --claims and --run");
    }
    const auto records = eval_records(opt.claims, opt.out);
    std::optional<Qrels> qrels;
    std::optional<RunRankings> rankings;
    if (!opt.qrels.empty()) {
        qrels = read_qrels(opt.qrels);
        rankings = evidence_rankings(opt.out, opt.retriever);
    }
    const auto report = evaluate(records, rankings ? &*rankings : nullptr, qrels ? &*qrels : nullptr);
    std::cout << report.to_text();
    if (!opt.report.empty()) {
        write_file(opt.report, report.to_json().dump(2) + "\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"factfix: training-free claim correction"};
    app.require_subcommand(1);
    Options opt;
    app.add_flag("-v,--verbose", opt.verbose, "Debug logging");

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "Pipeline config (JSON)");
        sub->add_option("--seed", opt.seed, "Masking and stub seed");
    };

    auto* index = app.add_subcommand("index", "Build the inverted index and embedding store");
    common(index);
    index->add_option("--corpus", opt.corpus, "Corpus JSONL {doc_id, text, title?}")->required();
    index->add_option("--index-dir", opt.index_dir, "Output directory")->required();

    auto* run = app.add_subcommand("run", "Correct a claim file");
    common(run);
    run->add_option("--claims", opt.claims, "Claims JSONL")->required();
    run->add_option("--out", opt.out, "Predictions JSONL")->required();
    run->add_option("--index-dir", opt.index_dir, "Index built by 'index'");
    run->add_option("--corpus", opt.corpus, "Corpus JSONL indexed in memory");
    run->add_option("--mode", opt.mode, "ZERO_SHOT, RAG, M2C, M2C_WITH_VERIFY or M2C_PLUS");
    run->add_option("--workers", opt.workers, "Claims processed in parallel")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "Run a hyperparameter grid");
    common(sweep);
    sweep->add_option("--claims", opt.claims, "Claims JSONL with gold corrections")->required();
    sweep->add_option("--grid", opt.grid, "Grid JSON");
    sweep->add_option("--out", opt.out, "Output directory")->required();
    sweep->add_option("--index-dir", opt.index_dir, "Index built by 'index'");
    sweep->add_option("--corpus", opt.corpus, "Corpus JSONL indexed in memory");
    sweep->add_option("--mode", opt.mode, "Base mode");
    sweep->add_option("--workers", opt.workers, "Claims processed in parallel")->check(CLI::PositiveNumber);

    auto* eval = app.add_subcommand("eval", "Score a run against gold corrections");
    eval->add_option("--claims", opt.claims, "Claims JSONL with gold corrections")->required();
    eval->add_option("--run,--predictions", opt.out, "Predictions JSONL from 'run'")->required();
    eval->add_option("--qrels", opt.qrels, "TREC qrels for nDCG@10 of the evidence rankings");
    eval->add_option("--retriever", opt.retriever, "Retriever whose evidence is ranked (default: first)");
    eval->add_option("--out", opt.report, "Report JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("UsageError", e.what());
        return kUsageExit;
    }

    spdlog::set_default_logger(spdlog::stderr_color_mt("factfix"));
    spdlog::set_level(opt.verbose ? spdlog::level::debug : spdlog::level::warn);

    try {
        if (*index) {
            return cmd_index(opt);
        }
        if (*run) {
            return cmd_run(opt);
        }
        if (*sweep) {
            return cmd_sweep(opt);
        }
        return cmd_eval(opt);
    } catch (const Error& e) {
        report_error(e.name(), e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        report_error("InternalError", e.what());
        return 1;
    }
}
