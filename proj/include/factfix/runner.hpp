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

// Batch drivers: streaming claim runs and hyperparameter sweeps.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "factfix/config.hpp"
#include "factfix/evaluation.hpp"
#include "factfix/pipeline.hpp"

namespace factfix {

struct RunCounts {
    std::size_t claims = 0;
    std::size_t corrected = 0;
    std::size_t unchanged = 0;
    std::size_t fallbacks = 0;
    std::size_t backend_failures = 0;
    std::size_t errors = 0;

    nlohmann::json to_json() const;
};

struct RunManifest {
    nlohmann::json config_snapshot;
    std::map<std::string, std::string> input_paths;
    std::vector<std::string> output_paths;
    std::uint64_t seed = 0;
    std::string started_at;
    std::string finished_at;
    RunCounts counts;

    nlohmann::json to_json() const;
};

/// Called on the writer thread, in input order.
using ResultSink = std::function<void(const Claim* claim, const ClaimResult& result)>;

/// Reads claims from a JSONL file lazily and runs them on `workers` threads
/// with at most 2 * workers claims in flight. Lines are written to `out` in
/// input order. A record that fails to parse becomes an error line.
RunCounts run_stream(const Pipeline& pipeline, const std::string& claims_path, std::ostream& out, int workers,
                     const ResultSink& sink = {});

/// run_stream into out_path plus "<out_path>.manifest.json".
RunManifest run_to_file(const Pipeline& pipeline, const std::string& claims_path, const std::string& out_path,
                        int workers, std::map<std::string, std::string> inputs = {});

/// Gold-bearing evaluation records from a claim file and a run output.
std::vector<EvalRecord> eval_records(const std::string& claims_path, const std::string& predictions_path);

/// Evidence rankings of one retriever from a run output, keyed by claim id.
/// An empty name takes the first retriever of every record.
RunRankings evidence_rankings(const std::string& predictions_path, const std::string& retriever = {});

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Axes in expansion order; the last varies fastest.
inline constexpr const char* kSweepAxes[] = {"mode", "strategy", "p", "alpha", "m", "rm_mask_ratio", "lambda",
                                             "retrievers"};

struct GridPoint {
    std::string id;  // "point-000"
    std::vector<std::pair<std::string, nlohmann::json>> values;

    std::string label() const;
};

/// Each axis is a list of values. "retrievers" also accepts
/// {"choose": k, "from": [...]} for every k-subset in lexicographic order.
/// An empty grid yields one point with no values. Throws InvalidConfig.
std::vector<GridPoint> expand_grid(const nlohmann::json& grid);

/// Applies a point to a copy of the base config and validates it.
PipelineConfig apply_point(const PipelineConfig& base, const GridPoint& point);

struct SweepRow {
    GridPoint point;
    std::string status;  // "ok" or the error
    RunCounts counts;
    EvalReport report;
};

using ClientFactory = std::function<std::shared_ptr<ModelClient>(const PipelineConfig&)>;

/// One directory per point under out_dir holding predictions.jsonl, its
/// manifest and report.json, plus out_dir/sweep.csv. Failing points are
/// recorded and skipped.
std::vector<SweepRow> run_sweep(const PipelineConfig& base, const nlohmann::json& grid, const std::string& claims_path,
                                const std::string& out_dir, int workers, const InvertedIndex* index,
                                const EmbeddingStore* embeddings, const ClientFactory& clients);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace factfix
