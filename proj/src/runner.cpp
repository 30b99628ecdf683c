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

#include "factfix/runner.hpp"

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "factfix/backends.hpp"
#include "factfix/error.hpp"
#include "factfix/io.hpp"

namespace factfix {

using nlohmann::json;
namespace fs = std::filesystem;

json RunCounts::to_json() const {
    return {{"claims", claims},
            {"corrected", corrected},
            {"unchanged", unchanged},
            {"fallbacks", fallbacks},
            {"backend_failures", backend_failures},
            {"errors", errors}};
}

json RunManifest::to_json() const {
    return {{"config_snapshot", config_snapshot},
            {"input_paths", input_paths},
            {"output_paths", output_paths},
            {"seed", seed},
            {"started_at", started_at},
            {"finished_at", finished_at},
            {"counts", counts.to_json()}};
}

namespace {

struct Job {
    std::size_t seq = 0;
    std::optional<Claim> claim;
    std::string parse_error;
    std::size_t line = 0;
};

struct Done {
    std::optional<Claim> claim;
    ClaimResult result;
};

ClaimResult parse_failure(const Job& job) {
    ClaimResult r;
    r.claim_id = "line-" + std::to_string(job.line);
    r.error = job.parse_error;
    return r;
}

}  // namespace

RunCounts run_stream(const Pipeline& pipeline, const std::string& claims_path, std::ostream& out, int workers,
                     const ResultSink& sink) {
    if (workers < 1) {
        fail(ErrorCode::InvalidArgument, "workers must be >= 1");
    }
    JsonlReader reader(claims_path);
    const std::size_t cap = static_cast<std::size_t>(workers) * 2;

    std::mutex mu;
    std::condition_variable work_ready;
    std::condition_variable result_ready;
    std::deque<Job> queue;
    std::map<std::size_t, Done> finished;
    std::size_t in_flight = 0;
    bool closed = false;

    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                Job job;
                {
                    std::unique_lock lock(mu);
                    work_ready.wait(lock, [&] { return closed || !queue.empty(); });
                    if (queue.empty()) {
                        return;
                    }
                    job = std::move(queue.front());
                    queue.pop_front();
                }
                Done done;
                done.result = job.claim ? pipeline.run(*job.claim) : parse_failure(job);
                done.claim = std::move(job.claim);
                {
                    std::lock_guard lock(mu);
                    finished.emplace(job.seq, std::move(done));
                }
                result_ready.notify_all();
            }
        });
    }

    RunCounts counts;
    std::size_t next_to_write = 0;
    const auto write_one = [&](Done& done) {
        const auto& r = done.result;
        out << jsonl_line(r.to_json());
        ++counts.claims;
        if (r.error) {
            ++counts.errors;
        }
        if (r.changed()) {
            ++counts.corrected;
        } else {
            ++counts.unchanged;
        }
        counts.fallbacks += r.fallbacks();
        counts.backend_failures += r.backend_failures();
        if (sink) {
            sink(done.claim ? &*done.claim : nullptr, r);
        }
    };
    // Writes every finished result that is next in order. Caller holds no lock.
    const auto drain = [&](bool wait_for_one) {
        std::vector<Done> ready;
        {
            std::unique_lock lock(mu);
            if (wait_for_one) {
                result_ready.wait(lock, [&] { return finished.count(next_to_write) != 0; });
            }
            while (true) {
                const auto it = finished.find(next_to_write);
                if (it == finished.end()) {
                    break;
                }
                ready.push_back(std::move(it->second));
                finished.erase(it);
                ++next_to_write;
                --in_flight;
            }
        }
        for (auto& d : ready) {
            write_one(d);
        }
    };

    std::size_t seq = 0;
    try {
        while (true) {
            Job job;
            job.seq = seq;
            try {
                auto j = reader.next();
                if (!j) {
                    break;
                }
                job.line = reader.line_number();
                job.claim = claim_from_json(*j);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::IoFailure) {
                    throw;
                }
                job.line = reader.line_number();
                job.parse_error = std::string(e.name()) + ": " + e.what();
            }
            {
                std::lock_guard lock(mu);
                queue.push_back(std::move(job));
                ++in_flight;
            }
            work_ready.notify_one();
            ++seq;
            drain(false);
            while (true) {
                {
                    std::lock_guard lock(mu);
                    if (in_flight < cap) {
                        break;
                    }
                }
                drain(true);
            }
        }
        while (next_to_write < seq) {
            drain(true);
        }
    } catch (...) {
        {
            std::lock_guard lock(mu);
            closed = true;
            queue.clear();
        }
        work_ready.notify_all();
        for (auto& t : pool) {
            t.join();
        }
        throw;
    }
    {
        std::lock_guard lock(mu);
        closed = true;
    }
    work_ready.notify_all();
    for (auto& t : pool) {
        t.join();
    }
    return counts;
}

RunManifest run_to_file(const Pipeline& pipeline, const std::string& claims_path, const std::string& out_path,
                        int workers, std::map<std::string, std::string> inputs) {
    RunManifest manifest;
    manifest.config_snapshot = to_json(pipeline.config());
    manifest.seed = pipeline.config().masking.seed;
    manifest.started_at = utc_timestamp();
    inputs["claims"] = claims_path;
    manifest.input_paths = std::move(inputs);

    if (const auto parent = fs::path(out_path).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    const auto tmp = out_path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorCode::IoFailure, "cannot write '" + tmp + "'");
        }
        manifest.counts = run_stream(pipeline, claims_path, out, workers);
        out.flush();
        if (!out) {
            fail(ErrorCode::IoFailure, "write to '" + tmp + "' failed");
        }
    }
    fs::rename(tmp, out_path);

    const auto manifest_path = out_path + ".manifest.json";
    manifest.output_paths = {out_path, manifest_path};
    manifest.finished_at = utc_timestamp();
    write_file(manifest_path, manifest.to_json().dump(2) + "\n");
    return manifest;
}

std::vector<EvalRecord> eval_records(const std::string& claims_path, const std::string& predictions_path) {
    std::map<std::string, Claim> gold;
    for (auto& c : read_claims(claims_path)) {
        gold.emplace(c.id, std::move(c));
    }
    std::vector<EvalRecord> records;
    JsonlReader reader(predictions_path);
    while (auto j = reader.next()) {
        EvalRecord r;
        r.claim_id = j->value("claim_id", "");
        r.prediction = j->value("final_text", "");
        if (const auto it = gold.find(r.claim_id); it != gold.end()) {
            r.source = it->second.text;
            r.reference = it->second.gold_correction.value_or("");
            r.label = it->second.label;
        }
        if (j->contains("bartscore") && (*j)["bartscore"].is_number()) {
            r.bartscore = (*j)["bartscore"].get<double>();
        }
        records.push_back(std::move(r));
    }
    return records;
}

RunRankings evidence_rankings(const std::string& predictions_path, const std::string& retriever) {
    RunRankings out;
    JsonlReader reader(predictions_path);
    while (auto j = reader.next()) {
        const auto id = j->value("claim_id", "");
        const auto it = j->find("per_retriever");
        if (it == j->end() || !it->is_array()) {
            continue;
        }
        for (const auto& r : *it) {
            if (!retriever.empty() && r.value("retriever", "") != retriever) {
                continue;
            }
            auto& ranked = out[id];
            for (const auto& e : r.value("evidence", json::array())) {
                ranked.push_back(e.value("doc_id", ""));
            }
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::string GridPoint::label() const {
    std::string out;
    for (const auto& [axis, value] : values) {
        if (!out.empty()) {
            out += ';';
        }
        out += axis + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
    }
    return out.empty() ? "default" : out;
}

namespace {

std::vector<json> subsets(const std::vector<std::string>& pool, std::size_t k) {
    std::vector<json> out;
    if (k == 0 || k > pool.size()) {
        return out;
    }
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) {
        idx[i] = i;
    }
    while (true) {
        json subset = json::array();
        for (const auto i : idx) {
            subset.push_back(pool[i]);
        }
        out.push_back(std::move(subset));
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == pool.size() - k + pos - 1) {
            --pos;
        }
        if (pos == 0) {
            break;
        }
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) {
            idx[i] = idx[i - 1] + 1;
        }
    }
    return out;
}

std::vector<json> axis_values(const std::string& axis, const json& spec) {
    if (axis == "retrievers" && spec.is_object()) {
        try {
            return subsets(spec.at("from").get<std::vector<std::string>>(), spec.at("choose").get<std::size_t>());
        } catch (const json::exception& e) {
            fail(ErrorCode::InvalidConfig, std::string("grid axis 'retrievers': ") + e.what());
        }
    }
    if (!spec.is_array() || spec.empty()) {
        fail(ErrorCode::InvalidConfig, "grid axis '" + axis + "' must be a non-empty list");
    }
    return {spec.begin(), spec.end()};
}

}  // namespace

std::vector<GridPoint> expand_grid(const json& grid) {
    if (!grid.is_null() && !grid.is_object()) {
        fail(ErrorCode::InvalidConfig, "grid must be a JSON object");
    }
    std::vector<std::pair<std::string, std::vector<json>>> axes;
    if (grid.is_object()) {
        for (const auto& [key, value] : grid.items()) {
            if (std::find_if(std::begin(kSweepAxes), std::end(kSweepAxes),
                             [&](const char* a) { return key == a; }) == std::end(kSweepAxes)) {
                fail(ErrorCode::InvalidConfig, "unknown grid axis '" + key + "'");
            }
        }
        for (const char* axis : kSweepAxes) {
            if (const auto it = grid.find(axis); it != grid.end()) {
                axes.emplace_back(axis, axis_values(axis, *it));
            }
        }
    }
    std::vector<GridPoint> points{GridPoint{}};
    for (const auto& [axis, values] : axes) {
        std::vector<GridPoint> next;
        for (const auto& p : points) {
            for (const auto& v : values) {
                auto q = p;
                q.values.emplace_back(axis, v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::ostringstream id;
        id << "point-" << std::setw(3) << std::setfill('0') << i;
        points[i].id = id.str();
    }
    return points;
}

PipelineConfig apply_point(const PipelineConfig& base, const GridPoint& point) {
    auto cfg = base;
    try {
        for (const auto& [axis, v] : point.values) {
            if (axis == "mode") {
                const auto mode = parse_mode(v.get<std::string>());
                if (!mode) {
                    fail(ErrorCode::InvalidConfig, "unknown mode " + v.dump());
                }
                cfg.mode = *mode;
            } else if (axis == "strategy") {
                const auto strategy = parse_mask_strategy(v.get<std::string>());
                if (!strategy) {
                    fail(ErrorCode::InvalidConfig, "unknown strategy " + v.dump());
                }
                cfg.masking.strategy = *strategy;
            } else if (axis == "p") {
                for (auto& spec : cfg.retrieval.retrievers) {
                    spec.context_size = v.get<int>();
                    spec.pool_size = std::max(spec.pool_size, spec.context_size);
                }
            } else if (axis == "alpha") {
                cfg.masking.alpha = v.get<double>();
            } else if (axis == "m") {
                cfg.masking.max_masks = v.get<int>();
            } else if (axis == "rm_mask_ratio") {
                cfg.masking.rm_mask_ratio = v.get<double>();
            } else if (axis == "lambda") {
                cfg.scoring.lambda = v.get<double>();
            } else if (axis == "retrievers") {
                cfg.ensemble.members = v.get<std::vector<std::string>>();
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidConfig, "grid point " + point.label() + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

std::vector<SweepRow> run_sweep(const PipelineConfig& base, const json& grid, const std::string& claims_path,
                                const std::string& out_dir, int workers, const InvertedIndex* index,
                                const EmbeddingStore* embeddings, const ClientFactory& clients) {
    fs::create_directories(out_dir);
    std::vector<SweepRow> rows;
    for (const auto& point : expand_grid(grid)) {
        SweepRow row;
        row.point = point;
        const auto dir = (fs::path(out_dir) / point.id).string();
        try {
            const auto cfg = apply_point(base, point);
            Pipeline pipeline(cfg, clients(cfg), index, embeddings);
            fs::create_directories(dir);
            const auto predictions = (fs::path(dir) / "predictions.jsonl").string();
            row.counts = run_to_file(pipeline, claims_path, predictions, workers, {{"grid_point", point.label()}}).counts;
            row.report = evaluate(eval_records(claims_path, predictions));
            write_file((fs::path(dir) / "report.json").string(), row.report.to_json().dump(2) + "\n");
            row.status = "ok";
        } catch (const Error& e) {
            spdlog::warn("sweep point {} ({}) failed: {}", point.id, point.label(), e.what());
            row.status = std::string(e.name()) + ": " + e.what();
        }
        rows.push_back(std::move(row));
    }
    write_file((fs::path(out_dir) / "sweep.csv").string(), sweep_csv(rows));
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::vector<std::string> axes;
    for (const char* axis : kSweepAxes) {
        for (const auto& row : rows) {
            const bool present = std::any_of(row.point.values.begin(), row.point.values.end(),
                                             [&](const auto& kv) { return kv.first == axis; });
            if (present) {
                axes.emplace_back(axis);
                break;
            }
        }
    }
    const auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string q = "\"";
        for (const char c : s) {
            q += c == '"' ? std::string("\"\"") : std::string(1, c);
        }
        return q + "\"";
    };
    const auto num = [](const std::optional<double>& v) {
        if (!v) {
            return std::string();
        }
        std::ostringstream out;
        out << std::setprecision(10) << *v;
        return out.str();
    };
    std::ostringstream out;
    out << "point";
    for (const auto& a : axes) {
        out << ',' << a;
    }
    out << ",status,claims,included,sari,rouge_l\n";
    for (const auto& row : rows) {
        out << row.point.id;
        for (const auto& a : axes) {
            std::string cell;
            for (const auto& [axis, v] : row.point.values) {
                if (axis == a) {
                    cell = v.is_string() ? v.get<std::string>() : v.dump();
                }
            }
            out << ',' << quote(cell);
        }
        out << ',' << quote(row.status) << ',' << row.counts.claims << ',' << row.report.included << ','
            << num(row.report.sari_mean) << ',' << num(row.report.rouge_l_mean) << '\n';
    }
    return out.str();
}

}  // namespace factfix
