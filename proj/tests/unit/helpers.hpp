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

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>

#include <unistd.h>

#include "doctest.h"

#include "factfix/backends.hpp"
#include "factfix/config.hpp"
#include "factfix/error.hpp"
#include "factfix/io.hpp"
#include "factfix/retrieval.hpp"
#include "factfix/stub.hpp"

namespace testutil {

inline std::string fixture(const std::string& name) { return std::string(FACTFIX_FIXTURES) + "/" + name; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("factfix-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline factfix::PipelineConfig stub_config() {
    auto cfg = factfix::default_config();
    cfg.backends.stub_mode = true;
    cfg.backends.retry.backoff_ms = 0;
    return cfg;
}

inline std::shared_ptr<factfix::ModelClient> stub_client(const factfix::BackendProfile& profile = stub_config().backends) {
    return factfix::make_client(profile);
}

/// A client whose transport runs `handler`, falling back to the stub for
/// paths the handler declines by returning status 0.
inline std::shared_ptr<factfix::ModelClient> scripted_client(factfix::FunctionTransport::Handler handler,
                                                             factfix::BackendProfile profile = stub_config().backends) {
    auto stub = std::make_shared<factfix::stub::StubTransport>(profile);
    auto transport = std::make_shared<factfix::FunctionTransport>(
        [handler = std::move(handler), stub](std::string_view path, const nlohmann::json& payload) {
            auto r = handler(path, payload);
            if (r.status == 0) {
                return factfix::HttpResponse{200, stub->handle(path, payload).dump()};
            }
            return r;
        });
    return std::make_shared<factfix::ModelClient>(profile, transport, [](std::chrono::milliseconds) {});
}

struct Resources {
    factfix::InvertedIndex index;
    factfix::EmbeddingStore embeddings;
};

/// Index and stub embeddings over the fixture corpus, built once.
inline const Resources& resources() {
    static const Resources r = [] {
        const auto docs = factfix::read_corpus(fixture("corpus.jsonl"));
        auto index = factfix::InvertedIndex::build(docs);
        auto emb = factfix::EmbeddingStore::build(index, *stub_client());
        return Resources{std::move(index), std::move(emb)};
    }();
    return r;
}

template <typename F>
factfix::ErrorCode error_code_of(F&& f) {
    try {
        f();
    } catch (const factfix::Error& e) {
        return e.code();
    }
    FAIL("expected a factfix::Error");
    return factfix::ErrorCode::InvalidArgument;
}

}  // namespace testutil
