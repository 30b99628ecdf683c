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

// Client layer for the model endpoints (/embed, /entail, /generate, /rerank, /spans).
//
// Every request goes through ModelClient::call, which bounds in-flight
// requests per endpoint and retries transport failures with exponential
// backoff (backoff_ms, 2*backoff_ms, ...). Schema violations are never retried.
// The transport is pluggable: HttpTransport talks to a shim over HTTP,
// StubTransport answers in-process with the deterministic rules in stub.hpp.

#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "factfix/config.hpp"
#include "factfix/types.hpp"

namespace factfix {

enum class Endpoint { Embed, Entail, Generate, Rerank, Spans };

inline constexpr std::array<Endpoint, 5> kAllEndpoints = {
    Endpoint::Embed, Endpoint::Entail, Endpoint::Generate, Endpoint::Rerank, Endpoint::Spans};

std::string_view endpoint_path(Endpoint endpoint) noexcept;

struct HttpResponse {
    int status = 200;
    std::string body;
};

/// Connection-level failure (refused, reset, timed out). Retryable.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(std::string_view path, const std::string& body,
                              std::chrono::milliseconds timeout) = 0;
};

class HttpTransport final : public Transport {
public:
    explicit HttpTransport(std::string base_url);
    HttpResponse post(std::string_view path, const std::string& body,
                      std::chrono::milliseconds timeout) override;

private:
    std::string base_url_;
};

/// Wraps a callable; tests use it to script failures and replies.
class FunctionTransport final : public Transport {
public:
    using Handler = std::function<HttpResponse(std::string_view path, const nlohmann::json& payload)>;
    explicit FunctionTransport(Handler handler) : handler_(std::move(handler)) {}
    HttpResponse post(std::string_view path, const std::string& body,
                      std::chrono::milliseconds timeout) override;

private:
    Handler handler_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

class ModelClient {
public:
    ModelClient(BackendProfile profile, std::shared_ptr<Transport> transport, Sleeper sleeper = {});

    ModelClient(const ModelClient&) = delete;
    ModelClient& operator=(const ModelClient&) = delete;

    /// Raw JSON round trip. Throws ServiceUnavailable after the retry budget
    /// is spent, MalformedResponse on a non-JSON body or 4xx status.
    nlohmann::json call(Endpoint endpoint, const nlohmann::json& payload);

    /// Batched by profile.embed_batch. Throws EmbeddingServiceUnavailable.
    std::vector<std::vector<float>> embed(std::span<const std::string> texts);
    /// Raw service value, unclamped. Throws EntailmentServiceUnavailable.
    double entail(const std::string& premise, const std::string& hypothesis);
    /// Throws GenerationServiceUnavailable.
    std::string generate(const std::string& prompt, const GenerationParams& params);
    /// One score per doc. Throws RerankServiceUnavailable, MalformedScores.
    std::vector<double> rerank(const std::string& query, std::span<const std::string> docs,
                               const std::optional<std::string>& model = std::nullopt);
    /// Throws SpanProviderUnavailable.
    std::vector<SpanCandidate> spans(const std::string& text);

    const BackendProfile& profile() const noexcept { return profile_; }

private:
    struct Limiter {
        explicit Limiter(int n) : sem(n) {}
        std::counting_semaphore<4096> sem;
    };

    BackendProfile profile_;
    std::shared_ptr<Transport> transport_;
    Sleeper sleeper_;
    std::array<std::unique_ptr<Limiter>, kAllEndpoints.size()> limiters_;
};

/// Stub transport when profile.stub_mode, otherwise HTTP against profile.base_url.
std::shared_ptr<ModelClient> make_client(const BackendProfile& profile);

/// Applies FACTFIX_SHIM_URL and FACTFIX_TIMEOUT_MS on top of a profile.
BackendProfile apply_environment(BackendProfile profile);

}  // namespace factfix
