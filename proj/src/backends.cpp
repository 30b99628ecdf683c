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

#include "factfix/backends.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"

#include "factfix/error.hpp"
#include "factfix/stub.hpp"

namespace factfix {

using nlohmann::json;

std::string_view endpoint_path(Endpoint endpoint) noexcept {
    switch (endpoint) {
        case Endpoint::Embed: return "/embed";
        case Endpoint::Entail: return "/entail";
        case Endpoint::Generate: return "/generate";
        case Endpoint::Rerank: return "/rerank";
        case Endpoint::Spans: return "/spans";
    }
    return "/";
}

HttpTransport::HttpTransport(std::string base_url) : base_url_(std::move(base_url)) {
    while (!base_url_.empty() && base_url_.back() == '/') {
        base_url_.pop_back();
    }
}

HttpResponse HttpTransport::post(std::string_view path, const std::string& body,
                                 std::chrono::milliseconds timeout) {
    // Split "http://host:port/prefix" into the origin httplib wants and a path prefix.
    std::string origin = base_url_;
    std::string prefix;
    if (const auto scheme = base_url_.find("://"); scheme != std::string::npos) {
        if (const auto slash = base_url_.find('/', scheme + 3); slash != std::string::npos) {
            origin = base_url_.substr(0, slash);
            prefix = base_url_.substr(slash);
        }
    }
    httplib::Client client(origin);
    const auto secs = timeout.count() / 1000;
    const auto usecs = (timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    auto result = client.Post(prefix + std::string(path), body, "application/json");
    if (!result) {
        throw TransportError("POST " + prefix + std::string(path) + " failed: " +
                             httplib::to_string(result.error()));
    }
    return {result->status, result->body};
}

HttpResponse FunctionTransport::post(std::string_view path, const std::string& body,
                                     std::chrono::milliseconds /*timeout*/) {
    return handler_(path, json::parse(body));
}

ModelClient::ModelClient(BackendProfile profile, std::shared_ptr<Transport> transport, Sleeper sleeper)
    : profile_(std::move(profile)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
    profile_.validate();
    if (!sleeper_) {
        sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
    for (auto& limiter : limiters_) {
        limiter = std::make_unique<Limiter>(profile_.max_in_flight);
    }
}

json ModelClient::call(Endpoint endpoint, const json& payload) {
    auto& limiter = *limiters_[static_cast<std::size_t>(endpoint)];
    limiter.sem.acquire();
    struct Release {
        Limiter& l;
        ~Release() { l.sem.release(); }
    } release{limiter};

    const auto path = endpoint_path(endpoint);
    const auto body = payload.dump();
    std::string last_error;
    for (int attempt = 1; attempt <= profile_.retry.attempts; ++attempt) {
        HttpResponse response;
        bool transport_failed = false;
        try {
            response = transport_->post(path, body, std::chrono::milliseconds(profile_.timeout_ms));
            if (response.status >= 500) {
                transport_failed = true;
                last_error = "HTTP " + std::to_string(response.status);
            }
        } catch (const TransportError& e) {
            transport_failed = true;
            last_error = e.what();
        }
        if (transport_failed) {
            if (attempt < profile_.retry.attempts) {
                const auto delay = static_cast<long long>(profile_.retry.backoff_ms) << (attempt - 1);
                sleeper_(std::chrono::milliseconds(delay));
            }
            continue;
        }
        if (response.status >= 400) {
            fail(ErrorCode::MalformedResponse, std::string(path) + " rejected the request: HTTP " +
                                                   std::to_string(response.status) + " " + response.body);
        }
        try {
            auto parsed = json::parse(response.body);
            if (!parsed.is_object()) {
                fail(ErrorCode::MalformedResponse, std::string(path) + " returned a non-object body");
            }
            return parsed;
        } catch (const json::parse_error& e) {
            fail(ErrorCode::MalformedResponse, std::string(path) + " returned invalid JSON: " + e.what());
        }
    }
    fail(ErrorCode::ServiceUnavailable, std::string(path) + " unavailable after " +
                                            std::to_string(profile_.retry.attempts) + " attempt(s): " + last_error);
}

namespace {

template <typename F>
auto with_code(ErrorCode unavailable, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ServiceUnavailable) {
            throw Error(unavailable, e.what());
        }
        throw;
    }
}

const json& field(const json& j, const char* key, std::string_view path) {
    const auto it = j.find(key);
    if (it == j.end()) {
        fail(ErrorCode::MalformedResponse, std::string(path) + " response lacks '" + key + "'");
    }
    return *it;
}

}  // namespace

std::vector<std::vector<float>> ModelClient::embed(std::span<const std::string> texts) {
    return with_code(ErrorCode::EmbeddingServiceUnavailable, [&] {
        std::vector<std::vector<float>> out;
        out.reserve(texts.size());
        const auto batch = static_cast<std::size_t>(profile_.embed_batch);
        for (std::size_t begin = 0; begin < texts.size(); begin += batch) {
            const auto end = std::min(texts.size(), begin + batch);
            json request = {{"texts", json::array()}};
            for (auto i = begin; i < end; ++i) {
                request["texts"].push_back(texts[i]);
            }
            const auto response = call(Endpoint::Embed, request);
            const auto& vectors = field(response, "vectors", "/embed");
            if (!vectors.is_array() || vectors.size() != end - begin) {
                fail(ErrorCode::MalformedResponse, "/embed returned a vector count different from the text count");
            }
            for (const auto& v : vectors) {
                if (!v.is_array() || v.empty()) {
                    fail(ErrorCode::MalformedResponse, "/embed returned an empty or non-array vector");
                }
                std::vector<float> row;
                row.reserve(v.size());
                for (const auto& x : v) {
                    if (!x.is_number()) {
                        fail(ErrorCode::MalformedResponse, "/embed returned a non-numeric component");
                    }
                    row.push_back(x.get<float>());
                }
                out.push_back(std::move(row));
            }
        }
        return out;
    });
}

double ModelClient::entail(const std::string& premise, const std::string& hypothesis) {
    return with_code(ErrorCode::EntailmentServiceUnavailable, [&] {
        const auto response = call(Endpoint::Entail, {{"premise", premise}, {"hypothesis", hypothesis}});
        const auto& value = field(response, "entailment", "/entail");
        if (!value.is_number()) {
            fail(ErrorCode::MalformedResponse, "/entail returned a non-numeric entailment");
        }
        return value.get<double>();
    });
}

std::string ModelClient::generate(const std::string& prompt, const GenerationParams& params) {
    return with_code(ErrorCode::GenerationServiceUnavailable, [&] {
        const auto response = call(Endpoint::Generate, {{"prompt", prompt},
                                                        {"max_tokens", params.max_tokens},
                                                        {"temperature", params.temperature}});
        const auto& text = field(response, "text", "/generate");
        if (!text.is_string()) {
            fail(ErrorCode::MalformedResponse, "/generate returned a non-string text");
        }
        return text.get<std::string>();
    });
}

std::vector<double> ModelClient::rerank(const std::string& query, std::span<const std::string> docs,
                                        const std::optional<std::string>& model) {
    return with_code(ErrorCode::RerankServiceUnavailable, [&] {
        json request = {{"query", query}, {"docs", json::array()}};
        for (const auto& d : docs) {
            request["docs"].push_back(d);
        }
        if (model) {
            request["model"] = *model;
        }
        const auto response = call(Endpoint::Rerank, request);
        const auto& scores = field(response, "scores", "/rerank");
        if (!scores.is_array()) {
            fail(ErrorCode::MalformedResponse, "/rerank returned non-array scores");
        }
        if (scores.size() != docs.size()) {
            fail(ErrorCode::MalformedScores, "/rerank returned " + std::to_string(scores.size()) +
                                                 " scores for " + std::to_string(docs.size()) + " docs");
        }
        std::vector<double> out;
        for (const auto& s : scores) {
            if (!s.is_number()) {
                fail(ErrorCode::MalformedScores, "/rerank returned a non-numeric score");
            }
            out.push_back(s.get<double>());
        }
        return out;
    });
}

std::vector<SpanCandidate> ModelClient::spans(const std::string& text) {
    return with_code(ErrorCode::SpanProviderUnavailable, [&] {
        const auto response = call(Endpoint::Spans, {{"text", text}});
        const auto& list = field(response, "spans", "/spans");
        if (!list.is_array()) {
            fail(ErrorCode::MalformedResponse, "/spans returned non-array spans");
        }
        std::vector<SpanCandidate> out;
        for (const auto& item : list) {
            try {
                SpanCandidate span;
                span.surface = item.at("surface").get<std::string>();
                span.char_start = item.at("start").get<std::size_t>();
                span.char_end = item.at("end").get<std::size_t>();
                span.source = SpanSource::External;
                out.push_back(std::move(span));
            } catch (const json::exception& e) {
                fail(ErrorCode::MalformedResponse, std::string("/spans item malformed: ") + e.what());
            }
        }
        return out;
    });
}

std::shared_ptr<ModelClient> make_client(const BackendProfile& profile) {
    if (profile.stub_mode) {
        return std::make_shared<ModelClient>(profile, std::make_shared<stub::StubTransport>(profile));
    }
    if (profile.base_url.empty()) {
        fail(ErrorCode::InvalidConfig, "no model shim URL configured (set FACTFIX_SHIM_URL or backends.stub_mode)");
    }
    return std::make_shared<ModelClient>(profile, std::make_shared<HttpTransport>(profile.base_url));
}

BackendProfile apply_environment(BackendProfile profile) {
    if (const char* url = std::getenv("FACTFIX_SHIM_URL"); url != nullptr && *url != '\0') {
        profile.base_url = url;
    }
    if (const char* ms = std::getenv("FACTFIX_TIMEOUT_MS"); ms != nullptr && *ms != '\0') {
        try {
            profile.timeout_ms = std::stoi(ms);
        } catch (const std::exception&) {
            spdlog::warn("ignoring unparsable FACTFIX_TIMEOUT_MS='{}'", ms);
        }
    }
    return profile;
}

}  // namespace factfix
