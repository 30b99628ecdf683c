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

#include "doctest.h"

#include <cmath>
#include <thread>

#include "httplib.h"

#include "factfix/backends.hpp"
#include "factfix/stub.hpp"
#include "helpers.hpp"

using namespace factfix;
using nlohmann::json;
using testutil::error_code_of;

namespace {

std::shared_ptr<ModelClient> client_with(FunctionTransport::Handler h, std::vector<long long>* sleeps = nullptr,
                                         int attempts = 3) {
    BackendProfile p;
    p.retry.attempts = attempts;
    p.retry.backoff_ms = 10;
    return std::make_shared<ModelClient>(p, std::make_shared<FunctionTransport>(std::move(h)),
                                         [sleeps](std::chrono::milliseconds d) {
                                             if (sleeps) {
                                                 sleeps->push_back(d.count());
                                             }
                                         });
}

}  // namespace

TEST_SUITE("backends") {
    TEST_CASE("transport failures are retried with exponential backoff") {
        int calls = 0;
        std::vector<long long> sleeps;
        auto c = client_with(
            [&](std::string_view, const json&) {
                ++calls;
                return calls < 3 ? HttpResponse{503, "busy"} : HttpResponse{200, R"({"entailment":0.25})"};
            },
            &sleeps);
        CHECK(c->entail("p", "h") == 0.25);
        CHECK(calls == 3);
        CHECK(sleeps == std::vector<long long>{10, 20});
    }

    TEST_CASE("an exhausted retry budget maps to the endpoint error") {
        auto c = client_with([](std::string_view, const json&) -> HttpResponse { throw TransportError("refused"); });
        CHECK(error_code_of([&] { c->entail("p", "h"); }) == ErrorCode::EntailmentServiceUnavailable);
        CHECK(error_code_of([&] { c->generate("p", {}); }) == ErrorCode::GenerationServiceUnavailable);
        CHECK(error_code_of([&] { std::vector<std::string> d{"x"}; c->rerank("q", d); }) ==
              ErrorCode::RerankServiceUnavailable);
        CHECK(error_code_of([&] { std::vector<std::string> t{"x"}; c->embed(t); }) ==
              ErrorCode::EmbeddingServiceUnavailable);
        CHECK(error_code_of([&] { c->spans("x"); }) == ErrorCode::SpanProviderUnavailable);
    }

    TEST_CASE("schema violations are not retried") {
        int calls = 0;
        auto c = client_with([&](std::string_view, const json&) {
            ++calls;
            return HttpResponse{200, R"({"wrong":1})"};
        });
        CHECK(error_code_of([&] { c->entail("p", "h"); }) == ErrorCode::MalformedResponse);
        CHECK(calls == 1);
        auto bad = client_with([&](std::string_view, const json&) { return HttpResponse{400, "no"}; });
        CHECK(error_code_of([&] { bad->generate("p", {}); }) == ErrorCode::MalformedResponse);
    }

    TEST_CASE("rerank score count must match the pool") {
        auto c = client_with([](std::string_view, const json&) { return HttpResponse{200, R"({"scores":[1,2,3]})"}; });
        std::vector<std::string> docs{"a", "b", "c", "d"};
        CHECK(error_code_of([&] { c->rerank("q", docs); }) == ErrorCode::MalformedScores);
    }

    TEST_CASE("payload shapes") {
        json seen;
        auto c = client_with([&](std::string_view path, const json& payload) {
            seen = payload;
            if (path == "/rerank") {
                return HttpResponse{200, R"({"scores":[0.5]})"};
            }
            if (path == "/embed") {
                return HttpResponse{200, R"({"vectors":[[1,0],[0,1]]})"};
            }
            if (path == "/spans") {
                return HttpResponse{200, R"({"spans":[{"surface":"Giver","start":4,"end":9}]})"};
            }
            return HttpResponse{200, R"({"text":"ok"})"};
        });
        std::vector<std::string> one{"d"};
        c->rerank("q", one, std::string("colbert"));
        CHECK(seen == json{{"query", "q"}, {"docs", {"d"}}, {"model", "colbert"}});
        std::vector<std::string> two{"a", "b"};
        CHECK(c->embed(two).size() == 2);
        CHECK(seen == json{{"texts", {"a", "b"}}});
        const auto spans = c->spans("The Giver");
        REQUIRE(spans.size() == 1);
        CHECK(spans[0].surface == "Giver");
        CHECK(spans[0].source == SpanSource::External);
        CHECK(c->generate("p", {}) == "ok");
        CHECK(seen.at("prompt") == "p");
    }

    TEST_CASE("http transport against a local shim") {
        httplib::Server server;
        server.Post("/entail", [](const httplib::Request& req, httplib::Response& res) {
            const auto j = json::parse(req.body);
            res.set_content(json{{"entailment", j.at("premise") == j.at("hypothesis") ? 1.0 : 0.0}}.dump(),
                            "application/json");
        });
        const int port = server.bind_to_any_port("127.0.0.1");
        std::thread t([&] { server.listen_after_bind(); });
        server.wait_until_ready();
        BackendProfile p;
        p.base_url = "http://127.0.0.1:" + std::to_string(port) + "/";
        p.timeout_ms = 2000;
        auto c = make_client(p);
        CHECK(c->entail("a", "a") == 1.0);
        CHECK(c->entail("a", "b") == 0.0);
        CHECK(error_code_of([&] { c->generate("x", {}); }) == ErrorCode::MalformedResponse);
        server.stop();
        t.join();
    }

    TEST_CASE("no shim configured") {
        CHECK(error_code_of([] { make_client(BackendProfile{}); }) == ErrorCode::InvalidConfig);
    }
}

TEST_SUITE("stub") {
    TEST_CASE("embed is deterministic, unit length and seed dependent") {
        const auto a = stub::embed("blood oxygen", 32, 0);
        const auto b = stub::embed("blood oxygen", 32, 0);
        const auto c = stub::embed("blood oxygen", 32, 1);
        CHECK(a == b);
        CHECK(a != c);
        double norm = 0;
        for (const float x : a) {
            norm += double(x) * x;
        }
        CHECK(std::abs(norm - 1.0) < 1e-6);
        CHECK(stub::embed("", 8, 0).size() == 8);
    }

    TEST_CASE("entail rules") {
        CHECK(stub::entail("", "x") == 0.5);
        CHECK(stub::entail("the cat sat", "cat sat") == 1.0);
        CHECK(stub::entail("the cat sat", "dog sat") == 0.5);
    }

    TEST_CASE("rerank is query coverage") {
        std::vector<std::string> docs{"cat dog", "cat", "bird"};
        CHECK(stub::rerank("cat dog", docs) == std::vector<double>{1.0, 0.5, 0.0});
        CHECK(stub::rerank("", docs) == std::vector<double>{0.0, 0.0, 0.0});
    }

    TEST_CASE("fill_masks uses the evidence") {
        std::vector<std::string> ev{"Hypoxemia is marked by low blood oxygen levels."};
        CHECK(stub::fill_masks("Hypoxemia is marked by high blood oxygen levels.",
                               "Hypoxemia is marked by [MASK] blood oxygen levels.", ev) ==
              "Hypoxemia is marked by low blood oxygen levels.");
        std::vector<std::string> none;
        CHECK(stub::fill_masks("A b c.", "A [MASK] c.", none) == "A b c.");
    }

    TEST_CASE("stub transport answers every endpoint") {
        auto c = testutil::stub_client();
        std::vector<std::string> t{"x"};
        CHECK(c->embed(t).at(0).size() == 64);
        CHECK(c->entail("a b", "a") == 1.0);
        CHECK(c->spans("Drake is Canadian.").size() >= 2);
        CHECK(c->generate("Input Claim: The sky is green.\nOutput Correction:", {}) == "The sky is green.");
    }
}
