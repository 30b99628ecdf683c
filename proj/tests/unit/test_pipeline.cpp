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

#include <atomic>
#include <set>

#include "factfix/correction.hpp"
#include "factfix/io.hpp"
#include "factfix/pipeline.hpp"
#include "factfix/text.hpp"
#include "helpers.hpp"

using namespace factfix;
using nlohmann::json;
using testutil::error_code_of;

namespace {

using testutil::resources;

Pipeline make_pipeline(Mode mode, std::shared_ptr<ModelClient> client = testutil::stub_client()) {
    auto cfg = testutil::stub_config();
    cfg.mode = mode;
    return Pipeline(cfg, std::move(client), &resources().index, &resources().embeddings);
}

Claim claim(std::string id, std::string text) {
    Claim c;
    c.id = std::move(id);
    c.text = std::move(text);
    return c;
}

const Claim kHypoxemia = claim("c04f", "Hypoxemia is marked by high blood oxygen levels.");
const std::string kFixed = "Hypoxemia is marked by low blood oxygen levels.";

}  // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("every mode produces a result without error") {
        for (const auto mode : {Mode::ZeroShot, Mode::Rag, Mode::M2C, Mode::M2CWithVerify, Mode::M2CPlus}) {
            CAPTURE(to_string(mode));
            const auto r = make_pipeline(mode).run(kHypoxemia);
            CHECK_FALSE(r.error);
            CHECK_FALSE(r.final_text.empty());
            CHECK(r.mode == mode);
            CHECK(r.to_json().at("claim_id") == "c04f");
        }
    }

    TEST_CASE("zero-shot with the stub echoes the claim") {
        const auto r = make_pipeline(Mode::ZeroShot).run(kHypoxemia);
        REQUIRE(r.direct);
        CHECK(r.final_text == kHypoxemia.text);
        CHECK(r.per_retriever.empty());
    }

    TEST_CASE("M2C corrects the hypoxemia claim and keeps the claim as candidate 0") {
        const auto r = make_pipeline(Mode::M2C).run(kHypoxemia);
        REQUIRE(r.per_retriever.size() == 1);
        const auto& out = r.per_retriever[0];
        CHECK(out.retriever == "monot5");
        REQUIRE(out.scores.size() >= 2);
        CHECK(out.scores[0].candidate.text == kHypoxemia.text);
        CHECK_FALSE(out.scores[0].candidate.source_mask);
        CHECK(r.final_text == kFixed);
        CHECK(r.changed());
        CHECK(out.evidence.items.size() <= 3);
        CHECK(out.evidence.items.front().doc_id == "d04");
    }

    TEST_CASE("M2C_PLUS reaches a unanimous decision with four votes") {
        const auto pipeline = make_pipeline(Mode::M2CPlus);
        const auto r = pipeline.run(kHypoxemia);
        REQUIRE(r.decision);
        CHECK(r.per_retriever.size() == 4);
        CHECK(r.final_text == kFixed);
        REQUIRE(r.decision->tally.size() == 1);
        CHECK(r.decision->tally[0].count() == 4);
        CHECK_FALSE(r.decision->tie_break_used);
        CHECK(run_m2c_plus(kHypoxemia, pipeline).final_text == kFixed);
        CHECK(error_code_of([] { run_m2c_plus(kHypoxemia, make_pipeline(Mode::M2C)); }) == ErrorCode::InvalidConfig);
    }

    TEST_CASE("span selection is shared by every retriever") {
        const auto r = make_pipeline(Mode::M2CPlus).run(kHypoxemia);
        std::optional<std::vector<std::string>> first;
        for (const auto& out : r.per_retriever) {
            std::vector<std::string> masked;
            for (std::size_t i = 1; i < out.scores.size(); ++i) {
                REQUIRE(out.scores[i].candidate.source_mask);
                masked.push_back(out.scores[i].candidate.source_mask->masked_text);
            }
            if (!first) {
                first = masked;
            }
            CHECK(masked == *first);
        }
        CHECK(first->size() == r.selected_spans.size());
    }

    TEST_CASE("context size bounds the evidence") {
        auto cfg = testutil::stub_config();
        cfg.mode = Mode::M2CPlus;
        for (auto& spec : cfg.retrieval.retrievers) {
            spec.context_size = 2;
        }
        const Pipeline p(cfg, testutil::stub_client(), &resources().index, &resources().embeddings);
        for (const auto& out : p.run(kHypoxemia).per_retriever) {
            CHECK(out.evidence.items.size() <= 2);
            CHECK_FALSE(out.evidence.items.empty());
        }
    }

    TEST_CASE("one failing retriever still yields a decision") {
        auto client = testutil::scripted_client([](std::string_view path, const json& payload) {
            if (path == "/rerank" && payload.value("model", "") == "colbert") {
                return HttpResponse{503, "down"};
            }
            return HttpResponse{0, ""};
        });
        const auto r = make_pipeline(Mode::M2CPlus, client).run(kHypoxemia);
        CHECK_FALSE(r.error);
        REQUIRE(r.decision);
        CHECK(r.final_text == kFixed);
        std::size_t failed = 0;
        for (const auto& out : r.per_retriever) {
            if (!out.ok()) {
                ++failed;
                CHECK(out.retriever == "colbert");
                CHECK(out.error->rfind("RerankServiceUnavailable", 0) == 0);
            }
        }
        CHECK(failed == 1);
        CHECK(r.backend_failures() == 1);
        CHECK(r.decision->tally[0].count() == 3);
    }

    TEST_CASE("fewer than three votes falls back to the best single winner") {
        auto client = testutil::scripted_client([](std::string_view path, const json&) {
            return path == "/rerank" ? HttpResponse{503, "down"} : HttpResponse{0, ""};
        });
        const auto r = make_pipeline(Mode::M2CPlus, client).run(kHypoxemia);
        REQUIRE(r.decision);
        CHECK(r.decision->tie_break_used);
        CHECK(r.final_text == kFixed);
    }

    TEST_CASE("all retrievers failing is reported") {
        auto client = testutil::scripted_client([](std::string_view path, const json&) {
            return path == "/generate" ? HttpResponse{503, "down"} : HttpResponse{0, ""};
        });
        const auto pipeline = make_pipeline(Mode::M2CPlus, client);
        const auto r = pipeline.run(kHypoxemia);
        REQUIRE(r.error);
        CHECK(r.error->rfind("AllBackendsFailed", 0) == 0);
        CHECK(r.final_text == kHypoxemia.text);
        CHECK(error_code_of([&] { run_m2c_plus(kHypoxemia, pipeline); }) == ErrorCode::AllBackendsFailed);
    }

    TEST_CASE("a CORRECT verdict short-circuits M2C_WITH_VERIFY") {
        std::atomic<int> generations{0};
        const auto answering = [&](std::string verdict) {
            return testutil::scripted_client([&generations, verdict](std::string_view path, const json& payload) {
                if (path != "/generate") {
                    return HttpResponse{0, ""};
                }
                const std::string text = payload.at("prompt");
                if (text.find(prompt::kVerifyInstruction) != std::string::npos) {
                    return HttpResponse{200, json{{"text", verdict}}.dump()};
                }
                ++generations;
                return HttpResponse{0, ""};
            });
        };
        const auto kept = make_pipeline(Mode::M2CWithVerify, answering("SUPPORTED")).run(kHypoxemia);
        CHECK(kept.verified_correct == std::optional<bool>(true));
        CHECK(kept.final_text == kHypoxemia.text);
        CHECK(generations == 0);
        CHECK(kept.per_retriever.at(0).scores.empty());

        const auto fixed = make_pipeline(Mode::M2CWithVerify, answering("REFUTED")).run(kHypoxemia);
        CHECK(fixed.verified_correct == std::optional<bool>(false));
        CHECK(fixed.final_text == kFixed);
        CHECK(generations > 0);
    }

    TEST_CASE("heuristic masking works from the evidence") {
        auto cfg = testutil::stub_config();
        cfg.mode = Mode::M2C;
        cfg.masking.strategy = MaskStrategy::Heuristic;
        const Pipeline p(cfg, testutil::stub_client(), &resources().index, &resources().embeddings);
        const auto r = p.run(kHypoxemia);
        CHECK_FALSE(r.error);
        CHECK(r.final_text == kFixed);
    }

    TEST_CASE("retrieval modes need an index") {
        auto cfg = testutil::stub_config();
        cfg.mode = Mode::Rag;
        const Pipeline p(cfg, testutil::stub_client(), nullptr, nullptr);
        const auto r = p.run(kHypoxemia);
        REQUIRE(r.error);
        CHECK(r.error->rfind("IndexNotLoaded", 0) == 0);
    }

    TEST_CASE("blank claims are per-claim errors") {
        const auto r = make_pipeline(Mode::M2C).run(claim("z", "   "));
        REQUIRE(r.error);
        CHECK(r.error->rfind("EmptyClaim", 0) == 0);
    }

    TEST_CASE("results are deterministic across fixture claims") {
        const auto claims = read_claims(testutil::fixture("claims50.jsonl"));
        const auto a = make_pipeline(Mode::M2CPlus);
        const auto b = make_pipeline(Mode::M2CPlus);
        std::size_t fixed = 0;
        for (const auto& c : claims) {
            const auto ra = a.run(c);
            CHECK(ra.to_json() == b.run(c).to_json());
            fixed += normalize(ra.final_text) == normalize(*c.gold_correction);
        }
        CHECK(fixed * 10 >= claims.size() * 7);
    }
}
