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

#include "factfix/correction.hpp"
#include "factfix/masking.hpp"
#include "helpers.hpp"

using namespace factfix;
using nlohmann::json;
using testutil::error_code_of;

namespace {

Claim fig2_claim() {
    Claim c;
    c.id = "pe";
    c.text = "Pulmonary embolism is indicated by high blood oxygen levels.";
    return c;
}

EvidenceSet pe_evidence() {
    EvidenceSet ev;
    ev.claim_id = "pe";
    ev.retriever = "bm25";
    ev.items.push_back({"d1", "Signs of a PE include low blood oxygen levels.", 2.0});
    ev.items.push_back({"d2", "Pulmonary embolism is a blockage of an artery in the lungs.", 1.0});
    return ev;
}

MaskedClaim fig2_masked() {
    const auto claim = fig2_claim();
    const auto spans = heuristic_spans(claim.text);
    const auto it = std::find_if(spans.begin(), spans.end(),
                                 [](const SpanCandidate& s) { return s.surface == "high blood oxygen levels"; });
    REQUIRE(it != spans.end());
    return mask_spans(claim, std::span(&*it, 1), MaskStrategy::Diversity).front();
}

std::shared_ptr<ModelClient> generating(std::function<std::string(const std::string&)> reply, int* calls = nullptr) {
    return testutil::scripted_client([reply, calls](std::string_view path, const json& payload) {
        if (path != "/generate") {
            return HttpResponse{0, ""};
        }
        if (calls) {
            ++*calls;
        }
        return HttpResponse{200, json{{"text", reply(payload.at("prompt").get<std::string>())}}.dump()};
    });
}

}  // namespace

TEST_SUITE("correction") {
    TEST_CASE("M2C prompt layout") {
        const auto masked = fig2_masked();
        const auto ev = pe_evidence();
        const auto bundle = build_prompt(fig2_claim(), &masked, &ev, Mode::M2C);
        const auto text = bundle.render();
        CHECK(text.find("Masked Claim: Pulmonary embolism is indicated by [MASK].") != std::string::npos);
        CHECK(bundle.evidence_block == "Evidence:\n[1.] Signs of a PE include low blood oxygen levels.\n"
                                       "[2.] Pulmonary embolism is a blockage of an artery in the lungs.");
        CHECK(bundle.test_block ==
              "Input Claim: Pulmonary embolism is indicated by high blood oxygen levels.\n"
              "Masked Claim: Pulmonary embolism is indicated by [MASK].\nOutput Correction:");
        CHECK(bundle.system_instructions.find("[MASK]") != std::string::npos);
        CHECK(build_prompt(fig2_claim(), &masked, &ev, Mode::M2C).render() == text);
    }

    TEST_CASE("template selection and preconditions") {
        const auto claim = fig2_claim();
        const auto masked = fig2_masked();
        const auto zero = build_prompt(claim, nullptr, nullptr, Mode::ZeroShot).render();
        CHECK(zero.find("Evidence:") == std::string::npos);
        CHECK(zero.find("Masked Claim:") == std::string::npos);
        EvidenceSet empty;
        CHECK(build_prompt(claim, nullptr, &empty, Mode::Rag).evidence_block == "Evidence: (none)");
        CHECK(error_code_of([&] { build_prompt(claim, nullptr, nullptr, Mode::Rag); }) == ErrorCode::MissingEvidence);
        const auto ev = pe_evidence();
        CHECK(error_code_of([&] { build_prompt(claim, nullptr, &ev, Mode::M2C); }) == ErrorCode::MissingMask);
        CHECK(error_code_of([&] { build_prompt(claim, &masked, nullptr, Mode::M2CPlus); }) ==
              ErrorCode::MissingEvidence);
    }

    TEST_CASE("parse_generation") {
        CHECK(parse_generation("Output Correction: The Giver is a film.") == "The Giver is a film.");
        CHECK(parse_generation("Sure.\nOutput Correction: a\nOutput Correction:  \"b  c\" ") == "b c");
        CHECK(parse_generation("\n\n  first line \nsecond") == "first line");
        CHECK(parse_generation("\xe2\x80\x9cquoted\xe2\x80\x9d") == "quoted");
        CHECK(parse_generation("").empty());
    }

    TEST_CASE("generation with the echo reply") {
        auto client = generating([](const std::string&) { return "Output Correction: The Giver is a film."; });
        const auto claim = fig2_claim();
        const auto cand = generate_correction(claim, build_prompt(claim, nullptr, nullptr, Mode::ZeroShot), *client, {});
        CHECK(cand.text == "The Giver is a film.");
        CHECK_FALSE(cand.fallback);
        CHECK(cand.raw_generation == "Output Correction: The Giver is a film.");
    }

    TEST_CASE("a [MASK] answer is retried once then falls back") {
        int calls = 0;
        std::vector<std::string> prompts;
        auto client = generating(
            [&](const std::string& p) {
                prompts.push_back(p);
                return std::string("[MASK] and [MASK]");
            },
            &calls);
        const auto claim = fig2_claim();
        const auto masked = fig2_masked();
        const auto ev = pe_evidence();
        const auto cand = generate_correction(claim, build_prompt(claim, &masked, &ev, Mode::M2C), *client, {}, masked);
        CHECK(calls == 2);
        CHECK(cand.fallback);
        CHECK(cand.text == claim.text);
        CHECK(cand.text.find("[MASK]") == std::string::npos);
        REQUIRE(prompts.size() == 2);
        CHECK(prompts[1].size() > prompts[0].size());
    }

    TEST_CASE("hypoxemia walk-through with the stub generator") {
        auto client = testutil::stub_client();
        const auto claim = fig2_claim();
        const auto masked = fig2_masked();
        const auto ev = pe_evidence();
        const auto cand = generate_correction(claim, build_prompt(claim, &masked, &ev, Mode::M2C), *client, {}, masked);
        CHECK(cand.text == "Pulmonary embolism is indicated by low blood oxygen levels.");
        REQUIRE(cand.source_mask);
        CHECK(cand.source_mask->masked_text == masked.masked_text);
    }

    TEST_CASE("verification") {
        const auto claim = fig2_claim();
        const auto ev = pe_evidence();
        CHECK(parse_verdict("SUPPORTED") == Verdict::Correct);
        CHECK(parse_verdict(" yes, it is") == Verdict::Correct);
        CHECK(parse_verdict("REFUTED") == Verdict::Incorrect);
        CHECK(parse_verdict("%%garbage") == Verdict::Incorrect);
        CHECK(parse_verdict("") == Verdict::Incorrect);
        auto yes = generating([](const std::string&) { return "SUPPORTED"; });
        CHECK(verify_claim(claim, ev, *yes, {}) == Verdict::Correct);
        auto junk = generating([](const std::string&) { return "I cannot say"; });
        CHECK(verify_claim(claim, ev, *junk, {}) == Verdict::Incorrect);
        auto down = testutil::scripted_client([](std::string_view, const json&) { return HttpResponse{503, ""}; });
        CHECK(verify_claim(claim, ev, *down, {}) == Verdict::Incorrect);
        const auto prompt = build_verification_prompt(claim, ev);
        CHECK(prompt.find(std::string(prompt::kVerifyInstruction)) != std::string::npos);
    }
}
