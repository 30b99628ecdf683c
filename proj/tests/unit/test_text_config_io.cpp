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

#include <cstdlib>
#include <fstream>

#include "factfix/config.hpp"
#include "factfix/io.hpp"
#include "factfix/text.hpp"
#include "helpers.hpp"

using namespace factfix;
using nlohmann::json;

TEST_SUITE("text") {
    TEST_CASE("normalize folds case, whitespace and terminal punctuation") {
        CHECK(normalize("One Dance was by a Canadian.") == normalize("  one dance  was by a canadian"));
        CHECK(normalize("Yes!?") == normalize("yes"));
        CHECK(normalize("U.S. troops") == normalize("u.s. troops"));
        CHECK_FALSE(normalize("a b") == normalize("ab"));
        CHECK(normalize("...").empty());
    }

    TEST_CASE("tokenize strips edge punctuation only") {
        CHECK(tokenize("The \"Giver\", a film.") == std::vector<std::string>{"the", "giver", "a", "film"});
        CHECK(tokenize("blood-oxygen U.S") == std::vector<std::string>{"blood-oxygen", "u.s"});
        CHECK(tokenize("  ").empty());
        CHECK(tokenize("-- !!").empty());
    }

    TEST_CASE("token offsets address their surfaces") {
        const std::string text = "Hello, (big) World.";
        const auto spans = tokenize_with_offsets(text);
        REQUIRE(spans.size() == 3);
        for (const auto& s : spans) {
            CHECK(text.substr(s.start, s.end - s.start) == s.surface);
        }
        CHECK(spans[1].surface == "big");
    }

    TEST_CASE("helpers") {
        CHECK(collapse_whitespace(" a \n\t b  ") == "a b");
        CHECK(trim("  x ") == "x");
        CHECK(to_lower_ascii("AbC\xc3\x89") == "abc\xc3\x89");
        CHECK(is_stopword("the"));
        CHECK_FALSE(is_stopword("oxygen"));
        CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    }
}

TEST_SUITE("config") {
    TEST_CASE("defaults") {
        const auto cfg = default_config();
        CHECK(cfg.masking.alpha == 0.3);
        CHECK(cfg.masking.max_masks == 10);
        CHECK(cfg.masking.rm_mask_ratio == 0.15);
        CHECK(cfg.scoring.lambda == 0.5);
        CHECK(cfg.ensemble.tie_break == TieBreak::ByScore);
        CHECK(cfg.ensemble.members.size() >= 3);
        CHECK(std::find(cfg.ensemble.members.begin(), cfg.ensemble.members.end(), "rm3") == cfg.ensemble.members.end());
        const auto& bm25 = cfg.retrieval.find("bm25");
        CHECK(bm25.bm25.k1 == 0.9);
        CHECK(bm25.bm25.b == 0.4);
        CHECK(bm25.pool_size == 50);
        CHECK(bm25.context_size == 3);
        CHECK_NOTHROW(cfg.validate());
    }

    TEST_CASE("json round trip") {
        auto cfg = default_config();
        cfg.masking.alpha = 0.7;
        cfg.scoring.lambda = 0.2;
        cfg.ensemble.tie_break = TieBreak::ByPriority;
        cfg.mode = Mode::Rag;
        const auto back = config_from_json(to_json(cfg));
        CHECK(to_json(back) == to_json(cfg));
    }

    TEST_CASE("partial json keeps defaults") {
        const auto cfg = config_from_json(json{{"scoring", {{"lambda", 0.8}}}});
        CHECK(cfg.scoring.lambda == 0.8);
        CHECK(cfg.masking.alpha == 0.3);
    }

    TEST_CASE("invalid values are rejected") {
        using testutil::error_code_of;
        const auto bad = [](json j) { return error_code_of([&] { config_from_json(j); }); };
        CHECK(bad({{"masking", {{"alpha", 1.5}}}}) == ErrorCode::InvalidConfig);
        CHECK(bad({{"masking", {{"max_masks", 0}}}}) == ErrorCode::InvalidConfig);
        CHECK(bad({{"masking", {{"rm_mask_ratio", 1.0}}}}) == ErrorCode::InvalidConfig);
        CHECK(bad({{"scoring", {{"lambda", -0.1}}}}) == ErrorCode::InvalidConfig);
        CHECK(bad({{"mode", "FOUR_SHOT"}}) == ErrorCode::InvalidConfig);
        CHECK(bad({{"ensemble", {{"members", {"bm25", "dense"}}}}}) == ErrorCode::InvalidConfig);
        CHECK(bad({{"ensemble", {{"members", {"bm25", "dense", "nope"}}}}}) == ErrorCode::InvalidConfig);
        CHECK(bad({{"retrieval", {{"primary", "nope"}}}}) == ErrorCode::InvalidConfig);
        CHECK(bad({{"retrieval", {{"context_size", 60}}}}) == ErrorCode::InvalidConfig);
        CHECK(bad({{"scoring", {{"lambda", "half"}}}}) == ErrorCode::InvalidConfig);
    }

    TEST_CASE("environment overrides the backend profile") {
        ::setenv("FACTFIX_SHIM_URL", "http://127.0.0.1:9", 1);
        ::setenv("FACTFIX_TIMEOUT_MS", "1234", 1);
        const auto p = apply_environment(default_config().backends);
        CHECK(p.base_url == "http://127.0.0.1:9");
        CHECK(p.timeout_ms == 1234);
        ::unsetenv("FACTFIX_SHIM_URL");
        ::unsetenv("FACTFIX_TIMEOUT_MS");
    }
}

TEST_SUITE("io") {
    TEST_CASE("claims round trip") {
        testutil::TempDir dir("io");
        Claim c;
        c.id = "x1";
        c.text = "The Giver is a film.";
        c.gold_correction = "The Giver is a book.";
        c.label = Label::Refuted;
        write_file(dir.file("c.jsonl"), jsonl_line(to_json(c)));
        const auto back = read_claims(dir.file("c.jsonl"));
        REQUIRE(back.size() == 1);
        CHECK(back[0].id == "x1");
        CHECK(back[0].gold_correction == c.gold_correction);
        CHECK(back[0].label == Label::Refuted);
    }

    TEST_CASE("claim records are validated") {
        using testutil::error_code_of;
        CHECK(error_code_of([] { claim_from_json(json{{"id", "a"}, {"claim", "  "}}); }) == ErrorCode::EmptyClaim);
        CHECK(error_code_of([] { claim_from_json(json{{"id", "a"}, {"claim", "x"}, {"label", "MAYBE"}}); }) ==
              ErrorCode::ParseError);
        CHECK(error_code_of([] { claim_from_json(json{{"claim", "x"}}); }) == ErrorCode::ParseError);
    }

    TEST_CASE("duplicate claim ids and malformed lines") {
        testutil::TempDir dir("io");
        write_file(dir.file("dup.jsonl"), "{\"id\":\"a\",\"claim\":\"x\"}\n{\"id\":\"a\",\"claim\":\"y\"}\n");
        CHECK(testutil::error_code_of([&] { read_claims(dir.file("dup.jsonl")); }) == ErrorCode::ParseError);
        write_file(dir.file("bad.jsonl"), "{\"id\":\"a\",\"claim\":\"x\"}\n\n{oops\n");
        JsonlReader r(dir.file("bad.jsonl"));
        CHECK(r.next().has_value());
        CHECK(testutil::error_code_of([&] { r.next(); }) == ErrorCode::ParseError);
        CHECK(r.line_number() == 3);
    }

    TEST_CASE("sha256 and timestamps") {
        CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        const auto ts = utc_timestamp();
        CHECK(ts.size() == 20);
        CHECK(ts.back() == 'Z');
    }
}
