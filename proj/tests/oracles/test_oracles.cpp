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
#include <random>

#include "factfix/evaluation.hpp"
#include "factfix/masking.hpp"
#include "factfix/retrieval.hpp"
#include "factfix/scoring.hpp"
#include "oracles.hpp"

using namespace factfix;

TEST_CASE("lcs and rouge-l agree with the table oracle") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const auto a = oracle::random_tokens(rng, 12, 6);
        const auto b = oracle::random_tokens(rng, 12, 6);
        REQUIRE(lcs_length(a, b) == oracle::lcs(a, b));
        REQUIRE(rouge_l_tokens(a, b) == oracle::rouge_l(a, b));
    }
}

TEST_CASE("sari agrees with the n-gram oracle") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> nrefs(1, 3);
    for (int i = 0; i < 1000; ++i) {
        const auto src = oracle::random_tokens(rng, 12, 8, 1);
        const auto pred = oracle::random_tokens(rng, 12, 8);
        std::vector<oracle::Tokens> refs;
        for (int r = nrefs(rng); r > 0; --r) {
            refs.push_back(oracle::random_tokens(rng, 12, 8));
        }
        const auto want = oracle::sari(src, pred, refs);
        const auto got = sari_components(src, pred, refs);
        REQUIRE(std::abs(got.keep - want.keep) < 1e-12);
        REQUIRE(std::abs(got.deletion - want.del) < 1e-12);
        REQUIRE(std::abs(got.add - want.add) < 1e-12);
        REQUIRE(std::abs(got.sari() - want.sari()) < 1e-12);
        REQUIRE(got.sari() >= 0.0);
        REQUIRE(got.sari() <= 1.0);
    }
}

TEST_CASE("sari reference example") {
    const oracle::Tokens src = {"About", "95", "species", "are", "currently", "accepted", "."};
    const oracle::Tokens pred = {"About", "95", "you", "now", "get", "in", "."};
    const std::vector<oracle::Tokens> refs = {
        {"About", "95", "species", "are", "currently", "known", "."},
        {"About", "95", "species", "are", "now", "accepted", "."},
        {"95", "species", "are", "now", "accepted", "."},
    };
    CHECK(std::abs(oracle::sari(src, pred, refs).sari() - 0.26828) < 5e-6);
    CHECK(std::abs(sari_tokens(src, pred, refs) - 0.26828) < 5e-6);
    const std::vector<oracle::Tokens> one = {refs[0]};
    CHECK(std::abs(sari_tokens(src, pred, one) - 0.21806) < 5e-6);
}

TEST_CASE("mmr greedy step equals exhaustive evaluation") {
    std::mt19937_64 rng(13);
    for (const double alpha : {0.0, 0.3, 0.5, 1.0}) {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 1 + trial % 8;
            std::vector<double> rel;
            std::vector<std::vector<double>> sim;
            oracle::random_similarities(rng, n, rel, sim, trial % 2 == 0);
            const auto steps = mmr_rank(rel, sim, alpha, n);
            REQUIRE(steps.size() == n);
            std::vector<std::size_t> chosen;
            for (const auto& step : steps) {
                double best = -std::numeric_limits<double>::infinity();
                std::size_t arg = n;
                for (std::size_t v = 0; v < n; ++v) {
                    if (std::find(chosen.begin(), chosen.end(), v) != chosen.end()) {
                        continue;
                    }
                    const double f = oracle::mmr_objective(v, chosen, rel, sim, alpha);
                    if (f > best) {
                        best = f;
                        arg = v;
                    }
                }
                REQUIRE(step.index == arg);
                REQUIRE(step.score == doctest::Approx(best).epsilon(1e-12));
                chosen.push_back(step.index);
            }
        }
    }
}

TEST_CASE("bm25 matches the formula by hand on a toy corpus") {
    const std::vector<CorpusDoc> docs = {
        {"a", "apple banana apple", std::nullopt},
        {"b", "banana cherry", std::nullopt},
        {"c", "cherry cherry cherry date", std::nullopt},
    };
    const auto index = InvertedIndex::build(docs);
    const double avg = 9.0 / 3.0;
    const auto term = [&](double tf, double df, double len) {
        const double idf = std::log(1.0 + (3.0 - df + 0.5) / (df + 0.5));
        return idf * tf * 1.9 / (tf + 0.9 * (0.6 + 0.4 * len / avg));
    };
    const auto hits = bm25_search(index, "banana cherry", 3);
    REQUIRE(hits.size() == 3);
    std::map<std::string, double> got;
    for (const auto& h : hits) {
        got[index.doc(h.doc).doc_id] = h.score;
    }
    CHECK(std::abs(got["a"] - term(1, 2, 3)) < 1e-9);
    CHECK(std::abs(got["b"] - (term(1, 2, 2) + term(1, 2, 2))) < 1e-9);
    CHECK(std::abs(got["c"] - term(3, 2, 4)) < 1e-9);
}

TEST_CASE("ndcg agrees with the oracle") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 500; ++i) {
        std::vector<std::string> ranked;
        std::uniform_int_distribution<int> doc(0, 19);
        std::uniform_int_distribution<int> len(1, 15);
        for (int k = len(rng); k > 0; --k) {
            ranked.push_back("d" + std::to_string(doc(rng)));
        }
        std::map<std::string, int> grades;
        std::uniform_int_distribution<int> grade(0, 3);
        for (int k = 0; k < 20; k += 1 + doc(rng) % 3) {
            grades["d" + std::to_string(k)] = grade(rng);
        }
        const auto got = ndcg_at_10(ranked, grades);
        REQUIRE(std::abs(got.value - oracle::ndcg10(ranked, grades)) < 1e-12);
    }
}
