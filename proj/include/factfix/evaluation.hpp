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

// Evaluation metrics and reports.
//
// SARI follows the original sentence-level formulation. For each n in 1..4,
// with S, C the source and candidate n-gram multisets scaled by the number of
// references r, and R the union multiset of reference n-grams:
//   keep:  K = S & C, Kg = K & R, Ka = S & R
//          P = mean_{g in K} Kg[g] / K[g]
//          Rc = (sum_{g in K, Ka[g] > 0} Kg[g] / Ka[g]) / |Ka|
//   del:   D = S - C, Dg = D - R
//          P = mean_{g in D} Dg[g] / D[g]
//   add:   A = set(C) - set(S), Ag = A n set(R), Aa = set(R) - set(S)
//          P = |Ag| / |A|, Rc = |Ag| / |Aa|
// An empty denominator set scores 1; F1 is 0 when P + R = 0. keep and add
// use F1, deletion uses precision. Each is averaged over n and
// SARI = (keep + del + add) / 3, in [0, 1].

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "factfix/types.hpp"

namespace factfix {

struct SariComponents {
    double keep = 0.0;      // F1, averaged over n
    double deletion = 0.0;  // precision, averaged over n
    double add = 0.0;       // F1, averaged over n
    std::vector<double> keep_n;
    std::vector<double> deletion_n;
    std::vector<double> add_n;

    double sari() const noexcept { return (keep + deletion + add) / 3.0; }
};

using TokenSeq = std::vector<std::string>;

/// Token-level kernel. Throws EmptyReferenceSet, InvalidArgument when max_n < 1.
SariComponents sari_components(const TokenSeq& source, const TokenSeq& prediction,
                               std::span<const TokenSeq> references, int max_n = 4);

double sari_tokens(const TokenSeq& source, const TokenSeq& prediction, std::span<const TokenSeq> references,
                   int max_n = 4);

/// Strings go through tokenize().
double sari(std::string_view source, std::string_view prediction, std::span<const std::string> references,
            int max_n = 4);

struct NdcgResult {
    double value = 0.0;
    bool no_relevant = false;  // the judgments hold no positive grade
};

/// Graded relevance (linear gain = grade), discount 1 / log2(rank + 1) over
/// the first 10 ranks, normalized by the ideal ordering of the grades.
/// Repeated doc ids count once, at their first rank.
NdcgResult ndcg_at_10(std::span<const std::string> ranked, const std::map<std::string, int>& grades);

/// query id -> doc id -> grade
using Qrels = std::map<std::string, std::map<std::string, int>>;
/// query id -> doc ids in rank order
using RunRankings = std::map<std::string, std::vector<std::string>>;

/// "query_id iteration doc_id grade" lines. Throws IoFailure, ParseError.
Qrels read_qrels(const std::string& path);
/// "query_id Q0 doc_id rank score tag" lines, ordered by rank. Throws IoFailure, ParseError.
RunRankings read_trec_run(const std::string& path);
void write_trec_run(const std::string& path, const std::map<std::string, std::vector<std::pair<std::string, double>>>& run,
                    const std::string& tag);

struct EvalRecord {
    std::string claim_id;
    std::string source;
    std::string prediction;
    std::string reference;  // empty when gold is missing
    std::optional<Label> label;
    std::optional<std::string> retriever;
    std::optional<double> bartscore;  // pass-through from an external scorer
};

struct ClassBreakdown {
    double sari = 0.0;  // mean
    std::size_t count = 0;
};

struct EvalReport {
    std::optional<double> sari_mean;
    std::optional<double> rouge_l_mean;
    std::optional<double> ndcg10_mean;
    std::optional<double> bartscore_mean;
    std::map<std::string, ClassBreakdown> per_class;
    std::size_t included = 0;
    std::size_t excluded = 0;
    std::size_t ndcg_queries = 0;
    std::size_t ndcg_no_relevant = 0;

    nlohmann::json to_json() const;
    /// Aligned columns; SARI, ROUGE-L and nDCG shown as percentages.
    std::string to_text() const;
};

/// Single-writer streaming reduction; the report depends only on the
/// sequence of records, not on how they were batched.
class Evaluator {
public:
    void add(const EvalRecord& record);
    void add_ranking(const std::string& query_id, std::span<const std::string> ranked, const Qrels& qrels);
    EvalReport report() const;

private:
    struct Sum {
        double total = 0.0;
        std::size_t count = 0;
    };
    Sum sari_;
    Sum rouge_;
    Sum ndcg_;
    Sum bart_;
    std::map<std::string, Sum> per_class_;
    std::size_t excluded_ = 0;
    std::size_t no_relevant_ = 0;
};

/// Joins the runs with the judgments when both are given; queries absent from
/// the run are skipped.
EvalReport evaluate(std::span<const EvalRecord> records, const RunRankings* runs = nullptr,
                    const Qrels* qrels = nullptr);

}  // namespace factfix
