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

#include "factfix/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "factfix/error.hpp"
#include "factfix/io.hpp"
#include "factfix/scoring.hpp"
#include "factfix/text.hpp"

namespace factfix {

using nlohmann::json;

namespace {

using Counts = std::map<std::string, long long>;

Counts ngram_counts(const TokenSeq& tokens, int n, long long scale) {
    Counts out;
    const auto len = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (std::size_t k = 1; k < len; ++k) {
            gram += ' ';
            gram += tokens[i + k];
        }
        out[gram] += scale;
    }
    return out;
}

long long at(const Counts& c, const std::string& key) {
    const auto it = c.find(key);
    return it == c.end() ? 0 : it->second;
}

// Multiset intersection and difference with zero entries dropped.
Counts intersect(const Counts& a, const Counts& b) {
    Counts out;
    for (const auto& [k, v] : a) {
        const auto m = std::min(v, at(b, k));
        if (m > 0) {
            out[k] = m;
        }
    }
    return out;
}

Counts subtract(const Counts& a, const Counts& b) {
    Counts out;
    for (const auto& [k, v] : a) {
        const auto d = v - at(b, k);
        if (d > 0) {
            out[k] = d;
        }
    }
    return out;
}

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

struct NgramScores {
    double keep;
    double deletion;
    double add;
};

NgramScores sari_ngram(const Counts& s, const Counts& c, const Counts& r) {
    const auto keep = intersect(s, c);
    const auto keep_good = intersect(keep, r);
    const auto keep_all = intersect(s, r);
    double kp_sum = 0.0;
    double kr_sum = 0.0;
    for (const auto& [g, n] : keep) {
        const auto good = static_cast<double>(at(keep_good, g));
        kp_sum += good / static_cast<double>(n);
        if (const auto all = at(keep_all, g); all > 0) {
            kr_sum += good / static_cast<double>(all);
        }
    }
    const double keep_p = keep.empty() ? 1.0 : kp_sum / static_cast<double>(keep.size());
    const double keep_r = keep_all.empty() ? 1.0 : kr_sum / static_cast<double>(keep_all.size());

    const auto del = subtract(s, c);
    const auto del_good = subtract(del, r);
    double dp_sum = 0.0;
    for (const auto& [g, n] : del) {
        dp_sum += static_cast<double>(at(del_good, g)) / static_cast<double>(n);
    }
    const double del_p = del.empty() ? 1.0 : dp_sum / static_cast<double>(del.size());

    std::size_t added = 0;
    std::size_t added_good = 0;
    for (const auto& [g, n] : c) {
        if (s.count(g) == 0) {
            ++added;
            added_good += r.count(g);
        }
    }
    std::size_t addable = 0;
    for (const auto& [g, n] : r) {
        addable += s.count(g) == 0 ? 1 : 0;
    }
    const double add_p = added == 0 ? 1.0 : static_cast<double>(added_good) / static_cast<double>(added);
    const double add_r = addable == 0 ? 1.0 : static_cast<double>(added_good) / static_cast<double>(addable);

    return {f1(keep_p, keep_r), del_p, f1(add_p, add_r)};
}

std::string format_percent(const std::optional<double>& v) {
    if (!v) {
        return "n/a";
    }
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << *v * 100.0;
    return out.str();
}

}  // namespace

SariComponents sari_components(const TokenSeq& source, const TokenSeq& prediction,
                               std::span<const TokenSeq> references, int max_n) {
    if (references.empty()) {
        fail(ErrorCode::EmptyReferenceSet, "SARI needs at least one reference");
    }
    if (max_n < 1) {
        fail(ErrorCode::InvalidArgument, "SARI max_n must be at least 1");
    }
    const auto numref = static_cast<long long>(references.size());
    SariComponents out;
    for (int n = 1; n <= max_n; ++n) {
        Counts r;
        for (const auto& ref : references) {
            for (const auto& [g, count] : ngram_counts(ref, n, 1)) {
                r[g] += count;
            }
        }
        const auto scores = sari_ngram(ngram_counts(source, n, numref), ngram_counts(prediction, n, numref), r);
        out.keep_n.push_back(scores.keep);
        out.deletion_n.push_back(scores.deletion);
        out.add_n.push_back(scores.add);
    }
    const auto mean = [](const std::vector<double>& v) {
        double total = 0.0;
        for (const auto x : v) {
            total += x;
        }
        return total / static_cast<double>(v.size());
    };
    out.keep = mean(out.keep_n);
    out.deletion = mean(out.deletion_n);
    out.add = mean(out.add_n);
    return out;
}

double sari_tokens(const TokenSeq& source, const TokenSeq& prediction, std::span<const TokenSeq> references,
                   int max_n) {
    return sari_components(source, prediction, references, max_n).sari();
}

double sari(std::string_view source, std::string_view prediction, std::span<const std::string> references,
            int max_n) {
    std::vector<TokenSeq> refs;
    refs.reserve(references.size());
    for (const auto& r : references) {
        refs.push_back(tokenize(r));
    }
    return sari_tokens(tokenize(source), tokenize(prediction), refs, max_n);
}

NdcgResult ndcg_at_10(std::span<const std::string> ranked, const std::map<std::string, int>& grades) {
    constexpr std::size_t kDepth = 10;
    std::vector<int> ideal;
    for (const auto& [doc, grade] : grades) {
        if (grade > 0) {
            ideal.push_back(grade);
        }
    }
    if (ideal.empty()) {
        return {0.0, true};
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal.size() && i < kDepth; ++i) {
        idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
    }
    double dcg = 0.0;
    std::set<std::string> seen;
    std::size_t rank = 0;
    for (const auto& doc : ranked) {
        if (rank == kDepth) {
            break;
        }
        if (!seen.insert(doc).second) {
            continue;
        }
        if (const auto it = grades.find(doc); it != grades.end() && it->second > 0) {
            dcg += it->second / std::log2(static_cast<double>(rank) + 2.0);
        }
        ++rank;
    }
    return {dcg / idcg, false};
}

Qrels read_qrels(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::IoFailure, "cannot open qrels '" + path + "'");
    }
    Qrels out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string qid;
        std::string iter;
        std::string doc;
        int grade = 0;
        if (!(fields >> qid >> iter >> doc >> grade)) {
            fail(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": expected 'qid iter doc grade'");
        }
        out[qid][doc] = grade;
    }
    return out;
}

RunRankings read_trec_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::IoFailure, "cannot open run '" + path + "'");
    }
    std::map<std::string, std::vector<std::pair<long long, std::string>>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string qid;
        std::string q0;
        std::string doc;
        long long rank = 0;
        if (!(fields >> qid >> q0 >> doc >> rank)) {
            fail(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": expected 'qid Q0 doc rank score tag'");
        }
        rows[qid].emplace_back(rank, doc);
    }
    RunRankings out;
    for (auto& [qid, list] : rows) {
        std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        auto& ranked = out[qid];
        for (auto& entry : list) {
            ranked.push_back(std::move(entry.second));
        }
    }
    return out;
}

void write_trec_run(const std::string& path,
                    const std::map<std::string, std::vector<std::pair<std::string, double>>>& run,
                    const std::string& tag) {
    std::ostringstream out;
    out << std::setprecision(17);
    for (const auto& [qid, docs] : run) {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            out << qid << " Q0 " << docs[i].first << ' ' << (i + 1) << ' ' << docs[i].second << ' ' << tag << '\n';
        }
    }
    write_file(path, out.str());
}

void Evaluator::add(const EvalRecord& record) {
    if (trim(record.reference).empty() || trim(record.prediction).empty() || trim(record.source).empty()) {
        ++excluded_;
        return;
    }
    const std::string refs[] = {record.reference};
    const double s = sari(record.source, record.prediction, refs);
    sari_.total += s;
    ++sari_.count;
    rouge_.total += rouge_l(record.reference, record.prediction);
    ++rouge_.count;
    if (record.bartscore) {
        bart_.total += *record.bartscore;
        ++bart_.count;
    }
    if (record.label) {
        auto& c = per_class_[std::string(to_string(*record.label))];
        c.total += s;
        ++c.count;
    }
}

void Evaluator::add_ranking(const std::string& query_id, std::span<const std::string> ranked, const Qrels& qrels) {
    const auto it = qrels.find(query_id);
    static const std::map<std::string, int> kNone;
    const auto result = ndcg_at_10(ranked, it == qrels.end() ? kNone : it->second);
    ndcg_.total += result.value;
    ++ndcg_.count;
    no_relevant_ += result.no_relevant ? 1 : 0;
}

EvalReport Evaluator::report() const {
    EvalReport r;
    const auto mean = [](const Sum& s) -> std::optional<double> {
        if (s.count == 0) {
            return std::nullopt;
        }
        return s.total / static_cast<double>(s.count);
    };
    r.sari_mean = mean(sari_);
    r.rouge_l_mean = mean(rouge_);
    r.ndcg10_mean = mean(ndcg_);
    r.bartscore_mean = mean(bart_);
    for (const auto& [label, s] : per_class_) {
        r.per_class[label] = {*mean(s), s.count};
    }
    r.included = sari_.count;
    r.excluded = excluded_;
    r.ndcg_queries = ndcg_.count;
    r.ndcg_no_relevant = no_relevant_;
    return r;
}

json EvalReport::to_json() const {
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json classes = json::object();
    for (const auto& [label, c] : per_class) {
        classes[label] = {{"sari", c.sari}, {"count", c.count}};
    }
    return {{"sari_mean", opt(sari_mean)},
            {"rouge_l_mean", opt(rouge_l_mean)},
            {"ndcg10_mean", opt(ndcg10_mean)},
            {"bartscore_mean", opt(bartscore_mean)},
            {"per_class", std::move(classes)},
            {"included", included},
            {"excluded", excluded},
            {"ndcg_queries", ndcg_queries},
            {"ndcg_no_relevant", ndcg_no_relevant}};
}

std::string EvalReport::to_text() const {
    std::ostringstream out;
    const auto row = [&](const std::string& name, const std::string& value) {
        out << std::left << std::setw(18) << name << std::right << std::setw(10) << value << '\n';
    };
    row("metric", "value");
    row("SARI (%)", format_percent(sari_mean));
    row("ROUGE-L (%)", format_percent(rouge_l_mean));
    row("nDCG@10 (%)", format_percent(ndcg10_mean));
    if (bartscore_mean) {
        std::ostringstream b;
        b << std::fixed << std::setprecision(4) << *bartscore_mean;
        row("BARTScore", b.str());
    }
    row("included", std::to_string(included));
    row("excluded", std::to_string(excluded));
    if (ndcg_queries > 0) {
        row("nDCG queries", std::to_string(ndcg_queries));
        row("no relevant", std::to_string(ndcg_no_relevant));
    }
    if (!per_class.empty()) {
        out << '\n';
        out << std::left << std::setw(18) << "class" << std::right << std::setw(10) << "SARI (%)" << std::setw(8)
            << "count" << '\n';
        for (const auto& [label, c] : per_class) {
            out << std::left << std::setw(18) << label << std::right << std::setw(10) << format_percent(c.sari)
                << std::setw(8) << c.count << '\n';
        }
    }
    return out.str();
}

EvalReport evaluate(std::span<const EvalRecord> records, const RunRankings* runs, const Qrels* qrels) {
    Evaluator ev;
    for (const auto& r : records) {
        ev.add(r);
    }
    if (runs != nullptr && qrels != nullptr) {
        for (const auto& [qid, ranked] : *runs) {
            if (qrels->count(qid) != 0) {
                ev.add_ranking(qid, ranked, *qrels);
            }
        }
    }
    return ev.report();
}

}  // namespace factfix
