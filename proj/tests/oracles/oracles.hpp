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

// Reference implementations used only by tests. Each one is written directly
// from the metric definition, favouring obviousness over speed, and shares no
// code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

// ---------------------------------------------------------------------------
// LCS / ROUGE-L
// ---------------------------------------------------------------------------

/// Full (n+1) x (m+1) table.
inline std::size_t lcs(const Tokens& a, const Tokens& b) {
    std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
        }
    }
    return t[a.size()][b.size()];
}

inline double rouge_l(const Tokens& reference, const Tokens& candidate) {
    if (reference.empty() && candidate.empty()) {
        return 1.0;
    }
    if (reference.empty() || candidate.empty()) {
        return 0.0;
    }
    const double l = static_cast<double>(lcs(reference, candidate));
    if (l == 0.0) {
        return 0.0;
    }
    const double p = l / static_cast<double>(candidate.size());
    const double r = l / static_cast<double>(reference.size());
    return 2.0 * p * r / (p + r);
}

// ---------------------------------------------------------------------------
// SARI, original sentence-level formulation
// ---------------------------------------------------------------------------

using Counts = std::map<Tokens, double>;

inline std::vector<Tokens> ngram_list(const Tokens& t, std::size_t n) {
    std::vector<Tokens> out;
    for (std::size_t i = 0; i + n <= t.size(); ++i) {
        out.emplace_back(t.begin() + static_cast<std::ptrdiff_t>(i), t.begin() + static_cast<std::ptrdiff_t>(i + n));
    }
    return out;
}

inline Counts count(const std::vector<Tokens>& grams, double weight) {
    Counts c;
    for (const auto& g : grams) {
        c[g] += weight;
    }
    return c;
}

/// Multiset intersection (min), positive entries only.
inline Counts meet(const Counts& a, const Counts& b) {
    Counts out;
    for (const auto& [g, x] : a) {
        const auto it = b.find(g);
        const double v = std::min(x, it == b.end() ? 0.0 : it->second);
        if (v > 0) {
            out[g] = v;
        }
    }
    return out;
}

/// Multiset difference, positive entries only.
inline Counts minus(const Counts& a, const Counts& b) {
    Counts out;
    for (const auto& [g, x] : a) {
        const auto it = b.find(g);
        const double v = x - (it == b.end() ? 0.0 : it->second);
        if (v > 0) {
            out[g] = v;
        }
    }
    return out;
}

inline double at(const Counts& c, const Tokens& g) {
    const auto it = c.find(g);
    return it == c.end() ? 0.0 : it->second;
}

inline double f1(double p, double r) { return p > 0 || r > 0 ? 2 * p * r / (p + r) : 0.0; }

struct SariParts {
    double keep = 0;
    double del = 0;
    double add = 0;
    double sari() const { return (keep + del + add) / 3; }
};

inline SariParts sari_ngram(const Tokens& src, const Tokens& cand, const std::vector<Tokens>& refs, std::size_t n) {
    const double r = static_cast<double>(refs.size());
    const auto sgrams = ngram_list(src, n);
    const auto cgrams = ngram_list(cand, n);
    std::vector<Tokens> rgrams;
    for (const auto& ref : refs) {
        for (auto& g : ngram_list(ref, n)) {
            rgrams.push_back(std::move(g));
        }
    }
    const Counts s_rep = count(sgrams, r);
    const Counts c_rep = count(cgrams, r);
    const Counts rc = count(rgrams, 1.0);

    SariParts out;

    const Counts keep = meet(s_rep, c_rep);
    const Counts keep_good = meet(keep, rc);
    const Counts keep_all = meet(s_rep, rc);
    double p_sum = 0;
    double r_sum = 0;
    for (const auto& [g, x] : keep) {
        p_sum += at(keep_good, g) / x;
        if (at(keep_all, g) > 0) {
            r_sum += at(keep_good, g) / at(keep_all, g);
        }
    }
    const double keep_p = keep.empty() ? 1.0 : p_sum / static_cast<double>(keep.size());
    const double keep_r = keep_all.empty() ? 1.0 : r_sum / static_cast<double>(keep_all.size());
    out.keep = f1(keep_p, keep_r);

    const Counts del = minus(s_rep, c_rep);
    const Counts del_good = minus(del, rc);
    double d_sum = 0;
    for (const auto& [g, x] : del) {
        d_sum += at(del_good, g) / x;
    }
    out.del = del.empty() ? 1.0 : d_sum / static_cast<double>(del.size());

    const std::set<Tokens> sset(sgrams.begin(), sgrams.end());
    const std::set<Tokens> cset(cgrams.begin(), cgrams.end());
    const std::set<Tokens> rset(rgrams.begin(), rgrams.end());
    std::size_t added = 0;
    std::size_t added_good = 0;
    std::size_t addable = 0;
    for (const auto& g : cset) {
        if (!sset.count(g)) {
            ++added;
            added_good += rset.count(g);
        }
    }
    for (const auto& g : rset) {
        addable += !sset.count(g);
    }
    const double add_p = added == 0 ? 1.0 : static_cast<double>(added_good) / static_cast<double>(added);
    const double add_r = addable == 0 ? 1.0 : static_cast<double>(added_good) / static_cast<double>(addable);
    out.add = f1(add_p, add_r);
    return out;
}

inline SariParts sari(const Tokens& src, const Tokens& cand, const std::vector<Tokens>& refs, std::size_t max_n = 4) {
    SariParts total;
    for (std::size_t n = 1; n <= max_n; ++n) {
        const auto p = sari_ngram(src, cand, refs, n);
        total.keep += p.keep;
        total.del += p.del;
        total.add += p.add;
    }
    const double k = static_cast<double>(max_n);
    total.keep /= k;
    total.del /= k;
    total.add /= k;
    return total;
}

// ---------------------------------------------------------------------------
// MMR
// ---------------------------------------------------------------------------

/// The objective for candidate v given a selected set.
inline double mmr_objective(std::size_t v, const std::vector<std::size_t>& selected, const std::vector<double>& rel,
                            const std::vector<std::vector<double>>& sim, double alpha) {
    double redundancy = 0.0;
    if (!selected.empty()) {
        redundancy = -std::numeric_limits<double>::infinity();
        for (const auto s : selected) {
            redundancy = std::max(redundancy, sim[v][s]);
        }
    }
    return alpha * rel[v] - (1.0 - alpha) * redundancy;
}

/// Random symmetric similarity matrix in [0, 1] with unit diagonal, and relevances in [0, 1].
inline void random_similarities(std::mt19937_64& rng, std::size_t n, std::vector<double>& rel,
                                std::vector<std::vector<double>>& sim, bool coarse) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> q(0, 4);
    const auto draw = [&] { return coarse ? q(rng) / 4.0 : u(rng); };
    rel.assign(n, 0.0);
    sim.assign(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        rel[i] = draw();
        for (std::size_t j = i + 1; j < n; ++j) {
            sim[i][j] = sim[j][i] = draw();
        }
    }
}

// ---------------------------------------------------------------------------
// nDCG@10
// ---------------------------------------------------------------------------

inline double ndcg10(const std::vector<std::string>& ranked, const std::map<std::string, int>& grades) {
    std::set<std::string> seen;
    double dcg = 0;
    std::size_t rank = 0;
    for (const auto& d : ranked) {
        if (rank == 10) {
            break;
        }
        if (!seen.insert(d).second) {
            continue;
        }
        ++rank;
        const auto it = grades.find(d);
        const double g = it == grades.end() ? 0.0 : std::max(0, it->second);
        dcg += g / std::log2(static_cast<double>(rank) + 1.0);
    }
    std::vector<int> ideal;
    for (const auto& [d, g] : grades) {
        if (g > 0) {
            ideal.push_back(g);
        }
    }
    std::sort(ideal.rbegin(), ideal.rend());
    double idcg = 0;
    for (std::size_t i = 0; i < ideal.size() && i < 10; ++i) {
        idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
    }
    return idcg == 0 ? 0.0 : dcg / idcg;
}

// ---------------------------------------------------------------------------
// Random token material
// ---------------------------------------------------------------------------

inline Tokens random_tokens(std::mt19937_64& rng, std::size_t max_len, std::size_t vocab, std::size_t min_len = 0) {
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
    Tokens out(len(rng));
    for (auto& t : out) {
        t = "w" + std::to_string(word(rng));
    }
    return out;
}

}  // namespace oracle
