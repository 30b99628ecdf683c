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

// Deterministic in-process stand-ins for the model endpoints. Each rule is a
// pure function of (payload, seed), so whole pipeline runs reproduce bit for bit.
//
// EMBED     Signed feature hashing: every lowercase token t adds sign(h) to
//           bucket h % dim where h = fnv1a64 of t with basis (FNV basis ^ seed)
//           and sign(h) is the top bit. A text with no tokens, or whose
//           features cancel out, hashes its raw bytes instead. The vector is
//           L2-normalized.
// ENTAIL    Empty premise -> 0.5. Otherwise 1.0 when the hypothesis token set
//           is a subset of the premise token set, else |H n P| / |H|.
// RERANK    |Q n D| / |Q| over lowercase token sets (0 for an empty query).
// SPANS     The built-in heuristic span extractor.
// GENERATE  Verification prompts: "SUPPORTED" if ENTAIL(evidence, claim) == 1,
//           else "REFUTED". Correction prompts without a masked claim echo the
//           input claim. Masked prompts fill every [MASK] via fill_masks().
//
// fill_masks: the original content O of a mask is recovered by aligning the
// masked claim with the input claim. Then, in order:
//   1. Span anchor. The longest token run shared by O and an evidence sentence
//      (containing at least one non-stopword) anchors a window of |O| evidence
//      tokens aligned with O; that window is the fill.
//   2. Context anchor. The longest suffix of the left context (or prefix of
//      the right context) found in an evidence sentence, again with at least
//      one non-stopword, selects the |O| evidence tokens right after (before)
//      it. Longer anchor wins, left context on ties.
//   3. Otherwise O is kept.
// When the masked claim cannot be aligned with the input claim, O is unknown:
// rule 2 fills one token and rule 3 leaves "[MASK]" in place.
// Ties between equal-length anchors go to the earliest evidence sentence and
// the earliest position. Fills copy the evidence bytes verbatim.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factfix/backends.hpp"

namespace factfix::stub {

std::vector<float> embed(std::string_view text, int dim, std::uint64_t seed);

double entail(std::string_view premise, std::string_view hypothesis);

std::vector<double> rerank(std::string_view query, std::span<const std::string> docs);

std::string fill_masks(std::string_view input_claim, std::string_view masked_claim,
                       std::span<const std::string> evidence);

std::string generate(std::string_view prompt);

class StubTransport final : public Transport {
public:
    explicit StubTransport(const BackendProfile& profile)
        : seed_(profile.stub_seed), dim_(profile.stub_embedding_dim) {}

    HttpResponse post(std::string_view path, const std::string& body,
                      std::chrono::milliseconds timeout) override;

    /// Same dispatch without the JSON text round trip.
    nlohmann::json handle(std::string_view path, const nlohmann::json& payload) const;

private:
    std::uint64_t seed_;
    int dim_;
};

}  // namespace factfix::stub
