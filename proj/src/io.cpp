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

#include "factfix/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iterator>
#include <set>

#include <openssl/evp.h>

#include "factfix/error.hpp"
#include "factfix/text.hpp"

namespace factfix {

using nlohmann::json;

JsonlReader::JsonlReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) {
        fail(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
}

std::optional<json> JsonlReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (trim(line).empty()) {
            continue;
        }
        try {
            return json::parse(line);
        } catch (const json::parse_error& e) {
            fail(ErrorCode::ParseError,
                 path_ + ":" + std::to_string(line_no_) + ": " + e.what());
        }
    }
    return std::nullopt;
}

Claim claim_from_json(const json& j) {
    if (!j.is_object()) {
        fail(ErrorCode::ParseError, "claim record must be a JSON object");
    }
    Claim claim;
    try {
        claim.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
        claim.text = j.at("claim").get<std::string>();
        if (j.contains("gold_correction") && !j["gold_correction"].is_null()) {
            claim.gold_correction = j["gold_correction"].get<std::string>();
        }
        if (j.contains("gold_evidence") && !j["gold_evidence"].is_null()) {
            claim.gold_evidence = j["gold_evidence"].get<std::vector<std::string>>();
        }
        if (j.contains("label") && !j["label"].is_null()) {
            const auto text = j["label"].get<std::string>();
            claim.label = parse_label(text);
            if (!claim.label) {
                fail(ErrorCode::ParseError, "unknown label '" + text + "'");
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, std::string("malformed claim record: ") + e.what());
    }
    claim.validate();
    return claim;
}

json to_json(const Claim& claim) {
    json j = {{"id", claim.id}, {"claim", claim.text}};
    if (claim.gold_correction) {
        j["gold_correction"] = *claim.gold_correction;
    }
    if (claim.gold_evidence) {
        j["gold_evidence"] = *claim.gold_evidence;
    }
    if (claim.label) {
        j["label"] = to_string(*claim.label);
    }
    return j;
}

std::vector<Claim> read_claims(const std::string& path) {
    JsonlReader reader(path);
    std::vector<Claim> claims;
    std::set<std::string> seen;
    while (auto j = reader.next()) {
        auto claim = claim_from_json(*j);
        if (!seen.insert(claim.id).second) {
            fail(ErrorCode::ParseError, path + ":" + std::to_string(reader.line_number()) +
                                            ": duplicate claim id '" + claim.id + "'");
        }
        claims.push_back(std::move(claim));
    }
    return claims;
}

std::string jsonl_line(const json& j) {
    return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::string_view bytes) {
    const auto tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorCode::IoFailure, "cannot write '" + tmp + "'");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            fail(ErrorCode::IoFailure, "short write to '" + tmp + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        fail(ErrorCode::IoFailure, "cannot move '" + tmp + "' to '" + path + "': " + ec.message());
    }
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        fail(ErrorCode::IoFailure, "SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace factfix
