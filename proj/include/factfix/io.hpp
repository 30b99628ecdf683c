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

#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "factfix/types.hpp"

namespace factfix {

/// Streams a JSON Lines file one object at a time. Blank lines are skipped.
class JsonlReader {
public:
    /// Throws CorpusNotFound-style IoFailure if the file cannot be opened.
    explicit JsonlReader(const std::string& path);

    /// Next parsed line, or nullopt at end of file. Throws ParseError with the line number.
    std::optional<nlohmann::json> next();

    std::size_t line_number() const noexcept { return line_no_; }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
};

/// Keys: id, claim, gold_correction?, gold_evidence?, label?
Claim claim_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Claim& claim);

std::vector<Claim> read_claims(const std::string& path);

/// Compact single-line dump with a trailing newline.
std::string jsonl_line(const nlohmann::json& j);

/// Whole file as bytes. Throws IoFailure.
std::string read_file(const std::string& path);

/// Writes to a sibling temp file, then renames over path. Throws IoFailure.
void write_file(const std::string& path, std::string_view bytes);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// UTC "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace factfix
