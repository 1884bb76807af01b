// Copyright 2026-present the lire project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "lire/types.hpp"

namespace lire {

// Embedding file layout (all little-endian):
//   magic "LIEMB1\0\0" | u32 version=1 | u32 dim | u8 precision | 3 pad bytes
//   | u64 n_passages | per passage: u64 passage_id | u32 length | rows
// Rows are fp32 or fp16 depending on the precision tag; fp16 is widened on
// load. Norms are validated on load: deviation > 1e-2 rejects the file,
// deviation in (1e-3, 1e-2] renormalizes with a warning.
EmbeddingSet read_embeddings(const std::string& path);
void write_embeddings(const EmbeddingSet& set, const std::string& path);

// Qrels TSV: "query_id<TAB>passage_id", one pair per line, '#' comments and
// blank lines allowed. Duplicate pairs collapse to one entry.
Qrels read_qrels(const std::string& path);
void write_qrels(const Qrels& qrels, const std::string& path);

// Results TSV: "query_id<TAB>rank<TAB>passage_id<TAB>score", rank starting
// at 1 per query, score printed with 6 decimal places.
void write_results(const RankedResults& results, const std::string& path);
RankedResults read_results(const std::string& path);

}  // namespace lire
