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

#include "lire/index.hpp"
#include "lire/types.hpp"

namespace lire {

// Exhaustive late-interaction scoring. This is the ground truth for the
// searcher's equivalence and recall tests, so it deliberately shares no
// scoring kernels with the search path: the loops below are written
// independently (same fixed accumulation order, separate code).

// Scores every corpus passage against every query, returns the top k under
// the (score desc, passage_id asc) rule. k larger than the corpus returns
// every passage.
RankedResults brute_force_search(const EmbeddingSet& queries, const EmbeddingSet& corpus,
                                 uint32_t k);

// Same, over the decoded (centroid + dequantized residual) corpus of an
// index. With clamp_rows, each per-query-row maximum clamps at zero,
// mirroring the candidate-generation invariant surface.
RankedResults brute_force_decoded(const EmbeddingSet& queries, const CompressedIndex& index,
                                  uint32_t k, bool clamp_rows = false);

}  // namespace lire
