// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

// Generated test sets whose surface forms follow the synthetic embedder's
// "lemma#f" / "lemma#m" convention. Paired corpus items are "t<i>#f" /
// "t<i>#m", neutral ones "n<i>". Every query reuses the lemma of one corpus
// item, which is always among its relevant items.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "rankfair/corpus_model.hpp"

namespace rankfair {

struct SyntheticSetShape {
    std::string language = "xx";
    std::size_t paired_queries = 0;
    std::size_t neutral_queries = 0;
    std::size_t paired_corpus = 0;
    std::size_t neutral_corpus = 0;
    /// Relevant items per query, including the same-lemma item.
    std::size_t relevant_per_query = 3;
    std::uint64_t seed = 1;
};

/// Requires paired_queries <= paired_corpus, neutral_queries <=
/// neutral_corpus and relevant_per_query <= corpus size. Deterministic in
/// the shape.
TestSet make_synthetic_test_set(const SyntheticSetShape& shape);

/// Query and corpus counts of the published de/es/fr/pt test sets.
SyntheticSetShape language_shape(std::string_view language);

/// The fixture the bias-eval calibration sweep runs on: 100 paired and 10
/// neutral queries over 800 paired and 200 neutral corpus items.
SyntheticSetShape standard_shape();

}  // namespace rankfair
