// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#include "rankfair/synthetic_fixture.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "rankfair/error.hpp"
#include "rankfair/splitmix.hpp"

namespace rankfair {

namespace {

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace

TestSet make_synthetic_test_set(const SyntheticSetShape& shape) {
    const std::size_t corpus_size = shape.paired_corpus + shape.neutral_corpus;
    if (shape.paired_queries > shape.paired_corpus || shape.neutral_queries > shape.neutral_corpus) {
        throw DomainError("every synthetic query needs a corpus item with its lemma");
    }
    if (shape.relevant_per_query > corpus_size) throw DomainError("more relevant items than corpus items");
    if (shape.language.empty()) throw DomainError("synthetic test set needs a language");

    SplitMix64 rng(splitmix64_mix(shape.seed) ^ fnv1a64(shape.language));

    // Lemma slots: paired first, then neutral; then shuffled into corpus order.
    std::vector<std::size_t> slots(corpus_size);
    std::iota(slots.begin(), slots.end(), 0);
    shuffle(slots, rng);

    TestSet set;
    set.language = shape.language;
    set.corpus.reserve(corpus_size);
    std::vector<std::size_t> position_of_slot(corpus_size);
    for (std::size_t pos = 0; pos < corpus_size; ++pos) {
        const std::size_t slot = slots[pos];
        position_of_slot[slot] = pos;
        CorpusItem item;
        item.id = "c" + std::to_string(pos);
        if (slot < shape.paired_corpus) {
            const std::string lemma = "t" + std::to_string(slot);
            item.feminine = lemma + "#f";
            item.masculine = lemma + "#m";
        } else {
            item.feminine = item.masculine = "n" + std::to_string(slot - shape.paired_corpus);
            item.neutral = true;
        }
        set.corpus.push_back(std::move(item));
    }

    const auto add_query = [&](std::size_t slot, std::size_t index) {
        const CorpusItem& own = set.corpus[position_of_slot[slot]];
        QueryPair q;
        q.id = "q" + std::to_string(index);
        q.feminine = own.feminine;
        q.masculine = own.masculine;
        q.neutral = own.neutral;
        auto& relevant = set.judgments[q.id];
        relevant.insert(own.id);
        while (relevant.size() < shape.relevant_per_query) {
            relevant.insert(set.corpus[static_cast<std::size_t>(rng.next_below(corpus_size))].id);
        }
        set.queries.push_back(std::move(q));
    };
    std::size_t index = 0;
    for (std::size_t i = 0; i < shape.paired_queries; ++i) add_query(i, index++);
    for (std::size_t i = 0; i < shape.neutral_queries; ++i) add_query(shape.paired_corpus + i, index++);
    if (shape.relevant_per_query == 0) set.judgments.clear();
    validate(set);
    return set;
}

SyntheticSetShape language_shape(std::string_view language) {
    SyntheticSetShape shape;
    shape.language = std::string(language);
    if (language == "de") {
        shape.paired_queries = 99, shape.neutral_queries = 5, shape.paired_corpus = 2264, shape.neutral_corpus = 201;
    } else if (language == "es") {
        shape.paired_queries = 81, shape.neutral_queries = 23, shape.paired_corpus = 2052, shape.neutral_corpus = 557;
    } else if (language == "fr") {
        shape.paired_queries = 60, shape.neutral_queries = 44, shape.paired_corpus = 1566, shape.neutral_corpus = 985;
    } else if (language == "pt") {
        shape.paired_queries = 75, shape.neutral_queries = 29, shape.paired_corpus = 1703, shape.neutral_corpus = 899;
    } else {
        throw DomainError("no published shape for language \"" + std::string(language) + "\"");
    }
    return shape;
}

SyntheticSetShape standard_shape() {
    SyntheticSetShape shape;
    shape.language = "xx";
    shape.paired_queries = 100;
    shape.neutral_queries = 10;
    shape.paired_corpus = 800;
    shape.neutral_corpus = 200;
    shape.relevant_per_query = 3;
    shape.seed = 20250101;
    return shape;
}

}  // namespace rankfair
