// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rankfair/rank_metrics.hpp"

namespace rankfair {

/// A unit-length embedding. Construction normalizes; zero-norm or
/// non-finite input throws ProviderError.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    static EmbeddingVector normalized(std::vector<double> values);

    std::size_t dim() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

private:
    explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}
    std::vector<double> values_;
};

/// Dot product of two unit vectors, clamped to [-1, 1]. Throws DomainError
/// on a dimension mismatch.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Corpus embeddings packed row-major for exhaustive scoring. Row i is the
/// item at corpus-view position i.
class CorpusMatrix {
public:
    CorpusMatrix() = default;
    /// Throws DomainError on an empty corpus or mixed dimensions.
    explicit CorpusMatrix(std::span<const EmbeddingVector> rows);

    std::size_t rows() const { return rows_; }
    std::size_t dim() const { return dim_; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

private:
    std::vector<double> data_;
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
};

struct ScoredItem {
    ItemId position = 0;
    double score = 0.0;

    friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

/// Full-depth ranking of corpus positions by descending cosine; equal scores
/// keep ascending corpus position.
struct RankedCorpus {
    Ranking ranking;
    std::vector<ScoredItem> scored;
};

RankedCorpus rank_corpus(const EmbeddingVector& query, const CorpusMatrix& corpus);
RankedCorpus rank_corpus(const EmbeddingVector& query, std::span<const EmbeddingVector> corpus);

}  // namespace rankfair
