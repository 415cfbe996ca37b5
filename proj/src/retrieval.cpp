// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#include "rankfair/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rankfair/error.hpp"

namespace rankfair {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    // Four independent accumulators; fixed order keeps results reproducible.
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n = a.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) acc[0] += a[i] * b[i];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

}  // namespace

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
    if (values.empty()) throw ProviderError("embedding has zero dimensions");
    double norm_sq = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw ProviderError("embedding contains a non-finite value");
        norm_sq += v * v;
    }
    const double norm = std::sqrt(norm_sq);
    if (!(norm > 0.0)) throw ProviderError("embedding has zero norm");
    for (double& v : values) v /= norm;
    return EmbeddingVector(std::move(values));
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw DomainError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
    return std::clamp(dot(a.values(), b.values()), -1.0, 1.0);
}

CorpusMatrix::CorpusMatrix(std::span<const EmbeddingVector> rows) {
    if (rows.empty()) throw DomainError("cannot rank an empty corpus");
    dim_ = rows.front().dim();
    rows_ = rows.size();
    data_.reserve(rows_ * dim_);
    for (const auto& row : rows) {
        if (row.dim() != dim_) {
            throw DomainError("corpus dimension mismatch: " + std::to_string(row.dim()) + " vs " +
                              std::to_string(dim_));
        }
        data_.insert(data_.end(), row.values().begin(), row.values().end());
    }
}

RankedCorpus rank_corpus(const EmbeddingVector& query, const CorpusMatrix& corpus) {
    if (corpus.rows() == 0) throw DomainError("cannot rank an empty corpus");
    if (query.dim() != corpus.dim()) {
        throw DomainError("query dimension " + std::to_string(query.dim()) + " does not match corpus dimension " +
                          std::to_string(corpus.dim()));
    }
    std::vector<ScoredItem> scored(corpus.rows());
    for (std::size_t i = 0; i < corpus.rows(); ++i) {
        scored[i] = {static_cast<ItemId>(i), std::clamp(dot(query.values(), corpus.row(i)), -1.0, 1.0)};
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredItem& a, const ScoredItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.position < b.position;
    });
    std::vector<ItemId> order;
    order.reserve(scored.size());
    for (const auto& s : scored) order.push_back(s.position);
    return {Ranking(std::move(order)), std::move(scored)};
}

RankedCorpus rank_corpus(const EmbeddingVector& query, std::span<const EmbeddingVector> corpus) {
    return rank_corpus(query, CorpusMatrix(corpus));
}

}  // namespace rankfair
