// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

// Ranking comparison and ranking quality metrics.
//
// The bias metric is the uniform-weight rank-biased overlap
//
//     RBO(S, T) = 1/k * sum_{d=1..k} |S[:d] ∩ T[:d]| / d
//
// evaluated at full depth k = |S| = |T| over two conjoint rankings. The
// classic persistence-weighted form is available as rbo_exponential() and is
// never substituted for it.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rankfair {

using ItemId = std::uint32_t;

/// A total order over distinct item ids, best first.
class Ranking {
public:
    Ranking() = default;
    /// Throws DomainError if `ids` contains a duplicate.
    explicit Ranking(std::vector<ItemId> ids);

    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    std::span<const ItemId> ids() const { return ids_; }
    ItemId operator[](std::size_t i) const { return ids_[i]; }

    friend bool operator==(const Ranking&, const Ranking&) = default;

private:
    std::vector<ItemId> ids_;
};

/// Maps arbitrary string labels onto dense ItemIds so that label lists can
/// be compared with the metrics below.
class LabelTable {
public:
    ItemId intern(std::string_view label);
    const std::string& label(ItemId id) const { return labels_.at(id); }
    std::size_t size() const { return labels_.size(); }

private:
    std::unordered_map<std::string, ItemId> ids_;
    std::vector<std::string> labels_;
};

Ranking make_ranking(std::span<const std::string> labels, LabelTable& table);

enum class Metric { rbo_uniform, rbo_exponential, average_precision, mean_average_precision };

std::string_view to_string(Metric metric);

struct MetricScore {
    double value = 0.0;
    Metric metric = Metric::rbo_uniform;
    std::size_t depth = 0;

    friend bool operator==(const MetricScore&, const MetricScore&) = default;
};

inline constexpr double kDefaultPersistence = 0.98;

/// |s[:depth] ∩ t[:depth]|. Requires 1 <= depth <= min(|s|, |t|).
std::size_t overlap_at_depth(const Ranking& s, const Ranking& t, std::size_t depth);

/// Overlap at every depth 1..k for equal-length rankings, computed in one
/// pass. Element d-1 holds the overlap at depth d.
std::vector<std::size_t> prefix_overlaps(const Ranking& s, const Ranking& t);

/// Uniform-weight RBO at full depth. Requires |s| == |t| > 0 and that both
/// rank the same item set; violations throw DomainError. Returns exactly 1.0
/// iff s == t.
MetricScore rbo_uniform(const Ranking& s, const Ranking& t);

/// (1 - p) * sum_{d=1..k} p^(d-1) * |s[:d] ∩ t[:d]| / d, truncated at the
/// shared depth k. Same preconditions as rbo_uniform; p must lie in (0, 1).
MetricScore rbo_exponential(const Ranking& s, const Ranking& t, double persistence = kDefaultPersistence);

/// Binary-relevance average precision. `relevant` is treated as a set and
/// must be non-empty and contained in the ranking.
MetricScore average_precision(const Ranking& ranking, std::span<const ItemId> relevant);

/// Arithmetic mean with compensated summation. Throws on empty input.
double mean(std::span<const double> values);

/// Arithmetic mean of per-query average precisions. Throws on empty input.
MetricScore mean_average_precision(std::span<const MetricScore> average_precisions);

}  // namespace rankfair
