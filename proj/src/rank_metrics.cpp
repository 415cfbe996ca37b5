// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#include "rankfair/rank_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rankfair/error.hpp"

namespace rankfair {

namespace {

// Per-id flag storage. Flat array when ids are dense enough (always the case
// for rankings over corpus positions), hash map otherwise.
class FlagTable {
public:
    explicit FlagTable(std::span<const ItemId> ids) {
        ItemId max_id = 0;
        for (ItemId id : ids) max_id = std::max(max_id, id);
        if (static_cast<std::size_t>(max_id) < 8 * ids.size() + 64) {
            flat_.assign(static_cast<std::size_t>(max_id) + 1, 0);
        } else {
            sparse_.reserve(ids.size() * 2);
        }
    }

    // References stay valid across later lookups in either mode.
    std::uint8_t& operator[](ItemId id) {
        if (id < flat_.size()) return flat_[id];
        return sparse_[id];
    }

private:
    std::vector<std::uint8_t> flat_;
    std::unordered_map<ItemId, std::uint8_t> sparse_;
};

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            compensation_ += (sum_ - t) + x;
        } else {
            compensation_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

constexpr std::uint8_t kInS = 1;
constexpr std::uint8_t kInT = 2;

void require_comparable(const Ranking& s, const Ranking& t) {
    if (s.size() != t.size()) {
        throw DomainError("rankings differ in length (" + std::to_string(s.size()) + " vs " +
                          std::to_string(t.size()) + ")");
    }
    if (s.empty()) throw DomainError("cannot compare empty rankings");
}

// Walks both rankings once, calling visit(depth, overlap) for depth 1..k.
// Returns the overlap at full depth.
template <typename Visit>
std::size_t sweep_overlaps(const Ranking& s, const Ranking& t, Visit&& visit) {
    const std::size_t k = s.size();
    FlagTable seen(s.ids());
    std::size_t overlap = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const ItemId a = s[i];
        const ItemId b = t[i];
        if (a == b) {
            ++overlap;
        } else {
            std::uint8_t& fa = seen[a];
            if (fa & kInT) ++overlap;
            fa |= kInS;
            std::uint8_t& fb = seen[b];
            if (fb & kInS) ++overlap;
            fb |= kInT;
        }
        visit(i + 1, overlap);
    }
    return overlap;
}

void require_conjoint(std::size_t final_overlap, std::size_t k) {
    if (final_overlap != k) {
        throw DomainError("rankings are not conjoint: " + std::to_string(k - final_overlap) +
                          " items appear in only one of them");
    }
}

}  // namespace

Ranking::Ranking(std::vector<ItemId> ids) : ids_(std::move(ids)) {
    FlagTable seen(ids_);
    for (ItemId id : ids_) {
        std::uint8_t& flag = seen[id];
        if (flag) throw DomainError("ranking contains duplicate id " + std::to_string(id));
        flag = 1;
    }
}

ItemId LabelTable::intern(std::string_view label) {
    const auto [it, inserted] = ids_.try_emplace(std::string(label), static_cast<ItemId>(labels_.size()));
    if (inserted) labels_.emplace_back(label);
    return it->second;
}

Ranking make_ranking(std::span<const std::string> labels, LabelTable& table) {
    std::vector<ItemId> ids;
    ids.reserve(labels.size());
    for (const auto& label : labels) ids.push_back(table.intern(label));
    return Ranking(std::move(ids));
}

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::rbo_uniform:
            return "rbo_uniform";
        case Metric::rbo_exponential:
            return "rbo_exponential";
        case Metric::average_precision:
            return "average_precision";
        case Metric::mean_average_precision:
            return "mean_average_precision";
    }
    return "?";
}

std::size_t overlap_at_depth(const Ranking& s, const Ranking& t, std::size_t depth) {
    if (depth == 0 || depth > std::min(s.size(), t.size())) {
        throw DomainError("depth " + std::to_string(depth) + " outside [1, " +
                          std::to_string(std::min(s.size(), t.size())) + "]");
    }
    const auto s_prefix = s.ids().first(depth);
    const auto t_prefix = t.ids().first(depth);
    FlagTable seen(s_prefix);
    for (ItemId id : s_prefix) seen[id] = kInS;
    std::size_t overlap = 0;
    for (ItemId id : t_prefix) {
        if (seen[id] & kInS) ++overlap;
    }
    return overlap;
}

std::vector<std::size_t> prefix_overlaps(const Ranking& s, const Ranking& t) {
    require_comparable(s, t);
    std::vector<std::size_t> out;
    out.reserve(s.size());
    sweep_overlaps(s, t, [&](std::size_t, std::size_t overlap) { out.push_back(overlap); });
    return out;
}

MetricScore rbo_uniform(const Ranking& s, const Ranking& t) {
    require_comparable(s, t);
    const std::size_t k = s.size();
    CompensatedSum sum;
    const std::size_t final_overlap = sweep_overlaps(s, t, [&](std::size_t d, std::size_t overlap) {
        sum.add(static_cast<double>(overlap) / static_cast<double>(d));
    });
    require_conjoint(final_overlap, k);
    const double value = std::clamp(sum.value() / static_cast<double>(k), 0.0, 1.0);
    return {value, Metric::rbo_uniform, k};
}

MetricScore rbo_exponential(const Ranking& s, const Ranking& t, double persistence) {
    if (!(persistence > 0.0 && persistence < 1.0)) {
        throw DomainError("persistence p must lie in (0, 1), got " + std::to_string(persistence));
    }
    require_comparable(s, t);
    const std::size_t k = s.size();
    CompensatedSum sum;
    double weight = 1.0;
    const std::size_t final_overlap = sweep_overlaps(s, t, [&](std::size_t d, std::size_t overlap) {
        sum.add(weight * static_cast<double>(overlap) / static_cast<double>(d));
        weight *= persistence;
    });
    require_conjoint(final_overlap, k);
    const double value = std::clamp((1.0 - persistence) * sum.value(), 0.0, 1.0);
    return {value, Metric::rbo_exponential, k};
}

MetricScore average_precision(const Ranking& ranking, std::span<const ItemId> relevant) {
    if (relevant.empty()) throw DomainError("average precision is undefined without relevant items");
    FlagTable flags(ranking.ids());
    std::size_t distinct_relevant = 0;
    for (ItemId id : relevant) {
        std::uint8_t& f = flags[id];
        if (!f) ++distinct_relevant;
        f = kInS;
    }
    CompensatedSum sum;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size() && hits < distinct_relevant; ++i) {
        std::uint8_t& f = flags[ranking[i]];
        if (f & kInS) {
            ++hits;
            sum.add(static_cast<double>(hits) / static_cast<double>(i + 1));
            f |= kInT;
        }
    }
    if (hits != distinct_relevant) {
        throw DomainError(std::to_string(distinct_relevant - hits) + " relevant items are absent from the ranking");
    }
    const double value = std::clamp(sum.value() / static_cast<double>(distinct_relevant), 0.0, 1.0);
    return {value, Metric::average_precision, ranking.size()};
}

double mean(std::span<const double> values) {
    if (values.empty()) throw DomainError("mean of an empty list");
    CompensatedSum sum;
    for (double v : values) sum.add(v);
    return sum.value() / static_cast<double>(values.size());
}

MetricScore mean_average_precision(std::span<const MetricScore> average_precisions) {
    if (average_precisions.empty()) throw DomainError("mean average precision of an empty list");
    CompensatedSum sum;
    std::size_t depth = 0;
    for (const auto& ap : average_precisions) {
        sum.add(ap.value);
        depth = std::max(depth, ap.depth);
    }
    const double value = sum.value() / static_cast<double>(average_precisions.size());
    return {value, Metric::mean_average_precision, depth};
}

}  // namespace rankfair
