// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

// Gender-bias evaluation: each query is run in its feminine and its
// masculine form against one fixed corpus view, the two full rankings are
// compared with uniform RBO, and the per-pair scores are averaged. Average
// precision is computed alongside, split by query gender.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankfair/corpus_model.hpp"
#include "rankfair/embedding_provider.hpp"
#include "rankfair/rank_metrics.hpp"
#include "rankfair/retrieval.hpp"

namespace rankfair {

enum class SkipReason { neutral_query, no_relevant_items };

std::string_view to_string(SkipReason reason);
SkipReason parse_skip_reason(std::string_view text);

struct PairResult {
    std::string query_id;
    std::optional<MetricScore> rbo;
    std::optional<MetricScore> ap_feminine;
    std::optional<MetricScore> ap_masculine;
    std::optional<SkipReason> skipped_reason;

    friend bool operator==(const PairResult&, const PairResult&) = default;
};

struct RunCounts {
    std::size_t rbo_evaluated = 0;
    std::size_t neutral_skipped = 0;
    std::size_t ap_evaluated = 0;
    std::size_t no_relevant_skipped = 0;

    friend bool operator==(const RunCounts&, const RunCounts&) = default;
};

struct EvalRun {
    std::string language;
    std::string model_name;
    CorpusView corpus_view = CorpusView::masculine_corpus;
    bool include_neutral_in_rbo = false;
    std::vector<PairResult> pair_results;
    MetricScore mean_rbo;
    /// Absent when no query has relevance judgments.
    std::optional<MetricScore> map_feminine;
    std::optional<MetricScore> map_masculine;
    RunCounts counts;

    friend bool operator==(const EvalRun&, const EvalRun&) = default;
};

struct EvalOptions {
    /// Neutral queries always count toward MAP. With this off (the default)
    /// they are left out of the RBO average.
    bool include_neutral_in_rbo = false;
    /// Worker threads for pair evaluation; 0 uses the hardware concurrency.
    std::size_t threads = 1;
};

/// A corpus view embedded once, shared by both query genders.
struct EmbeddedView {
    GenderView view;
    CorpusMatrix matrix;
};

EmbeddedView embed_view(const GenderView& view, const EmbeddingProvider& provider);

/// Relevant items of every judged query, as positions in the corpus (and
/// therefore in every gender view).
using PositionJudgments = std::unordered_map<std::string, std::vector<ItemId>>;
PositionJudgments judgments_by_position(const TestSet& test_set);

/// Evaluates one query against a pre-embedded view. `judgments` maps query
/// ids to relevant corpus positions. Provider failures are rethrown as
/// ProviderError naming the query.
PairResult evaluate_pair(const QueryPair& pair, const EmbeddedView& corpus, const EmbeddingProvider& provider,
                         const PositionJudgments& judgments, const EvalOptions& options = {});

/// Runs every query of the test set against one corpus view. Throws
/// DomainError when no query contributes to the RBO average.
EvalRun evaluate_run(const TestSet& test_set, CorpusView view, const EmbeddingProvider& provider,
                     const EvalOptions& options = {});

struct MatrixEntry {
    std::string language;
    std::string provider;  // spec string
    std::string model_name;
    CorpusView view = CorpusView::masculine_corpus;
    std::optional<EvalRun> run;
    std::string error;  // non-empty iff run is absent

    bool ok() const { return run.has_value(); }
};

using ProviderFactory = std::function<std::shared_ptr<const EmbeddingProvider>(const ProviderSpec&)>;

/// One entry per (test set, provider, view), in that nesting order. A
/// failing provider or run is recorded in its entries and the matrix carries
/// on.
std::vector<MatrixEntry> evaluate_matrix(std::span<const TestSet> test_sets, std::span<const ProviderSpec> providers,
                                         std::span<const CorpusView> views, const EvalOptions& options = {},
                                         const ProviderFactory& factory = {});

struct InspectionRow {
    std::size_t rank = 0;
    std::string feminine_result;
    std::string masculine_result;

    bool differs() const { return feminine_result != masculine_result; }
    friend bool operator==(const InspectionRow&, const InspectionRow&) = default;
};

struct Inspection {
    std::string query_id;
    std::string feminine_query;
    std::string masculine_query;
    CorpusView view = CorpusView::masculine_corpus;
    std::vector<InspectionRow> rows;
    MetricScore rbo;
};

/// Top-k results for the feminine and masculine forms side by side, plus
/// the pair's full-depth RBO. Requires 1 <= k <= view size.
Inspection inspect_top_k(const QueryPair& pair, const GenderView& view, const EmbeddingProvider& provider,
                         std::size_t k);

}  // namespace rankfair
