// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#include "rankfair/bias_eval.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "rankfair/error.hpp"

namespace rankfair {

namespace {

bool wants_rbo(const QueryPair& pair, const EvalOptions& options) {
    return !pair.neutral || options.include_neutral_in_rbo;
}

// Pair evaluation once both query forms are embedded.
PairResult score_pair(const QueryPair& pair, const EmbeddingVector& feminine, const EmbeddingVector& masculine,
                      const EmbeddedView& corpus, const PositionJudgments& judgments, const EvalOptions& options) {
    PairResult result;
    result.query_id = pair.id;
    const RankedCorpus fem = rank_corpus(feminine, corpus.matrix);
    const RankedCorpus masc = rank_corpus(masculine, corpus.matrix);
    if (wants_rbo(pair, options)) {
        result.rbo = rbo_uniform(fem.ranking, masc.ranking);
    } else {
        result.skipped_reason = SkipReason::neutral_query;
    }
    const auto it = judgments.find(pair.id);
    if (it != judgments.end() && !it->second.empty()) {
        result.ap_feminine = average_precision(fem.ranking, it->second);
        result.ap_masculine = average_precision(masc.ranking, it->second);
    } else if (!result.skipped_reason) {
        result.skipped_reason = SkipReason::no_relevant_items;
    }
    return result;
}

std::size_t worker_count(const EvalOptions& options, std::size_t jobs) {
    std::size_t n = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    return std::max<std::size_t>(1, std::min(n, jobs));
}

// Calls job(i) for i in [0, count) on `threads` workers. Rethrows the
// exception of the lowest failing index so errors do not depend on timing.
template <typename Job>
void parallel_for(std::size_t count, std::size_t threads, Job&& job) {
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        job(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

std::string_view to_string(SkipReason reason) {
    return reason == SkipReason::neutral_query ? "neutral_query" : "no_relevant_items";
}

SkipReason parse_skip_reason(std::string_view text) {
    if (text == "neutral_query") return SkipReason::neutral_query;
    if (text == "no_relevant_items") return SkipReason::no_relevant_items;
    throw ValidationError("unknown skip reason \"" + std::string(text) + "\"");
}

EmbeddedView embed_view(const GenderView& view, const EmbeddingProvider& provider) {
    std::vector<std::string> texts;
    texts.reserve(view.items.size());
    for (const auto& item : view.items) texts.push_back(item.surface);
    if (texts.empty()) throw DomainError("cannot evaluate against an empty corpus");
    const auto vectors = provider.embed_batch(texts, EmbedRole::passage);
    return {view, CorpusMatrix(vectors)};
}

PositionJudgments judgments_by_position(const TestSet& test_set) {
    std::unordered_map<std::string_view, ItemId> position;
    for (std::size_t i = 0; i < test_set.corpus.size(); ++i) {
        position.emplace(test_set.corpus[i].id, static_cast<ItemId>(i));
    }
    PositionJudgments out;
    for (const auto& [query_id, relevant] : test_set.judgments) {
        auto& ids = out[query_id];
        for (const auto& id : relevant) {
            const auto it = position.find(id);
            if (it == position.end()) throw ValidationError("judgment references unknown corpus item \"" + id + "\"");
            ids.push_back(it->second);
        }
    }
    return out;
}

PairResult evaluate_pair(const QueryPair& pair, const EmbeddedView& corpus, const EmbeddingProvider& provider,
                         const PositionJudgments& judgments, const EvalOptions& options) {
    std::vector<EmbeddingVector> vectors;
    try {
        const std::vector<std::string> texts = {pair.feminine, pair.masculine};
        vectors = provider.embed_batch(texts, EmbedRole::query);
    } catch (const ProviderError& e) {
        throw ProviderError("query \"" + pair.id + "\": " + e.what());
    }
    return score_pair(pair, vectors[0], vectors[1], corpus, judgments, options);
}

EvalRun evaluate_run(const TestSet& test_set, CorpusView view, const EmbeddingProvider& provider,
                     const EvalOptions& options) {
    if (test_set.queries.empty()) throw DomainError("test set has no queries");
    const EmbeddedView corpus = embed_view(gender_view(test_set, view), provider);
    const PositionJudgments judgments = judgments_by_position(test_set);

    // Both genders of every query in one batch; neutral queries once.
    std::vector<std::string> texts;
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    texts.reserve(2 * test_set.queries.size());
    for (const auto& q : test_set.queries) {
        const std::size_t fem = texts.size();
        texts.push_back(q.feminine);
        std::size_t masc = fem;
        if (q.masculine != q.feminine) {
            masc = texts.size();
            texts.push_back(q.masculine);
        }
        slots.emplace_back(fem, masc);
    }
    std::vector<EmbeddingVector> vectors;
    try {
        vectors = provider.embed_batch(texts, EmbedRole::query);
    } catch (const ProviderError& e) {
        throw ProviderError("embedding queries for " + test_set.language + ": " + e.what());
    }

    EvalRun run;
    run.language = test_set.language;
    run.model_name = provider.model_name();
    run.corpus_view = view;
    run.include_neutral_in_rbo = options.include_neutral_in_rbo;
    run.pair_results.resize(test_set.queries.size());
    parallel_for(test_set.queries.size(), worker_count(options, test_set.queries.size()), [&](std::size_t i) {
        const auto [fem, masc] = slots[i];
        run.pair_results[i] = score_pair(test_set.queries[i], vectors[fem], vectors[masc], corpus, judgments, options);
    });

    std::vector<double> rbos;
    std::vector<MetricScore> ap_f;
    std::vector<MetricScore> ap_m;
    std::size_t depth = 0;
    for (const auto& r : run.pair_results) {
        if (r.rbo) {
            rbos.push_back(r.rbo->value);
            depth = r.rbo->depth;
        }
        if (r.ap_feminine) ap_f.push_back(*r.ap_feminine);
        if (r.ap_masculine) ap_m.push_back(*r.ap_masculine);
        if (r.skipped_reason == SkipReason::neutral_query) ++run.counts.neutral_skipped;
        if (!r.ap_feminine) ++run.counts.no_relevant_skipped;
    }
    if (rbos.empty()) throw DomainError("every query was skipped; no RBO to average");
    run.counts.rbo_evaluated = rbos.size();
    run.counts.ap_evaluated = ap_f.size();
    run.mean_rbo = {mean(rbos), Metric::rbo_uniform, depth};
    if (!ap_f.empty()) {
        run.map_feminine = mean_average_precision(ap_f);
        run.map_masculine = mean_average_precision(ap_m);
    }
    return run;
}

std::vector<MatrixEntry> evaluate_matrix(std::span<const TestSet> test_sets, std::span<const ProviderSpec> providers,
                                         std::span<const CorpusView> views, const EvalOptions& options,
                                         const ProviderFactory& factory) {
    if (test_sets.empty() || providers.empty() || views.empty()) {
        throw DomainError("evaluation matrix needs at least one test set, provider and view");
    }
    // Providers are built once and shared by every test set.
    std::vector<std::shared_ptr<const EmbeddingProvider>> built(providers.size());
    std::vector<std::string> build_errors(providers.size());
    for (std::size_t p = 0; p < providers.size(); ++p) {
        try {
            built[p] = factory ? factory(providers[p]) : make_provider(providers[p]);
            if (!built[p]) throw ProviderError("provider factory returned nothing");
        } catch (const std::exception& e) {
            build_errors[p] = e.what();
        }
    }

    std::vector<MatrixEntry> entries;
    entries.reserve(test_sets.size() * providers.size() * views.size());
    for (const auto& test_set : test_sets) {
        for (std::size_t p = 0; p < providers.size(); ++p) {
            for (const CorpusView view : views) {
                MatrixEntry entry;
                entry.language = test_set.language;
                entry.provider = providers[p].to_string();
                entry.view = view;
                entry.model_name = built[p] ? built[p]->model_name() : providers[p].model_name;
                if (!built[p]) {
                    entry.error = build_errors[p];
                } else {
                    try {
                        entry.run = evaluate_run(test_set, view, *built[p], options);
                    } catch (const std::exception& e) {
                        entry.error = e.what();
                    }
                }
                entries.push_back(std::move(entry));
            }
        }
    }
    return entries;
}

Inspection inspect_top_k(const QueryPair& pair, const GenderView& view, const EmbeddingProvider& provider,
                         std::size_t k) {
    if (k == 0 || k > view.items.size()) {
        throw DomainError("k = " + std::to_string(k) + " outside [1, " + std::to_string(view.items.size()) + "]");
    }
    const EmbeddedView corpus = embed_view(view, provider);
    const std::vector<std::string> texts = {pair.feminine, pair.masculine};
    const auto vectors = provider.embed_batch(texts, EmbedRole::query);
    const RankedCorpus fem = rank_corpus(vectors[0], corpus.matrix);
    const RankedCorpus masc = rank_corpus(vectors[1], corpus.matrix);

    Inspection out;
    out.query_id = pair.id;
    out.feminine_query = pair.feminine;
    out.masculine_query = pair.masculine;
    out.view = view.view;
    out.rows.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.rows.push_back({i + 1, view.items[fem.ranking[i]].surface, view.items[masc.ranking[i]].surface});
    }
    out.rbo = rbo_uniform(fem.ranking, masc.ranking);
    return out;
}

}  // namespace rankfair
