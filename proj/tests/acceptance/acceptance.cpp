// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rankfair/bias_eval.hpp"
#include "rankfair/corpus_model.hpp"
#include "rankfair/dataset_builder.hpp"
#include "rankfair/embedding_provider.hpp"
#include "rankfair/rank_metrics.hpp"
#include "rankfair/report.hpp"
#include "rankfair/retrieval.hpp"
#include "rankfair/synthetic_fixture.hpp"
#include "support/oracles.hpp"
#include "support/report_grid.hpp"

namespace fs = std::filesystem;
using namespace rankfair;

namespace {

const fs::path kShipped = RANKFAIR_SHIPPED_DATA_DIR;
const fs::path kData = RANKFAIR_TEST_DATA_DIR;

constexpr double kOracleTolerance = 1e-12;
constexpr double kRboOracleSeconds = 10.0;
constexpr double kLn2Tolerance = 0.002;
constexpr double kDialCeilingAtWeight2 = 0.95;
constexpr double kEvalRunSeconds = 30.0;
constexpr double kMinSpeedup = 10.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome rbo_oracle_equivalence() {
    testing::Gen gen(20250101);
    const auto start = Clock::now();
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto s = gen.permutation(gen.size(1, 200));
        const auto t = gen.perturb(s);
        const double got = rbo_uniform(Ranking(s), Ranking(t)).value;
        const double want = testing::naive_rbo(testing::labels_of(s), testing::labels_of(t));
        worst = std::max(worst, std::abs(got - want));
    }
    const double elapsed = seconds_since(start);
    return {worst <= kOracleTolerance && elapsed < kRboOracleSeconds,
            fmt("1000 pairs, max |diff| = %.3g (tol 1e-12), %.2f s (limit 10 s)", worst, elapsed)};
}

Outcome rbo_closed_cases() {
    testing::Gen gen(7);
    bool identical = true;
    for (int i = 0; i < 100; ++i) {
        const Ranking s(gen.permutation(gen.size(1, 500)));
        identical = identical && rbo_uniform(s, s).value == 1.0;
    }
    const double swap = rbo_uniform(Ranking({0, 1}), Ranking({1, 0})).value;
    const double rev4 = rbo_uniform(Ranking({0, 1, 2, 3}), Ranking({3, 2, 1, 0})).value;
    const bool ok = identical && swap == 0.5 && std::abs(rev4 - 5.0 / 12.0) <= kOracleTolerance;
    return {ok, std::string("identical lists == 1.0: ") + (identical ? "yes" : "no") +
                    fmt("; [a,b] vs [b,a] = %.17g; 4-reverse minus 5/12 = %.3g (tol 1e-12)", swap, rev4 - 5.0 / 12.0)};
}

Outcome reverse_curve() {
    bool ok = true;
    std::string detail;
    double at_10000 = 0.0;
    for (std::size_t k : {2u, 3u, 10u, 100u, 1000u, 10000u}) {
        std::vector<std::uint32_t> s(k);
        for (std::size_t i = 0; i < k; ++i) s[i] = static_cast<std::uint32_t>(i);
        const std::vector<std::uint32_t> t(s.rbegin(), s.rend());
        const double got = rbo_uniform(Ranking(s), Ranking(t)).value;
        const double want = testing::reversed_closed_form(k);
        ok = ok && std::abs(got - want) <= kOracleTolerance;
        detail += "k=" + std::to_string(k) + ":" + fmt("%.6f", got) + " ";
        if (k == 10000) at_10000 = got;
    }
    const double limit = 1.0 - std::log(2.0);
    ok = ok && std::abs(at_10000 - limit) <= kLn2Tolerance;
    return {ok, detail + fmt("| k=10000 vs 1-ln2 = %.6f, |diff| = %.2e (tol 0.002)", limit,
                             std::abs(at_10000 - limit))};
}

TestSet null_test_set() {
    SyntheticSetShape shape;
    shape.language = "xx";
    shape.paired_queries = 180;
    shape.neutral_queries = 20;
    shape.paired_corpus = 4000;
    shape.neutral_corpus = 1000;
    shape.seed = 4242;
    return make_synthetic_test_set(shape);
}

Outcome gender_blind_null() {
    const TestSet set = null_test_set();
    const SyntheticProvider blind(4242, 0.0);
    EvalOptions options;
    options.threads = 0;
    bool ok = true;
    std::string detail = fmt("%.0f queries x %.0f items; ", static_cast<double>(set.queries.size()),
                             static_cast<double>(set.corpus.size()));
    for (CorpusView view : {CorpusView::masculine_corpus, CorpusView::feminine_corpus}) {
        const EvalRun run = evaluate_run(set, view, blind, options);
        const bool view_ok = run.mean_rbo.value == 1.0 && run.map_feminine && run.map_masculine &&
                             run.map_feminine->value == run.map_masculine->value;
        ok = ok && view_ok;
        detail += std::string(to_string(view)) + fmt(": mean_rbo=%.17g map_f=%.17g map_m=%.17g; ",
                                                     run.mean_rbo.value, run.map_feminine->value,
                                                     run.map_masculine->value);
    }
    return {ok, detail};
}

Outcome gender_dial() {
    const TestSet set = make_synthetic_test_set(standard_shape());
    EvalOptions options;
    options.threads = 0;
    std::vector<double> values;
    std::string detail = "mean_rbo:";
    for (double w : {0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0}) {
        const SyntheticProvider dial(standard_shape().seed, w);
        values.push_back(evaluate_run(set, CorpusView::masculine_corpus, dial, options).mean_rbo.value);
        detail += fmt(" w=%g:%.6f", w, values.back());
    }
    bool monotone = true;
    for (std::size_t i = 1; i < values.size(); ++i) monotone = monotone && values[i] <= values[i - 1];
    const bool ok = values.front() == 1.0 && monotone && values.back() < kDialCeilingAtWeight2;
    return {ok, detail + " (starts at 1.0, non-increasing, < 0.95 at w=2)"};
}

Outcome map_oracle() {
    testing::Gen gen(99);
    double worst = 0.0;
    bool perfect = true;
    for (int i = 0; i < 1000; ++i) {
        const auto ids = gen.permutation(gen.size(1, 300));
        std::vector<ItemId> rel;
        std::set<std::string> rel_labels;
        const double density = gen.uniform(0.01, 0.5);
        for (auto id : ids) {
            if (gen.coin(density)) {
                rel.push_back(id);
                rel_labels.insert("i" + std::to_string(id));
            }
        }
        if (rel.empty()) {
            rel.push_back(ids.back());
            rel_labels.insert("i" + std::to_string(ids.back()));
        }
        const double got = average_precision(Ranking(ids), rel).value;
        worst = std::max(worst, std::abs(got - testing::brute_force_ap(testing::labels_of(ids), rel_labels)));

        const std::size_t m = gen.size(1, ids.size());
        perfect = perfect && average_precision(Ranking(ids), std::vector<ItemId>(ids.begin(), ids.begin() + m))
                                     .value == 1.0;
    }
    return {worst <= kOracleTolerance && perfect,
            fmt("1000 instances, max |diff| = %.3g (tol 1e-12); perfect rankings == 1.0: %.0f", worst,
                perfect ? 1.0 : 0.0)};
}

Outcome dataset_conservation() {
    const TemplateConfig config = load_template_config(kShipped / "templates" / "templates.json");
    const auto backend = make_translation_backend("mock:" + (kShipped / "build_es" / "mock_es.jsonl").string());
    const fs::path dir = fs::temp_directory_path() / "rankfair_acceptance_build";
    fs::create_directories(dir);
    const fs::path source = kShipped / "build_es" / "source.jsonl";
    const BuildResult first = build_test_set(source, "es", config, *backend);
    save_test_set(first.test_set, dir / "first.jsonl");
    const BuildResult second = build_test_set(source, "es", config, *backend);
    save_test_set(second.test_set, dir / "second.jsonl");
    const MergeReport& c = first.report.corpus.merge;
    const TestSetSummary s = summarize(first.test_set);
    const bool identical = slurp(dir / "first.jsonl") == slurp(dir / "second.jsonl");
    const bool ok = c.inputs == 5 && c.paired == 3 && c.neutral == 1 && c.duplicates_removed == 1 &&
                    c.inputs == c.paired + c.neutral + c.duplicates_removed &&
                    s.corpus.total() == 2 * s.corpus.paired + s.corpus.neutral && s.corpus.total() == 7 &&
                    identical;
    fs::remove_all(dir);
    return {ok, "5 titles -> " + std::to_string(c.paired) + " paired + " + std::to_string(c.neutral) +
                    " neutral, duplicates_removed=" + std::to_string(c.duplicates_removed) +
                    ", T=" + std::to_string(s.corpus.total()) + ", rerun byte-identical: " + (identical ? "yes" : "no")};
}

Outcome language_shape_audit() {
    const struct {
        const char* lang;
        std::size_t qp, qn, qt, cp, cn, ct;
    } rows[] = {{"de", 99, 5, 203, 2264, 201, 4729},
                {"es", 81, 23, 185, 2052, 557, 4661},
                {"fr", 60, 44, 164, 1566, 985, 4117},
                {"pt", 75, 29, 179, 1703, 899, 4305}};
    bool ok = true;
    std::string detail;
    for (const auto& r : rows) {
        const TestSetSummary s = summarize(load_test_set(kShipped / "fixtures" / (std::string(r.lang) + "_shaped.jsonl")));
        const bool row_ok = s.queries.total() == 2 * s.queries.paired + s.queries.neutral &&
                            s.corpus.total() == 2 * s.corpus.paired + s.corpus.neutral && s.queries.paired == r.qp &&
                            s.queries.neutral == r.qn && s.queries.total() == r.qt && s.corpus.paired == r.cp &&
                            s.corpus.neutral == r.cn && s.corpus.total() == r.ct;
        ok = ok && row_ok;
        detail += std::string(r.lang) + " q " + std::to_string(s.queries.paired) + "/" +
                  std::to_string(s.queries.neutral) + "/" + std::to_string(s.queries.total()) + " c " +
                  std::to_string(s.corpus.paired) + "/" + std::to_string(s.corpus.neutral) + "/" +
                  std::to_string(s.corpus.total()) + "; ";
    }
    return {ok, detail};
}

Outcome determinism() {
    const std::vector<EmbeddingVector> same(1000, EmbeddingVector::normalized({0.3, -0.2, 0.9}));
    const RankedCorpus ranked = rank_corpus(EmbeddingVector::normalized({1.0, 2.0, 3.0}), same);
    bool corpus_order = true;
    for (std::size_t i = 0; i < same.size(); ++i) corpus_order = corpus_order && ranked.ranking[i] == i;

    std::vector<TestSet> sets;
    for (const char* l : {"es", "fr"}) sets.push_back(load_test_set(kShipped / "fixtures" / (std::string(l) + "_shaped.jsonl")));
    const std::vector<ProviderSpec> providers{parse_provider_spec("synthetic:11,0.3,64"),
                                              parse_provider_spec("synthetic:12,1.5,64")};
    const std::vector<CorpusView> views{CorpusView::masculine_corpus, CorpusView::feminine_corpus};
    EvalOptions options;
    options.threads = 0;
    const auto a = evaluate_matrix(sets, providers, views, options);
    const auto b = evaluate_matrix(sets, providers, views, options);
    bool identical = a.size() == b.size() && a.size() == 8;
    for (std::size_t i = 0; identical && i < a.size(); ++i) {
        identical = a[i].ok() && b[i].ok() && *a[i].run == *b[i].run;
    }
    return {corpus_order && identical,
            std::string("identical-vector corpus keeps order: ") + (corpus_order ? "yes" : "no") +
                "; 2 fixtures x 2 providers x 2 views rerun bit-identical: " + (identical ? "yes" : "no")};
}

Outcome performance() {
    SyntheticSetShape shape;
    shape.language = "xx";
    shape.paired_queries = 200;
    shape.paired_corpus = 4000;
    shape.neutral_corpus = 1000;
    shape.seed = 77;
    const TestSet set = make_synthetic_test_set(shape);
    const SyntheticProvider dial(77, 0.5, 384);
    EvalOptions single;
    single.threads = 1;
    const auto start = Clock::now();
    const EvalRun run = evaluate_run(set, CorpusView::masculine_corpus, dial, single);
    const double eval_seconds = seconds_since(start);

    testing::Gen gen(5000);
    const auto s = gen.permutation(5000);
    auto t = s;
    std::shuffle(t.begin(), t.end(), gen.engine());
    const Ranking rs(s), rt(t);
    const auto fast_start = Clock::now();
    double fast_value = 0.0;
    constexpr int kRepeats = 20;
    for (int i = 0; i < kRepeats; ++i) fast_value = rbo_uniform(rs, rt).value;
    const double fast = seconds_since(fast_start) / kRepeats;
    const auto naive_start = Clock::now();
    const double naive_value = testing::naive_rbo_ids(s, t);
    const double naive = seconds_since(naive_start);
    const double speedup = naive / fast;

    const bool ok = run.counts.rbo_evaluated == 200 && eval_seconds < kEvalRunSeconds && speedup >= kMinSpeedup &&
                    std::abs(fast_value - naive_value) <= kOracleTolerance;
    return {ok, fmt("evaluate_run 200 x 5000 dim 384 single-thread: %.2f s (limit 30 s); "
                    "RBO k=5000 incremental %.3g s vs naive %.3g s",
                    eval_seconds, fast, naive) +
                    fmt(", speedup %.0fx (min 10x)", speedup)};
}

Outcome report_shape() {
    const auto runs = testing::golden_rbo_runs();
    const ReportDocument doc = render_rbo_table(runs, CorpusView::masculine_corpus);
    const std::string rendered = to_markdown(doc);
    const std::string golden = slurp(kData / "golden" / "rbo_table_5x4.md");
    const bool shape = doc.rows.size() == 5 && doc.headers.size() == 5;
    return {shape && rendered == golden && !golden.empty(),
            std::string("5 models x 4 languages; markdown matches golden file: ") + (rendered == golden ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"RBO oracle equivalence", rbo_oracle_equivalence},
        {"RBO closed cases", rbo_closed_cases},
        {"Reverse-list curve", reverse_curve},
        {"Gender-blind null test", gender_blind_null},
        {"Gender-dial monotonicity", gender_dial},
        {"MAP oracle", map_oracle},
        {"Dataset-builder conservation", dataset_conservation},
        {"Language-shape count invariant", language_shape_audit},
        {"Determinism and tie-breaking", determinism},
        {"Desk-scale performance", performance},
        {"Report shape reproduction", report_shape},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("threw: ") + e.what()};
        }
        if (!outcome.pass) ++failures;
        std::printf("[%s] %s: %s\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
