// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0
//
// rankfair: build gendered job-title test sets, measure gender bias in
// embedding rankings and render the result tables.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankfair/bias_eval.hpp"
#include "rankfair/corpus_model.hpp"
#include "rankfair/dataset_builder.hpp"
#include "rankfair/digest.hpp"
#include "rankfair/embedding_provider.hpp"
#include "rankfair/error.hpp"
#include "rankfair/rank_metrics.hpp"
#include "rankfair/report.hpp"
#include "rankfair/synthetic_fixture.hpp"

namespace fs = std::filesystem;
using namespace rankfair;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitProvider = 3;

struct UsageError : Error {
    using Error::Error;
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << content;
    if (!out) throw ValidationError("failed writing " + path);
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

std::string render(const ReportDocument& doc, const std::string& format) {
    if (format == "md") return to_markdown(doc);
    if (format == "csv") return to_csv(doc);
    return to_json(doc).dump(2) + "\n";
}

std::vector<std::string> read_id_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ids.push_back(line);
    }
    return ids;
}

HttpOptions http_options(int timeout_ms, std::size_t batch_limit) {
    HttpOptions options;
    options.timeout = std::chrono::milliseconds(timeout_ms);
    options.batch_limit = batch_limit;
    return options;
}

std::shared_ptr<const EmbeddingProvider> open_provider(const ProviderSpec& spec, const HttpOptions& http,
                                                       const std::string& cache_dir) {
    auto provider = make_provider(spec, http);
    if (!cache_dir.empty()) provider = std::make_shared<CachingProvider>(provider, cache_dir);
    return provider;
}

ProviderSpec provider_spec(const std::string& text, std::size_t dim) {
    ProviderSpec spec;
    try {
        spec = parse_provider_spec(text);
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    if (dim != 0) spec.dim = dim;
    return spec;
}

// --- subcommands -------------------------------------------------------------

struct BuildArgs {
    std::string source, lang, backend, templates, out, report, partial;
    std::size_t max_in_flight = 1;
    int timeout_ms = 10000;
    std::size_t retries = 2;
};

int run_build(const BuildArgs& a) {
    HttpBackendOptions http;
    http.timeout = std::chrono::milliseconds(a.timeout_ms);
    http.retries = a.retries;
    if (!a.backend.starts_with("mock:") && !a.backend.starts_with("http:")) {
        throw UsageError("--backend must be mock:<table> or http:<url>");
    }
    const auto backend = make_translation_backend(a.backend, http);
    const TemplateConfig config = load_template_config(a.templates);
    BuildOptions options;
    options.max_in_flight = a.max_in_flight;
    if (!a.partial.empty()) options.partial_progress = fs::path(a.partial);
    const BuildResult result = build_test_set(fs::path(a.source), a.lang, config, *backend, options);
    save_test_set(result.test_set, a.out);
    write_text(a.report.empty() ? "-" : a.report, to_json(result.report).dump(2) + "\n");
    return 0;
}

struct EvaluateArgs {
    std::vector<std::string> testsets, providers, views{"m"};
    bool include_neutral = false;
    std::string out;
    std::size_t threads = 1;
    std::size_t dim = 0;
    std::string cache_dir;
    int timeout_ms = 30000;
    std::size_t batch_limit = 64;
};

int run_evaluate(const EvaluateArgs& a) {
    std::vector<TestSet> sets;
    std::map<std::string, std::string> metadata;
    metadata["tool_version"] = RANKFAIR_VERSION;
    metadata["created_at"] = utc_timestamp();
    for (const auto& path : a.testsets) {
        sets.push_back(load_test_set(path));
        metadata["testset." + sets.back().language + ".path"] = path;
        metadata["testset." + sets.back().language + ".sha256"] = sha256_file_hex(path);
    }
    std::vector<ProviderSpec> specs;
    for (const auto& p : a.providers) specs.push_back(provider_spec(p, a.dim));
    for (std::size_t i = 0; i < specs.size(); ++i) metadata["provider." + std::to_string(i)] = specs[i].to_string();
    std::vector<CorpusView> views;
    for (const auto& v : a.views) views.push_back(parse_corpus_view(v));
    metadata["include_neutral_in_rbo"] = a.include_neutral ? "true" : "false";

    EvalOptions options;
    options.include_neutral_in_rbo = a.include_neutral;
    options.threads = a.threads;
    const HttpOptions http = http_options(a.timeout_ms, a.batch_limit);
    const auto entries = evaluate_matrix(sets, specs, views, options, [&](const ProviderSpec& spec) {
        return open_provider(spec, http, a.cache_dir);
    });
    RunsFile file = runs_file_from_matrix(entries);
    file.metadata = std::move(metadata);
    write_text(a.out, to_json(file).dump(2) + "\n");
    for (const auto& f : file.failures) {
        std::cerr << "rankfair: " << f.language << " / " << f.provider << " / " << to_string(f.view)
                  << " failed: " << f.error << "\n";
    }
    return file.failures.empty() ? 0 : kExitProvider;
}

struct ReportArgs {
    std::string runs, metric = "rbo", format = "md", view = "m", out;
};

int run_report(const ReportArgs& a) {
    const RunsFile file = runs_file_from_json(read_json_file(a.runs));
    const CorpusView view = parse_corpus_view(a.view);
    ReportDocument doc = a.metric == "rbo" ? render_rbo_table(file.runs, view) : render_map_table(file.runs, view);
    doc.metadata = file.metadata;
    write_text(a.out, render(doc, a.format));
    return 0;
}

struct InspectArgs {
    std::string testset, provider, query_id, view = "m", format = "md", out, cache_dir;
    std::size_t k = 20;
    std::size_t dim = 0;
    int timeout_ms = 30000;
};

int run_inspect(const InspectArgs& a) {
    const TestSet set = load_test_set(a.testset);
    const auto it = std::find_if(set.queries.begin(), set.queries.end(),
                                 [&](const QueryPair& q) { return q.id == a.query_id; });
    if (it == set.queries.end()) throw ValidationError("no query with id \"" + a.query_id + "\"");
    const auto provider = open_provider(provider_spec(a.provider, a.dim), http_options(a.timeout_ms, 64), a.cache_dir);
    const GenderView view = gender_view(set, parse_corpus_view(a.view));
    ReportDocument doc = render_inspection(inspect_top_k(*it, view, *provider, a.k));
    doc.metadata["model_name"] = provider->model_name();
    doc.metadata["testset.sha256"] = sha256_file_hex(a.testset);
    write_text(a.out, render(doc, a.format));
    return 0;
}

struct RboArgs {
    std::string left, right;
    std::optional<double> persistence;
};

int run_rbo(const RboArgs& a) {
    LabelTable labels;
    const Ranking left = make_ranking(read_id_lines(a.left), labels);
    const Ranking right = make_ranking(read_id_lines(a.right), labels);
    const MetricScore score = a.persistence ? rbo_exponential(left, right, *a.persistence) : rbo_uniform(left, right);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", score.value);
    std::cout << buf << "\n";
    return 0;
}

struct SummarizeArgs {
    std::vector<std::string> testsets;
    std::string format = "md", out;
};

int run_summarize(const SummarizeArgs& a) {
    std::vector<TestSetSummary> summaries;
    for (const auto& path : a.testsets) summaries.push_back(summarize(load_test_set(path)));
    write_text(a.out, render(render_summary_table(summaries), a.format));
    return 0;
}

struct GenerateArgs {
    std::string shape = "standard", out;
    std::optional<std::uint64_t> seed;
};

int run_generate(const GenerateArgs& a) {
    SyntheticSetShape shape = a.shape == "standard" ? standard_shape() : language_shape(a.shape);
    if (a.seed) shape.seed = *a.seed;
    save_test_set(make_synthetic_test_set(shape), a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gender bias measurement for multilingual job-title retrieval"};
    app.set_version_flag("--version", std::string(RANKFAIR_VERSION));
    app.require_subcommand(1);

    BuildArgs build;
    auto* build_cmd = app.add_subcommand("build-dataset", "Translate source titles into a gendered test set");
    build_cmd->add_option("--source", build.source, "Source titles (JSONL)")->required()->check(CLI::ExistingFile);
    build_cmd->add_option("--lang", build.lang, "Target language code")->required();
    build_cmd->add_option("--backend", build.backend, "mock:<table> or http:<url>")->required();
    build_cmd->add_option("--templates", build.templates, "Template configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    build_cmd->add_option("--out", build.out, "Output test set (JSONL)")->required();
    build_cmd->add_option("--report", build.report, "Build report destination (default stdout)");
    build_cmd->add_option("--partial-progress", build.partial, "Where to save translations if the backend fails");
    build_cmd->add_option("--max-in-flight", build.max_in_flight, "Concurrent translation calls")
        ->check(CLI::PositiveNumber);
    build_cmd->add_option("--timeout-ms", build.timeout_ms, "HTTP backend timeout")->check(CLI::PositiveNumber);
    build_cmd->add_option("--retries", build.retries, "HTTP backend retries");

    EvaluateArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Run RBO and MAP over test sets, providers and views");
    eval_cmd->add_option("--testset", eval.testsets, "Test set (repeatable)")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--provider", eval.providers, "file:<path>, synthetic:<seed>,<weight>[,<dim>] or http:<url>")
        ->required();
    eval_cmd->add_option("--view", eval.views, "Corpus view m or f (repeatable)")
        ->check(CLI::IsMember({"m", "f", "masculine", "feminine"}));
    eval_cmd->add_flag("--include-neutral-in-rbo", eval.include_neutral, "Count neutral queries in the RBO average");
    eval_cmd->add_option("--out", eval.out, "runs.json destination (default stdout)");
    eval_cmd->add_option("--threads", eval.threads, "Worker threads, 0 for all cores");
    eval_cmd->add_option("--dim", eval.dim, "Expected or synthetic embedding dimension");
    eval_cmd->add_option("--cache-dir", eval.cache_dir, "Embedding cache directory");
    eval_cmd->add_option("--timeout-ms", eval.timeout_ms, "HTTP provider timeout")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--batch-limit", eval.batch_limit, "HTTP provider batch size")->check(CLI::PositiveNumber);

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Render a results table from runs.json");
    report_cmd->add_option("--runs", report.runs, "runs.json")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--metric", report.metric, "rbo or map")->check(CLI::IsMember({"rbo", "map"}));
    report_cmd->add_option("--format", report.format, "md, csv or json")->check(CLI::IsMember({"md", "csv", "json"}));
    report_cmd->add_option("--view", report.view, "Corpus view m or f")
        ->check(CLI::IsMember({"m", "f", "masculine", "feminine"}));
    report_cmd->add_option("--out", report.out, "Destination (default stdout)");

    InspectArgs inspect;
    auto* inspect_cmd = app.add_subcommand("inspect", "Show top-k results for the two forms of one query");
    inspect_cmd->add_option("--testset", inspect.testset, "Test set")->required()->check(CLI::ExistingFile);
    inspect_cmd->add_option("--provider", inspect.provider, "Embedding provider")->required();
    inspect_cmd->add_option("--query-id", inspect.query_id, "Query id")->required();
    inspect_cmd->add_option("--k", inspect.k, "Rows to show")->check(CLI::PositiveNumber);
    inspect_cmd->add_option("--view", inspect.view, "Corpus view m or f")
        ->check(CLI::IsMember({"m", "f", "masculine", "feminine"}));
    inspect_cmd->add_option("--format", inspect.format, "md, csv or json")
        ->check(CLI::IsMember({"md", "csv", "json"}));
    inspect_cmd->add_option("--out", inspect.out, "Destination (default stdout)");
    inspect_cmd->add_option("--dim", inspect.dim, "Expected or synthetic embedding dimension");
    inspect_cmd->add_option("--cache-dir", inspect.cache_dir, "Embedding cache directory");
    inspect_cmd->add_option("--timeout-ms", inspect.timeout_ms, "HTTP provider timeout")->check(CLI::PositiveNumber);

    RboArgs rbo;
    auto* rbo_cmd = app.add_subcommand("rbo", "RBO between two ranked id lists, one id per line");
    rbo_cmd->add_option("--left", rbo.left, "First ranking")->required()->check(CLI::ExistingFile);
    rbo_cmd->add_option("--right", rbo.right, "Second ranking")->required()->check(CLI::ExistingFile);
    rbo_cmd->add_option("--p", rbo.persistence, "Use the exponential form with this persistence");

    SummarizeArgs sum;
    auto* sum_cmd = app.add_subcommand("summarize", "Count paired and neutral titles per test set");
    sum_cmd->add_option("--testset", sum.testsets, "Test set (repeatable)")->required()->check(CLI::ExistingFile);
    sum_cmd->add_option("--format", sum.format, "md, csv or json")->check(CLI::IsMember({"md", "csv", "json"}));
    sum_cmd->add_option("--out", sum.out, "Destination (default stdout)");

    GenerateArgs gen;
    auto* gen_cmd = app.add_subcommand("generate-synthetic", "Write a synthetic test set");
    gen_cmd->add_option("--shape", gen.shape, "standard, de, es, fr or pt")
        ->check(CLI::IsMember({"standard", "de", "es", "fr", "pt"}));
    gen_cmd->add_option("--seed", gen.seed, "Override the shape's seed");
    gen_cmd->add_option("--out", gen.out, "Output test set")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*build_cmd) return run_build(build);
        if (*eval_cmd) return run_evaluate(eval);
        if (*report_cmd) return run_report(report);
        if (*inspect_cmd) return run_inspect(inspect);
        if (*rbo_cmd) return run_rbo(rbo);
        if (*sum_cmd) return run_summarize(sum);
        if (*gen_cmd) return run_generate(gen);
    } catch (const UsageError& e) {
        std::cerr << "rankfair: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ProviderError& e) {
        std::cerr << "rankfair: provider failure: " << e.what() << "\n";
        return kExitProvider;
    } catch (const BackendError& e) {
        std::cerr << "rankfair: backend failure: " << e.what() << "\n";
        return kExitProvider;
    } catch (const std::exception& e) {
        std::cerr << "rankfair: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
