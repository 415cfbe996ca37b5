// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

// Building gender-annotated test sets from an English job-title dataset by
// template-induced translation. Each source title is wrapped in a masculine
// and a feminine carrier sentence, translated, stripped back to the bare
// title, lowercased, deduplicated, and merged into a neutral item when both
// genders come out identical.

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankfair/corpus_model.hpp"

namespace rankfair {

inline constexpr std::string_view kJobTitlePlaceholder = "{job_title}";

/// Carrier sentences for both genders. Each must contain the placeholder
/// exactly once; the constructor throws ValidationError otherwise.
class TemplatePair {
public:
    TemplatePair(std::string masculine, std::string feminine);

    const std::string& masculine() const { return masculine_; }
    const std::string& feminine() const { return feminine_; }

    /// The template for `gender` with the placeholder replaced. Throws
    /// DomainError on an empty title or a neutral gender.
    std::string wrap(std::string_view title, GenderTag gender) const;

private:
    std::string masculine_;
    std::string feminine_;
};

/// Ordered scaffold patterns for one language, written against lowercased
/// text. The first prefix pattern matching at the start is removed, then the
/// first suffix pattern matching at the end.
class StripRules {
public:
    StripRules() = default;
    StripRules(std::vector<std::string> prefixes, std::vector<std::string> suffixes);

    const std::vector<std::string>& prefix_patterns() const { return prefix_patterns_; }
    const std::vector<std::string>& suffix_patterns() const { return suffix_patterns_; }

    /// Removes at most one prefix and one suffix scaffold in place; returns
    /// whether anything matched.
    bool remove_scaffold(std::string& text) const;

private:
    std::vector<std::string> prefix_patterns_;
    std::vector<std::string> suffix_patterns_;
    std::vector<std::regex> prefixes_;
    std::vector<std::regex> suffixes_;
};

struct TemplateConfig {
    TemplatePair templates;
    std::map<std::string, StripRules> languages;

    const StripRules& rules_for(std::string_view language) const;
};

/// Reads {"masculine": ..., "feminine": ..., "languages": {"es": {"prefixes":
/// [...], "suffixes": [...]}, ...}}.
TemplateConfig load_template_config(const std::filesystem::path& path);

struct StripResult {
    std::string text;
    /// True if a prefix or suffix rule fired.
    bool scaffold_removed = false;
};

/// Lowercases with the language's case mapping, removes the scaffold, then
/// trims surrounding whitespace and terminal punctuation. Internal text is
/// left alone. An empty result is returned as-is for the caller to flag.
StripResult strip_and_normalize(std::string_view translated, const StripRules& rules, std::string_view language);

struct TranslatedRecord {
    std::string source_id;
    std::string feminine;
    std::string masculine;
};

struct MergeReport {
    std::size_t inputs = 0;
    std::size_t paired = 0;
    std::size_t neutral = 0;
    std::size_t duplicates_removed = 0;

    SetCounts counts() const { return {paired, neutral}; }
    friend bool operator==(const MergeReport&, const MergeReport&) = default;
};

struct MergeResult {
    std::vector<GenderedTitle> items;
    MergeReport report;
    /// Source id -> id of the surviving item that represents it.
    std::map<std::string, std::string> lineage;
};

/// Keeps the first record (in input order) of every distinct (feminine,
/// masculine) pair and tags records with equal forms as neutral. Surviving
/// items keep their source id.
MergeResult merge_and_dedup(std::span<const TranslatedRecord> records);

// --- translation -------------------------------------------------------------

struct TranslationRequest {
    std::string source_text;
    std::string sentence;  // the wrapped carrier sentence
    GenderTag gender = GenderTag::feminine;
    std::string target_language;
};

class TranslationBackend {
public:
    virtual ~TranslationBackend() = default;
    /// Throws BackendError on failure. Must be safe to call concurrently.
    virtual std::string translate(const TranslationRequest& request) const = 0;
};

/// Table-driven backend; rows {"source", "gender", "language",
/// "translation"} keyed by (source title, gender, language).
class MockTranslationBackend final : public TranslationBackend {
public:
    static MockTranslationBackend load(const std::filesystem::path& path);
    void add(std::string source, GenderTag gender, std::string language, std::string translation);
    std::string translate(const TranslationRequest& request) const override;

private:
    std::map<std::string, std::string> table_;
};

struct HttpBackendOptions {
    std::chrono::milliseconds timeout{10000};
    std::size_t retries = 2;
    std::chrono::milliseconds retry_backoff{200};
    std::string source_language = "en";
};

/// POST <endpoint> {"text", "source", "target"} -> {"translation"}.
class HttpTranslationBackend final : public TranslationBackend {
public:
    explicit HttpTranslationBackend(std::string endpoint, HttpBackendOptions options = {});
    std::string translate(const TranslationRequest& request) const override;

private:
    std::string host_;
    std::string path_;
    HttpBackendOptions options_;
};

/// Parses "mock:<table path>" or "http:<url>".
std::unique_ptr<TranslationBackend> make_translation_backend(std::string_view spec,
                                                             const HttpBackendOptions& http = {});

// --- build -------------------------------------------------------------------

struct SourceTitle {
    std::string id;
    std::string title;
    bool is_query = false;
    std::vector<std::string> relevant;
};

/// Reads {"id", "title", "relevant": [...]} lines. A record is a query when
/// it carries "relevant" (or "role": "query"); "role": "corpus" forces a
/// corpus record.
std::vector<SourceTitle> load_source_dataset(const std::filesystem::path& path);

struct FlaggedRecord {
    std::string source_id;
    GenderTag gender = GenderTag::feminine;
    std::string translation;
    std::string reason;
};

struct SectionReport {
    MergeReport merge;
    std::vector<FlaggedRecord> flagged;
    /// Records dropped because one of their translations was flagged.
    std::size_t flagged_records = 0;
};

struct BuildReport {
    std::string language;
    SectionReport queries;
    SectionReport corpus;
    /// Judgment links lost because their corpus item was flagged.
    std::size_t dropped_judgments = 0;
};

struct BuildOptions {
    /// Upper bound on concurrent translation calls.
    std::size_t max_in_flight = 1;
    /// Where completed translations are written if the backend fails.
    std::optional<std::filesystem::path> partial_progress;
};

struct BuildResult {
    TestSet test_set;
    BuildReport report;
};

/// wrap -> translate -> strip_and_normalize -> merge_and_dedup for queries
/// and corpus, then judgments follow source-id lineage to the surviving
/// items. Throws BackendError (after writing partial progress) when the
/// backend fails and ValidationError when nothing survives.
BuildResult build_test_set(std::span<const SourceTitle> source, std::string_view language,
                           const TemplateConfig& config, const TranslationBackend& backend,
                           const BuildOptions& options = {});

BuildResult build_test_set(const std::filesystem::path& source_path, std::string_view language,
                           const TemplateConfig& config, const TranslationBackend& backend,
                           const BuildOptions& options = {});

}  // namespace rankfair
