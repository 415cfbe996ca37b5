// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

// Gender-annotated test sets: queries and corpus items carry a feminine and
// a masculine surface form (identical for neutral titles), plus binary
// relevance judgments keyed by item identity.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rankfair {

enum class GenderTag { feminine, masculine, neutral };

std::string_view to_string(GenderTag tag);

/// A job title with both gendered surface forms. Used for queries and for
/// corpus items alike.
struct GenderedTitle {
    std::string id;
    std::string feminine;
    std::string masculine;
    bool neutral = false;

    const std::string& form(GenderTag gender) const {
        return gender == GenderTag::masculine ? masculine : feminine;
    }

    friend bool operator==(const GenderedTitle&, const GenderedTitle&) = default;
};

using QueryPair = GenderedTitle;
using CorpusItem = GenderedTitle;

/// query id -> relevant corpus item ids.
using RelevanceJudgments = std::map<std::string, std::set<std::string>>;

struct TestSet {
    std::string language;
    std::vector<QueryPair> queries;
    std::vector<CorpusItem> corpus;
    RelevanceJudgments judgments;

    friend bool operator==(const TestSet&, const TestSet&) = default;
};

enum class CorpusView { masculine_corpus, feminine_corpus };

std::string_view to_string(CorpusView view);
/// Accepts "m", "f", "masculine", "feminine", "masculine_corpus" and
/// "feminine_corpus". Throws ValidationError otherwise.
CorpusView parse_corpus_view(std::string_view text);

struct ViewEntry {
    std::string id;
    std::string surface;

    friend bool operator==(const ViewEntry&, const ViewEntry&) = default;
};

/// The corpus rendered in one gender. Entry order is corpus file order, and
/// that position is what retrieval uses to break score ties.
struct GenderView {
    CorpusView view = CorpusView::masculine_corpus;
    std::vector<ViewEntry> items;
};

/// Throws ValidationError describing the first violated invariant: empty or
/// non-lowercase surface forms, neutral flag disagreeing with the forms,
/// duplicate ids, or judgments that reference unknown ids.
void validate(const TestSet& test_set);

/// Reads the JSONL container and validates it. Errors name the offending
/// line number.
TestSet load_test_set(const std::filesystem::path& path);
TestSet read_test_set(std::istream& in);

/// Canonical JSONL: header, queries, corpus items, then judgments in query
/// file order with relevant ids sorted.
void write_test_set(const TestSet& test_set, std::ostream& out);
void save_test_set(const TestSet& test_set, const std::filesystem::path& path);

GenderView gender_view(const TestSet& test_set, CorpusView view);

struct SetCounts {
    std::size_t paired = 0;   // M/F column
    std::size_t neutral = 0;  // N column

    std::size_t total() const { return 2 * paired + neutral; }
    friend bool operator==(const SetCounts&, const SetCounts&) = default;
};

struct TestSetSummary {
    std::string language;
    SetCounts queries;
    SetCounts corpus;
};

TestSetSummary summarize(const TestSet& test_set);

}  // namespace rankfair
