// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

// Table rendering for evaluation runs, build reports and rank inspections,
// plus the runs.json interchange format.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rankfair/bias_eval.hpp"
#include "rankfair/corpus_model.hpp"
#include "rankfair/dataset_builder.hpp"

namespace rankfair {

/// Best marks the column maximum (bold), worst the minimum (underlined).
/// Every cell tied for an extreme gets the mark; a column whose values are
/// all equal is marked best throughout.
enum class CellMark { none, best, worst };

std::string_view to_string(CellMark mark);

inline constexpr std::string_view kMissingCell = "\xE2\x80\x94";  // U+2014

struct ReportCell {
    std::string text;
    std::optional<double> value;
    CellMark mark = CellMark::none;

    friend bool operator==(const ReportCell&, const ReportCell&) = default;
};

struct ReportRow {
    std::string label;
    std::vector<ReportCell> cells;
    bool differs = false;  // inspection rows only

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ReportDocument {
    std::string kind;  // "rbo", "map", "inspection", "summary"
    std::string title;
    std::vector<std::string> headers;  // first entry labels the row column
    std::vector<ReportRow> rows;
    std::vector<std::string> footnotes;
    std::map<std::string, std::string> metadata;

    friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

/// Fixed four-decimal rendering used by every table.
std::string format_score(double value);

/// Model rows (first-appearance order) by language columns (sorted) of
/// mean RBO for the given corpus view. Throws DomainError if no run matches.
ReportDocument render_rbo_table(std::span<const EvalRun> runs, CorpusView view);

/// Like render_rbo_table with F and M sub-columns per language and a final
/// cross-language average column: mean over languages of (F + M) / 2.
/// Languages without a MAP are shown as missing and left out of the average.
ReportDocument render_map_table(std::span<const EvalRun> runs, CorpusView view);

/// Rank, feminine-query result, masculine-query result; rows where the two
/// differ are flagged.
ReportDocument render_inspection(const Inspection& inspection);

/// M/F, N and T counts for queries and corpus, one row per language.
ReportDocument render_summary_table(std::span<const TestSetSummary> summaries);

std::string to_markdown(const ReportDocument& doc);
/// RFC 4180: CRLF line ends, fields quoted when they hold a comma, quote or
/// line break.
std::string to_csv(const ReportDocument& doc);
nlohmann::ordered_json to_json(const ReportDocument& doc);
ReportDocument report_from_json(const nlohmann::json& j);

// --- runs.json -----------------------------------------------------------------

nlohmann::ordered_json to_json(const MetricScore& score);
nlohmann::ordered_json to_json(const EvalRun& run);
EvalRun eval_run_from_json(const nlohmann::json& j);

struct RunFailure {
    std::string language;
    std::string provider;
    std::string model_name;
    CorpusView view = CorpusView::masculine_corpus;
    std::string error;
};

struct RunsFile {
    std::vector<EvalRun> runs;
    std::vector<RunFailure> failures;
    std::map<std::string, std::string> metadata;
};

/// {"metadata": {...}, "runs": [...], "failures": [...]}
nlohmann::ordered_json to_json(const RunsFile& file);
RunsFile runs_file_from_json(const nlohmann::json& j);
RunsFile runs_file_from_matrix(std::span<const MatrixEntry> entries);

nlohmann::ordered_json to_json(const BuildReport& report);

}  // namespace rankfair
