// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#include "rankfair/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "rankfair/error.hpp"
#include "rankfair/text.hpp"

namespace rankfair {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string upper_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    return out;
}

ReportCell number_cell(std::optional<double> value) {
    if (!value) return {std::string(kMissingCell), std::nullopt, CellMark::none};
    return {format_score(*value), value, CellMark::none};
}

std::string view_phrase(CorpusView view) {
    return view == CorpusView::masculine_corpus ? "masculine corpora" : "feminine corpora";
}

// Marks extremes among the present values of each listed column.
void mark_columns(std::vector<ReportRow>& rows, std::size_t first, std::size_t last) {
    for (std::size_t c = first; c < last; ++c) {
        std::optional<double> hi;
        std::optional<double> lo;
        for (const auto& row : rows) {
            const auto& v = row.cells[c].value;
            if (!v) continue;
            hi = hi ? std::max(*hi, *v) : *v;
            lo = lo ? std::min(*lo, *v) : *v;
        }
        if (!hi) continue;
        for (auto& row : rows) {
            auto& cell = row.cells[c];
            if (!cell.value) continue;
            if (*cell.value == *hi) {
                cell.mark = CellMark::best;
            } else if (*cell.value == *lo) {
                cell.mark = CellMark::worst;
            }
        }
    }
}

struct Grid {
    std::vector<std::string> models;
    std::vector<std::string> languages;
    std::map<std::pair<std::string, std::string>, const EvalRun*> cells;
};

Grid collect(std::span<const EvalRun> runs, CorpusView view) {
    Grid grid;
    std::set<std::string> languages;
    for (const auto& run : runs) {
        if (run.corpus_view != view) continue;
        if (std::find(grid.models.begin(), grid.models.end(), run.model_name) == grid.models.end()) {
            grid.models.push_back(run.model_name);
        }
        languages.insert(run.language);
        if (!grid.cells.emplace(std::pair{run.model_name, run.language}, &run).second) {
            throw ValidationError("more than one run for model \"" + run.model_name + "\", language \"" +
                                  run.language + "\", " + std::string(to_string(view)));
        }
    }
    if (grid.models.empty()) throw DomainError("no runs for " + std::string(to_string(view)));
    grid.languages.assign(languages.begin(), languages.end());
    return grid;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string markdown_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += '\\';
        out += c;
    }
    return out;
}

std::string row_label(const ReportRow& row) { return row.differs ? row.label + " *" : row.label; }

ordered_json metadata_json(const std::map<std::string, std::string>& metadata) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : metadata) j[k] = v;
    return j;
}

std::map<std::string, std::string> metadata_from(const json& j) {
    std::map<std::string, std::string> out;
    if (!j.is_object()) return out;
    for (const auto& [k, v] : j.items()) out[k] = v.is_string() ? v.get<std::string>() : v.dump();
    return out;
}

CellMark parse_mark(std::string_view s) {
    if (s == "best") return CellMark::best;
    if (s == "worst") return CellMark::worst;
    if (s == "none") return CellMark::none;
    throw ValidationError("unknown cell mark \"" + std::string(s) + "\"");
}

Metric parse_metric(std::string_view s) {
    for (Metric m : {Metric::rbo_uniform, Metric::rbo_exponential, Metric::average_precision,
                     Metric::mean_average_precision}) {
        if (to_string(m) == s) return m;
    }
    throw ValidationError("unknown metric \"" + std::string(s) + "\"");
}

MetricScore score_from_json(const json& j) {
    return {j.at("value").get<double>(), parse_metric(j.at("metric").get<std::string>()),
            j.at("depth").get<std::size_t>()};
}

ordered_json optional_score(const std::optional<MetricScore>& s) {
    return s ? to_json(*s) : ordered_json(nullptr);
}

std::optional<MetricScore> optional_score_from(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return score_from_json(*it);
}

}  // namespace

std::string_view to_string(CellMark mark) {
    switch (mark) {
        case CellMark::best:
            return "best";
        case CellMark::worst:
            return "worst";
        case CellMark::none:
            return "none";
    }
    return "none";
}

std::string format_score(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", value);
    return buf;
}

ReportDocument render_rbo_table(std::span<const EvalRun> runs, CorpusView view) {
    const Grid grid = collect(runs, view);
    ReportDocument doc;
    doc.kind = "rbo";
    doc.title = "RBO, feminine vs masculine queries over " + view_phrase(view);
    doc.headers.push_back("Model");
    for (const auto& lang : grid.languages) doc.headers.push_back(upper_ascii(lang));
    for (const auto& model : grid.models) {
        ReportRow row{model, {}, false};
        for (const auto& lang : grid.languages) {
            const auto it = grid.cells.find({model, lang});
            row.cells.push_back(number_cell(it == grid.cells.end() ? std::nullopt
                                                                   : std::optional(it->second->mean_rbo.value)));
        }
        doc.rows.push_back(std::move(row));
    }
    mark_columns(doc.rows, 0, grid.languages.size());
    return doc;
}

ReportDocument render_map_table(std::span<const EvalRun> runs, CorpusView view) {
    const Grid grid = collect(runs, view);
    ReportDocument doc;
    doc.kind = "map";
    doc.title = "MAP over " + view_phrase(view);
    doc.headers.push_back("Model / Queries");
    for (const auto& lang : grid.languages) {
        doc.headers.push_back(upper_ascii(lang) + " F");
        doc.headers.push_back(upper_ascii(lang) + " M");
    }
    doc.headers.push_back("Avg");
    for (const auto& model : grid.models) {
        ReportRow row{model, {}, false};
        std::vector<double> per_language;
        std::vector<std::string> missing;
        for (const auto& lang : grid.languages) {
            const auto it = grid.cells.find({model, lang});
            const EvalRun* run = it == grid.cells.end() ? nullptr : it->second;
            if (run && run->map_feminine && run->map_masculine) {
                row.cells.push_back(number_cell(run->map_feminine->value));
                row.cells.push_back(number_cell(run->map_masculine->value));
                per_language.push_back((run->map_feminine->value + run->map_masculine->value) / 2.0);
            } else {
                row.cells.push_back(number_cell(std::nullopt));
                row.cells.push_back(number_cell(std::nullopt));
                missing.push_back(upper_ascii(lang));
            }
        }
        row.cells.push_back(number_cell(per_language.empty() ? std::nullopt : std::optional(mean(per_language))));
        if (!missing.empty()) {
            std::string note = "Avg for " + model + " excludes missing languages:";
            for (const auto& m : missing) note += " " + m;
            doc.footnotes.push_back(note);
        }
        doc.rows.push_back(std::move(row));
    }
    mark_columns(doc.rows, 0, 2 * grid.languages.size());
    return doc;
}

ReportDocument render_inspection(const Inspection& inspection) {
    ReportDocument doc;
    doc.kind = "inspection";
    doc.title = "Top " + std::to_string(inspection.rows.size()) + " results for query " + inspection.query_id +
                " over " + view_phrase(inspection.view);
    doc.headers = {"Query", inspection.feminine_query + " (f)", inspection.masculine_query + " (m)"};
    bool any_diff = false;
    for (const auto& r : inspection.rows) {
        ReportRow row{std::to_string(r.rank),
                      {{r.feminine_result, std::nullopt, CellMark::none}, {r.masculine_result, std::nullopt, CellMark::none}},
                      r.differs()};
        any_diff = any_diff || row.differs;
        doc.rows.push_back(std::move(row));
    }
    if (any_diff) doc.footnotes.push_back("* feminine and masculine results differ at this rank");
    doc.footnotes.push_back("RBO (full depth " + std::to_string(inspection.rbo.depth) +
                            ") = " + format_score(inspection.rbo.value));
    return doc;
}

ReportDocument render_summary_table(std::span<const TestSetSummary> summaries) {
    ReportDocument doc;
    doc.kind = "summary";
    doc.title = "Masculine/feminine pairs (M/F), neutral (N) and total (T) job titles per language";
    doc.headers = {"Set", "Queries M/F", "Queries N", "Queries T", "Corpus M/F", "Corpus N", "Corpus T"};
    for (const auto& s : summaries) {
        ReportRow row{upper_ascii(s.language), {}, false};
        for (const SetCounts* c : {&s.queries, &s.corpus}) {
            for (std::size_t v : {c->paired, c->neutral, c->total()}) {
                row.cells.push_back({std::to_string(v), static_cast<double>(v), CellMark::none});
            }
        }
        doc.rows.push_back(std::move(row));
    }
    return doc;
}

std::string to_markdown(const ReportDocument& doc) {
    std::string out;
    if (!doc.title.empty()) out += "**" + doc.title + "**\n\n";
    out += "|";
    for (const auto& h : doc.headers) out += " " + markdown_escape(h) + " |";
    out += "\n|";
    for (std::size_t i = 0; i < doc.headers.size(); ++i) out += i == 0 ? ":---|" : ":---:|";
    out += "\n";
    for (const auto& row : doc.rows) {
        out += "| " + markdown_escape(row_label(row)) + " |";
        for (const auto& cell : row.cells) {
            std::string t = markdown_escape(cell.text);
            if (cell.mark == CellMark::best) t = "**" + t + "**";
            if (cell.mark == CellMark::worst) t = "<u>" + t + "</u>";
            out += " " + t + " |";
        }
        out += "\n";
    }
    if (!doc.footnotes.empty()) {
        out += "\n";
        for (const auto& f : doc.footnotes) out += "- " + f + "\n";
    }
    return out;
}

std::string to_csv(const ReportDocument& doc) {
    std::string out;
    for (std::size_t i = 0; i < doc.headers.size(); ++i) out += (i ? "," : "") + csv_field(doc.headers[i]);
    out += "\r\n";
    for (const auto& row : doc.rows) {
        out += csv_field(row_label(row));
        for (const auto& cell : row.cells) out += "," + csv_field(cell.text);
        out += "\r\n";
    }
    return out;
}

ordered_json to_json(const ReportDocument& doc) {
    ordered_json j = ordered_json::object();
    j["kind"] = doc.kind;
    j["title"] = doc.title;
    j["headers"] = doc.headers;
    ordered_json rows = ordered_json::array();
    for (const auto& row : doc.rows) {
        ordered_json r = ordered_json::object();
        r["label"] = row.label;
        ordered_json cells = ordered_json::array();
        for (const auto& cell : row.cells) {
            ordered_json c = ordered_json::object();
            c["text"] = cell.text;
            c["value"] = cell.value ? ordered_json(*cell.value) : ordered_json(nullptr);
            c["mark"] = to_string(cell.mark);
            cells.push_back(std::move(c));
        }
        r["cells"] = std::move(cells);
        if (row.differs) r["differs"] = true;
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["footnotes"] = doc.footnotes;
    j["metadata"] = metadata_json(doc.metadata);
    return j;
}

ReportDocument report_from_json(const json& j) {
    try {
        ReportDocument doc;
        doc.kind = j.at("kind").get<std::string>();
        doc.title = j.at("title").get<std::string>();
        doc.headers = j.at("headers").get<std::vector<std::string>>();
        for (const auto& r : j.at("rows")) {
            ReportRow row;
            row.label = r.at("label").get<std::string>();
            row.differs = r.value("differs", false);
            for (const auto& c : r.at("cells")) {
                ReportCell cell;
                cell.text = c.at("text").get<std::string>();
                if (!c.at("value").is_null()) cell.value = c.at("value").get<double>();
                cell.mark = parse_mark(c.at("mark").get<std::string>());
                row.cells.push_back(std::move(cell));
            }
            doc.rows.push_back(std::move(row));
        }
        doc.footnotes = j.at("footnotes").get<std::vector<std::string>>();
        doc.metadata = metadata_from(j.value("metadata", json::object()));
        return doc;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed report document: ") + e.what());
    }
}

// --- runs.json -----------------------------------------------------------------

ordered_json to_json(const MetricScore& score) {
    ordered_json j = ordered_json::object();
    j["value"] = score.value;
    j["metric"] = to_string(score.metric);
    j["depth"] = score.depth;
    return j;
}

ordered_json to_json(const EvalRun& run) {
    ordered_json j = ordered_json::object();
    j["language"] = run.language;
    j["model_name"] = run.model_name;
    j["corpus_view"] = to_string(run.corpus_view);
    j["include_neutral_in_rbo"] = run.include_neutral_in_rbo;
    j["mean_rbo"] = to_json(run.mean_rbo);
    j["map_feminine"] = optional_score(run.map_feminine);
    j["map_masculine"] = optional_score(run.map_masculine);
    ordered_json counts = ordered_json::object();
    counts["rbo_evaluated"] = run.counts.rbo_evaluated;
    counts["neutral_skipped"] = run.counts.neutral_skipped;
    counts["ap_evaluated"] = run.counts.ap_evaluated;
    counts["no_relevant_skipped"] = run.counts.no_relevant_skipped;
    j["counts"] = std::move(counts);
    ordered_json pairs = ordered_json::array();
    for (const auto& p : run.pair_results) {
        ordered_json pj = ordered_json::object();
        pj["query_id"] = p.query_id;
        pj["rbo"] = optional_score(p.rbo);
        pj["ap_feminine"] = optional_score(p.ap_feminine);
        pj["ap_masculine"] = optional_score(p.ap_masculine);
        pj["skipped_reason"] = p.skipped_reason ? ordered_json(to_string(*p.skipped_reason)) : ordered_json(nullptr);
        pairs.push_back(std::move(pj));
    }
    j["pair_results"] = std::move(pairs);
    return j;
}

EvalRun eval_run_from_json(const json& j) {
    try {
        EvalRun run;
        run.language = j.at("language").get<std::string>();
        run.model_name = j.at("model_name").get<std::string>();
        run.corpus_view = parse_corpus_view(j.at("corpus_view").get<std::string>());
        run.include_neutral_in_rbo = j.value("include_neutral_in_rbo", false);
        run.mean_rbo = score_from_json(j.at("mean_rbo"));
        run.map_feminine = optional_score_from(j, "map_feminine");
        run.map_masculine = optional_score_from(j, "map_masculine");
        const auto& counts = j.at("counts");
        run.counts.rbo_evaluated = counts.at("rbo_evaluated").get<std::size_t>();
        run.counts.neutral_skipped = counts.at("neutral_skipped").get<std::size_t>();
        run.counts.ap_evaluated = counts.at("ap_evaluated").get<std::size_t>();
        run.counts.no_relevant_skipped = counts.at("no_relevant_skipped").get<std::size_t>();
        for (const auto& pj : j.at("pair_results")) {
            PairResult p;
            p.query_id = pj.at("query_id").get<std::string>();
            p.rbo = optional_score_from(pj, "rbo");
            p.ap_feminine = optional_score_from(pj, "ap_feminine");
            p.ap_masculine = optional_score_from(pj, "ap_masculine");
            if (pj.contains("skipped_reason") && !pj["skipped_reason"].is_null()) {
                p.skipped_reason = parse_skip_reason(pj["skipped_reason"].get<std::string>());
            }
            run.pair_results.push_back(std::move(p));
        }
        return run;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed run record: ") + e.what());
    }
}

ordered_json to_json(const RunsFile& file) {
    ordered_json j = ordered_json::object();
    j["metadata"] = metadata_json(file.metadata);
    ordered_json runs = ordered_json::array();
    for (const auto& r : file.runs) runs.push_back(to_json(r));
    j["runs"] = std::move(runs);
    ordered_json failures = ordered_json::array();
    for (const auto& f : file.failures) {
        ordered_json fj = ordered_json::object();
        fj["language"] = f.language;
        fj["provider"] = f.provider;
        fj["model_name"] = f.model_name;
        fj["corpus_view"] = to_string(f.view);
        fj["error"] = f.error;
        failures.push_back(std::move(fj));
    }
    j["failures"] = std::move(failures);
    return j;
}

RunsFile runs_file_from_json(const json& j) {
    if (!j.is_object() || !j.contains("runs") || !j["runs"].is_array()) {
        throw ValidationError("runs file must be an object with a \"runs\" array");
    }
    RunsFile file;
    file.metadata = metadata_from(j.value("metadata", json::object()));
    for (const auto& r : j["runs"]) file.runs.push_back(eval_run_from_json(r));
    if (j.contains("failures")) {
        try {
            for (const auto& f : j["failures"]) {
                file.failures.push_back({f.at("language").get<std::string>(), f.at("provider").get<std::string>(),
                                         f.value("model_name", std::string()),
                                         parse_corpus_view(f.at("corpus_view").get<std::string>()),
                                         f.at("error").get<std::string>()});
            }
        } catch (const json::exception& e) {
            throw ValidationError(std::string("malformed failure record: ") + e.what());
        }
    }
    return file;
}

RunsFile runs_file_from_matrix(std::span<const MatrixEntry> entries) {
    RunsFile file;
    for (const auto& e : entries) {
        if (e.run) {
            file.runs.push_back(*e.run);
        } else {
            file.failures.push_back({e.language, e.provider, e.model_name, e.view, e.error});
        }
    }
    return file;
}

ordered_json to_json(const BuildReport& report) {
    const auto section = [](const SectionReport& s) {
        ordered_json j = ordered_json::object();
        j["inputs"] = s.merge.inputs + s.flagged_records;
        j["paired"] = s.merge.paired;
        j["neutral"] = s.merge.neutral;
        j["duplicates_removed"] = s.merge.duplicates_removed;
        j["flagged_records"] = s.flagged_records;
        j["total"] = s.merge.counts().total();
        ordered_json flagged = ordered_json::array();
        for (const auto& f : s.flagged) {
            ordered_json fj = ordered_json::object();
            fj["source_id"] = f.source_id;
            fj["gender"] = to_string(f.gender);
            fj["translation"] = f.translation;
            fj["reason"] = f.reason;
            flagged.push_back(std::move(fj));
        }
        j["flagged"] = std::move(flagged);
        return j;
    };
    ordered_json j = ordered_json::object();
    j["language"] = report.language;
    j["queries"] = section(report.queries);
    j["corpus"] = section(report.corpus);
    j["dropped_judgments"] = report.dropped_judgments;
    return j;
}

}  // namespace rankfair
