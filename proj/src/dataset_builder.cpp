// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#include "rankfair/dataset_builder.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"
#include "rankfair/error.hpp"
#include "rankfair/text.hpp"

namespace rankfair {

using nlohmann::json;

namespace {

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1)) ++n;
    return n;
}

std::vector<std::regex> compile(const std::vector<std::string>& patterns, bool anchor_start) {
    std::vector<std::regex> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) {
        try {
            out.emplace_back(anchor_start ? "^(?:" + p + ")" : "(?:" + p + ")$");
        } catch (const std::regex_error& e) {
            throw ValidationError("invalid strip pattern \"" + p + "\": " + e.what());
        }
    }
    return out;
}

// Whitespace (including no-break space) and terminal punctuation.
std::string_view trim_edges(std::string_view s) {
    constexpr std::string_view kEdgeAscii = " \t\r\n\f\v.!?;:,\"'";
    constexpr std::string_view kNbsp = "\xC2\xA0";
    constexpr std::string_view kEllipsis = "\xE2\x80\xA6";
    bool changed = true;
    while (changed && !s.empty()) {
        changed = false;
        if (kEdgeAscii.find(s.front()) != std::string_view::npos) {
            s.remove_prefix(1), changed = true;
        } else if (s.starts_with(kNbsp)) {
            s.remove_prefix(kNbsp.size()), changed = true;
        }
        if (s.empty()) break;
        if (kEdgeAscii.find(s.back()) != std::string_view::npos) {
            s.remove_suffix(1), changed = true;
        } else if (s.ends_with(kNbsp)) {
            s.remove_suffix(kNbsp.size()), changed = true;
        } else if (s.ends_with(kEllipsis)) {
            s.remove_suffix(kEllipsis.size()), changed = true;
        }
    }
    return s;
}

GenderTag parse_gender(std::string_view g) {
    if (g == "feminine" || g == "f") return GenderTag::feminine;
    if (g == "masculine" || g == "m") return GenderTag::masculine;
    throw ValidationError("unknown gender \"" + std::string(g) + "\"");
}

std::string mock_key(std::string_view source, GenderTag gender, std::string_view language) {
    std::string k(source);
    k += '\x1F';
    k += to_string(gender);
    k += '\x1F';
    k += language;
    return k;
}

void split_url(const std::string& endpoint, std::string& host, std::string& path) {
    std::string url = endpoint;
    if (url.find("://") == std::string::npos) url = "http://" + url;
    const auto scheme_end = url.find("://") + 3;
    const auto path_start = url.find('/', scheme_end);
    host = url.substr(0, path_start);
    path = path_start == std::string::npos ? std::string("/") : url.substr(path_start);
}

}  // namespace

// --- templates -------------------------------------------------------------

TemplatePair::TemplatePair(std::string masculine, std::string feminine)
    : masculine_(std::move(masculine)), feminine_(std::move(feminine)) {
    for (const std::string* t : {&masculine_, &feminine_}) {
        if (count_occurrences(*t, kJobTitlePlaceholder) != 1) {
            throw ValidationError("template \"" + *t + "\" must contain " + std::string(kJobTitlePlaceholder) +
                                  " exactly once");
        }
    }
}

std::string TemplatePair::wrap(std::string_view title, GenderTag gender) const {
    if (text::trim(title).empty()) throw DomainError("cannot wrap an empty title");
    if (gender == GenderTag::neutral) throw DomainError("templates exist only for feminine and masculine");
    const std::string& t = gender == GenderTag::masculine ? masculine_ : feminine_;
    const auto pos = t.find(kJobTitlePlaceholder);
    std::string out;
    out.reserve(t.size() + title.size());
    out.append(t, 0, pos);
    out.append(title);
    out.append(t, pos + kJobTitlePlaceholder.size());
    return out;
}

StripRules::StripRules(std::vector<std::string> prefixes, std::vector<std::string> suffixes)
    : prefix_patterns_(std::move(prefixes)),
      suffix_patterns_(std::move(suffixes)),
      prefixes_(compile(prefix_patterns_, true)),
      suffixes_(compile(suffix_patterns_, false)) {}

bool StripRules::remove_scaffold(std::string& text) const {
    bool removed = false;
    std::smatch m;
    for (const auto& re : prefixes_) {
        if (std::regex_search(text, m, re) && m.length(0) > 0) {
            text.erase(0, static_cast<std::size_t>(m.length(0)));
            removed = true;
            break;
        }
    }
    for (const auto& re : suffixes_) {
        if (std::regex_search(text, m, re) && m.length(0) > 0) {
            text.erase(static_cast<std::size_t>(m.position(0)));
            removed = true;
            break;
        }
    }
    return removed;
}

const StripRules& TemplateConfig::rules_for(std::string_view language) const {
    const auto it = languages.find(std::string(language));
    if (it == languages.end()) {
        throw ValidationError("template config has no strip rules for language \"" + std::string(language) + "\"");
    }
    return it->second;
}

TemplateConfig load_template_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open template config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": malformed JSON: " + e.what());
    }
    try {
        TemplateConfig config{TemplatePair(j.at("masculine").get<std::string>(), j.at("feminine").get<std::string>()),
                              {}};
        for (const auto& [lang, rules] : j.at("languages").items()) {
            config.languages.emplace(lang, StripRules(rules.value("prefixes", std::vector<std::string>{}),
                                                      rules.value("suffixes", std::vector<std::string>{})));
        }
        return config;
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

StripResult strip_and_normalize(std::string_view translated, const StripRules& rules, std::string_view language) {
    StripResult result;
    std::string text(text::trim(text::to_lower(translated, language)));
    result.scaffold_removed = rules.remove_scaffold(text);
    result.text = std::string(trim_edges(text));
    return result;
}

MergeResult merge_and_dedup(std::span<const TranslatedRecord> records) {
    MergeResult out;
    out.report.inputs = records.size();
    std::map<std::pair<std::string, std::string>, std::string> kept;
    for (const auto& r : records) {
        const auto [it, inserted] = kept.try_emplace({r.feminine, r.masculine}, r.source_id);
        out.lineage[r.source_id] = it->second;
        if (!inserted) {
            ++out.report.duplicates_removed;
            continue;
        }
        GenderedTitle item{r.source_id, r.feminine, r.masculine, r.feminine == r.masculine};
        ++(item.neutral ? out.report.neutral : out.report.paired);
        out.items.push_back(std::move(item));
    }
    return out;
}

// --- translation -------------------------------------------------------------

MockTranslationBackend MockTranslationBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open mock translation table " + path.string());
    MockTranslationBackend backend;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            const json j = json::parse(line);
            backend.add(j.at("source").get<std::string>(), parse_gender(j.at("gender").get<std::string>()),
                        j.at("language").get<std::string>(), j.at("translation").get<std::string>());
        } catch (const json::exception& e) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return backend;
}

void MockTranslationBackend::add(std::string source, GenderTag gender, std::string language, std::string translation) {
    table_.insert_or_assign(mock_key(source, gender, language), std::move(translation));
}

std::string MockTranslationBackend::translate(const TranslationRequest& request) const {
    const auto it = table_.find(mock_key(request.source_text, request.gender, request.target_language));
    if (it == table_.end()) {
        throw BackendError("mock table has no " + std::string(to_string(request.gender)) + " " +
                           request.target_language + " translation for \"" + request.source_text + "\"");
    }
    return it->second;
}

HttpTranslationBackend::HttpTranslationBackend(std::string endpoint, HttpBackendOptions options)
    : options_(std::move(options)) {
    split_url(endpoint, host_, path_);
}

std::string HttpTranslationBackend::translate(const TranslationRequest& request) const {
    json body = json::object();
    body["text"] = request.sentence;
    body["source"] = options_.source_language;
    body["target"] = request.target_language;
    const std::string payload = body.dump();
    std::string last_error;
    for (std::size_t attempt = 0; attempt <= options_.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(options_.retry_backoff * static_cast<int>(attempt));
        httplib::Client client(host_);
        client.set_connection_timeout(options_.timeout);
        client.set_read_timeout(options_.timeout);
        const auto res = client.Post(path_, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        try {
            return json::parse(res->body).at("translation").get<std::string>();
        } catch (const json::exception& e) {
            last_error = std::string("malformed response: ") + e.what();
        }
    }
    throw BackendError("translation of \"" + request.sentence + "\" failed after " +
                       std::to_string(options_.retries + 1) + " attempts: " + last_error);
}

std::unique_ptr<TranslationBackend> make_translation_backend(std::string_view spec, const HttpBackendOptions& http) {
    if (spec.starts_with("mock:")) {
        return std::make_unique<MockTranslationBackend>(MockTranslationBackend::load(std::string(spec.substr(5))));
    }
    if (spec.starts_with("http:")) {
        std::string url(spec.substr(5));
        // Accept both "http:host:port/path" and "http:http://host/path".
        if (url.find("://") == std::string::npos) url = "http://" + url;
        return std::make_unique<HttpTranslationBackend>(url, http);
    }
    throw ValidationError("translation backend must be mock:<path> or http:<url>, got \"" + std::string(spec) + "\"");
}

// --- build -------------------------------------------------------------------

std::vector<SourceTitle> load_source_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open source dataset " + path.string());
    std::vector<SourceTitle> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        try {
            const json j = json::parse(line);
            SourceTitle t;
            t.id = j.at("id").get<std::string>();
            t.title = j.at("title").get<std::string>();
            t.is_query = j.contains("relevant");
            if (t.is_query) t.relevant = j.at("relevant").get<std::vector<std::string>>();
            if (j.contains("role")) {
                const auto role = j.at("role").get<std::string>();
                if (role != "query" && role != "corpus") throw ValidationError(where + ": unknown role " + role);
                t.is_query = role == "query";
            }
            if (text::trim(t.title).empty()) throw ValidationError(where + ": empty title");
            if (!ids.insert((t.is_query ? "q\x1F" : "c\x1F") + t.id).second) {
                throw ValidationError(where + ": duplicate id \"" + t.id + "\"");
            }
            out.push_back(std::move(t));
        } catch (const json::exception& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    return out;
}

BuildResult build_test_set(std::span<const SourceTitle> source, std::string_view language,
                           const TemplateConfig& config, const TranslationBackend& backend,
                           const BuildOptions& options) {
    const StripRules& rules = config.rules_for(language);
    const std::string lang(language);

    // Two translation jobs per source title: feminine at 2i, masculine at 2i+1.
    const std::size_t jobs = 2 * source.size();
    std::vector<std::optional<std::string>> translations(jobs);
    std::vector<std::exception_ptr> errors(jobs);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    const auto gender_of = [](std::size_t job) { return job % 2 == 0 ? GenderTag::feminine : GenderTag::masculine; };
    const auto worker = [&] {
        for (std::size_t j = next++; j < jobs && !failed; j = next++) {
            const SourceTitle& s = source[j / 2];
            const GenderTag g = gender_of(j);
            try {
                translations[j] = backend.translate({s.title, config.templates.wrap(s.title, g), g, lang});
            } catch (...) {
                errors[j] = std::current_exception();
                failed = true;
            }
        }
    };
    {
        const std::size_t n = std::max<std::size_t>(1, std::min(options.max_in_flight, jobs));
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
    }
    if (failed) {
        if (options.partial_progress) {
            std::ofstream out(*options.partial_progress, std::ios::binary);
            for (std::size_t j = 0; j < jobs; ++j) {
                if (!translations[j]) continue;
                json row = json::object();
                row["source_id"] = source[j / 2].id;
                row["gender"] = to_string(gender_of(j));
                row["translation"] = *translations[j];
                out << row.dump() << '\n';
            }
        }
        for (auto& e : errors) {
            if (!e) continue;
            try {
                std::rethrow_exception(e);
            } catch (const BackendError&) {
                throw;
            } catch (const std::exception& ex) {
                throw BackendError(ex.what());
            }
        }
    }

    BuildResult result;
    result.report.language = lang;
    std::vector<TranslatedRecord> query_records;
    std::vector<TranslatedRecord> corpus_records;
    std::set<std::string> dropped_corpus;
    for (std::size_t i = 0; i < source.size(); ++i) {
        const SourceTitle& s = source[i];
        SectionReport& section = s.is_query ? result.report.queries : result.report.corpus;
        TranslatedRecord record{s.id, {}, {}};
        bool ok = true;
        for (std::size_t j = 2 * i; j < 2 * i + 2; ++j) {
            const StripResult stripped = strip_and_normalize(*translations[j], rules, lang);
            std::string reason;
            if (stripped.text.empty()) {
                reason = "empty after stripping";
            } else if (!stripped.scaffold_removed) {
                reason = "unrecognized scaffold";
            }
            if (!reason.empty()) {
                section.flagged.push_back({s.id, gender_of(j), *translations[j], reason});
                ok = false;
            }
            (gender_of(j) == GenderTag::feminine ? record.feminine : record.masculine) = stripped.text;
        }
        if (!ok) {
            ++section.flagged_records;
            if (!s.is_query) dropped_corpus.insert(s.id);
            continue;
        }
        (s.is_query ? query_records : corpus_records).push_back(std::move(record));
    }

    MergeResult queries = merge_and_dedup(query_records);
    MergeResult corpus = merge_and_dedup(corpus_records);
    result.report.queries.merge = queries.report;
    result.report.corpus.merge = corpus.report;
    if (queries.items.empty() || corpus.items.empty()) {
        throw ValidationError("build produced an empty " + std::string(queries.items.empty() ? "query" : "corpus") +
                              " set");
    }

    TestSet& set = result.test_set;
    set.language = lang;
    set.queries = std::move(queries.items);
    set.corpus = std::move(corpus.items);
    for (const SourceTitle& s : source) {
        if (!s.is_query) continue;
        const auto kept_query = queries.lineage.find(s.id);
        if (kept_query == queries.lineage.end()) continue;  // flagged query
        for (const auto& rel : s.relevant) {
            const auto kept_item = corpus.lineage.find(rel);
            if (kept_item != corpus.lineage.end()) {
                set.judgments[kept_query->second].insert(kept_item->second);
            } else if (dropped_corpus.contains(rel)) {
                ++result.report.dropped_judgments;
            } else {
                throw ValidationError("query \"" + s.id + "\" lists unknown corpus id \"" + rel + "\"");
            }
        }
    }
    validate(set);
    return result;
}

BuildResult build_test_set(const std::filesystem::path& source_path, std::string_view language,
                           const TemplateConfig& config, const TranslationBackend& backend,
                           const BuildOptions& options) {
    const auto source = load_source_dataset(source_path);
    return build_test_set(source, language, config, backend, options);
}

}  // namespace rankfair
