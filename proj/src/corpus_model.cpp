// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#include "rankfair/corpus_model.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"
#include "rankfair/error.hpp"
#include "rankfair/text.hpp"

namespace rankfair {

using json = nlohmann::ordered_json;

namespace {

constexpr int kFormatVersion = 1;
constexpr std::string_view kPlaceholder = "{job_title}";

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
    throw ValidationError("line " + std::to_string(line) + ": " + what);
}

std::string require_string(const json& record, const char* key, std::size_t line) {
    const auto it = record.find(key);
    if (it == record.end() || !it->is_string()) {
        fail_at(line, std::string("missing string field \"") + key + "\"");
    }
    return it->get<std::string>();
}

GenderedTitle parse_title(const json& record, std::size_t line) {
    GenderedTitle title;
    title.id = require_string(record, "id", line);
    title.feminine = require_string(record, "feminine", line);
    title.masculine = require_string(record, "masculine", line);
    const auto it = record.find("neutral");
    if (it == record.end() || !it->is_boolean()) fail_at(line, "missing boolean field \"neutral\"");
    title.neutral = it->get<bool>();
    return title;
}

void check_title(const GenderedTitle& t, std::string_view what) {
    const auto where = [&] { return std::string(what) + " \"" + t.id + "\""; };
    if (t.id.empty()) throw ValidationError(std::string(what) + " with empty id");
    for (const std::string* form : {&t.feminine, &t.masculine}) {
        if (text::trim(*form).empty()) throw ValidationError(where() + " has an empty surface form");
        if (!text::is_lowercase(*form)) {
            throw ValidationError(where() + " surface form \"" + *form + "\" is not lowercase");
        }
        if (form->find(kPlaceholder) != std::string::npos) {
            throw ValidationError(where() + " surface form still contains a template placeholder");
        }
    }
    const bool same = t.feminine == t.masculine;
    if (t.neutral != same) {
        throw ValidationError(where() + (t.neutral ? " is flagged neutral but its forms differ"
                                                   : " has identical forms but is not flagged neutral"));
    }
}

json title_to_json(std::string_view kind, const GenderedTitle& t) {
    json j = json::object();
    j["kind"] = kind;
    j["id"] = t.id;
    j["feminine"] = t.feminine;
    j["masculine"] = t.masculine;
    j["neutral"] = t.neutral;
    return j;
}

}  // namespace

std::string_view to_string(GenderTag tag) {
    switch (tag) {
        case GenderTag::feminine:
            return "feminine";
        case GenderTag::masculine:
            return "masculine";
        case GenderTag::neutral:
            return "neutral";
    }
    return "?";
}

std::string_view to_string(CorpusView view) {
    return view == CorpusView::masculine_corpus ? "masculine_corpus" : "feminine_corpus";
}

CorpusView parse_corpus_view(std::string_view text) {
    if (text == "m" || text == "masculine" || text == "masculine_corpus") {
        return CorpusView::masculine_corpus;
    }
    if (text == "f" || text == "feminine" || text == "feminine_corpus") {
        return CorpusView::feminine_corpus;
    }
    throw ValidationError("unknown corpus view \"" + std::string(text) + "\"");
}

void validate(const TestSet& test_set) {
    if (test_set.language.empty()) throw ValidationError("test set has no language");
    std::unordered_set<std::string_view> query_ids;
    for (const auto& q : test_set.queries) {
        check_title(q, "query");
        if (!query_ids.insert(q.id).second) throw ValidationError("duplicate query id \"" + q.id + "\"");
    }
    std::unordered_set<std::string_view> corpus_ids;
    for (const auto& c : test_set.corpus) {
        check_title(c, "corpus item");
        if (!corpus_ids.insert(c.id).second) throw ValidationError("duplicate corpus id \"" + c.id + "\"");
    }
    for (const auto& [query_id, relevant] : test_set.judgments) {
        if (!query_ids.contains(query_id)) {
            throw ValidationError("judgment references unknown query \"" + query_id + "\"");
        }
        for (const auto& id : relevant) {
            if (!corpus_ids.contains(id)) {
                throw ValidationError("judgment for query \"" + query_id + "\" references unknown corpus item \"" +
                                      id + "\"");
            }
        }
    }
}

TestSet read_test_set(std::istream& in) {
    TestSet set;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            fail_at(line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object()) fail_at(line_no, "record is not a JSON object");
        const std::string kind = require_string(record, "kind", line_no);
        if (!have_header) {
            if (kind != "header") fail_at(line_no, "first record must be the header");
            set.language = require_string(record, "language", line_no);
            const auto version = record.find("version");
            if (version == record.end() || !version->is_number_integer() ||
                version->get<int>() != kFormatVersion) {
                fail_at(line_no, "unsupported or missing format version");
            }
            have_header = true;
            continue;
        }
        if (kind == "query") {
            set.queries.push_back(parse_title(record, line_no));
        } else if (kind == "corpus") {
            set.corpus.push_back(parse_title(record, line_no));
        } else if (kind == "judgment") {
            const std::string query_id = require_string(record, "query_id", line_no);
            const auto relevant = record.find("relevant");
            if (relevant == record.end() || !relevant->is_array()) {
                fail_at(line_no, "missing array field \"relevant\"");
            }
            auto [it, inserted] = set.judgments.try_emplace(query_id);
            if (!inserted) fail_at(line_no, "duplicate judgment for query \"" + query_id + "\"");
            for (const auto& id : *relevant) {
                if (!id.is_string()) fail_at(line_no, "relevant ids must be strings");
                it->second.insert(id.get<std::string>());
            }
        } else if (kind == "header") {
            fail_at(line_no, "second header record");
        } else {
            fail_at(line_no, "unknown record kind \"" + kind + "\"");
        }
    }
    if (!have_header) throw ValidationError("empty test set file (no header)");
    validate(set);
    return set;
}

TestSet load_test_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open test set " + path.string());
    try {
        return read_test_set(in);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_test_set(const TestSet& test_set, std::ostream& out) {
    json header = json::object();
    header["kind"] = "header";
    header["language"] = test_set.language;
    header["version"] = kFormatVersion;
    out << header.dump() << '\n';
    for (const auto& q : test_set.queries) out << title_to_json("query", q).dump() << '\n';
    for (const auto& c : test_set.corpus) out << title_to_json("corpus", c).dump() << '\n';
    for (const auto& q : test_set.queries) {
        const auto it = test_set.judgments.find(q.id);
        if (it == test_set.judgments.end()) continue;
        json j = json::object();
        j["kind"] = "judgment";
        j["query_id"] = q.id;
        j["relevant"] = it->second;  // std::set iterates sorted
        out << j.dump() << '\n';
    }
}

void save_test_set(const TestSet& test_set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write test set " + path.string());
    write_test_set(test_set, out);
}

GenderView gender_view(const TestSet& test_set, CorpusView view) {
    const GenderTag gender = view == CorpusView::masculine_corpus ? GenderTag::masculine : GenderTag::feminine;
    GenderView out;
    out.view = view;
    out.items.reserve(test_set.corpus.size());
    for (const auto& item : test_set.corpus) out.items.push_back({item.id, item.form(gender)});
    return out;
}

TestSetSummary summarize(const TestSet& test_set) {
    TestSetSummary summary;
    summary.language = test_set.language;
    for (const auto& q : test_set.queries) ++(q.neutral ? summary.queries.neutral : summary.queries.paired);
    for (const auto& c : test_set.corpus) ++(c.neutral ? summary.corpus.neutral : summary.corpus.paired);
    return summary;
}

}  // namespace rankfair
