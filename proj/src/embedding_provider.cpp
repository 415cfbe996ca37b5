// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#include "rankfair/embedding_provider.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "rankfair/digest.hpp"
#include "rankfair/error.hpp"
#include "rankfair/splitmix.hpp"
#include "rankfair/text.hpp"

namespace rankfair {

using nlohmann::json;

namespace {

std::vector<double> parse_vector(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) throw ProviderError(context + ": vector must be a non-empty array");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number()) throw ProviderError(context + ": vector holds a non-number");
        v.push_back(x.get<double>());
    }
    return v;
}

std::string sanitize_file_name(std::string_view name) {
    std::string out;
    for (char c : name) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? std::string("model") : out;
}

std::string format_weight(double w) {
    std::ostringstream os;
    os << w;
    return os.str();
}

}  // namespace

std::string_view to_string(EmbedRole role) { return role == EmbedRole::query ? "query" : "passage"; }

std::string ProviderSpec::to_string() const {
    std::string out;
    switch (kind) {
        case ProviderKind::file:
            out = "file:" + path.string();
            break;
        case ProviderKind::synthetic:
            out = "synthetic:" + std::to_string(seed) + "," + format_weight(gender_weight);
            if (dim != kDefaultSyntheticDim) out += "," + std::to_string(dim);
            break;
        case ProviderKind::http:
            out = "http:" + endpoint;
            break;
    }
    if (!model_name.empty()) out += "@" + model_name;
    return out;
}

ProviderSpec parse_provider_spec(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ValidationError("provider spec \"" + std::string(text) + "\" lacks a kind prefix");
    }
    const std::string_view kind = text.substr(0, colon);
    std::string_view rest = text.substr(colon + 1);
    ProviderSpec spec;
    // Optional "@name" suffix; the last '@' is the separator.
    if (const auto at = rest.rfind('@'); at != std::string_view::npos) {
        spec.model_name = std::string(rest.substr(at + 1));
        rest = rest.substr(0, at);
        if (spec.model_name.empty()) throw ValidationError("empty model name in provider spec");
    }
    if (kind == "file") {
        if (rest.empty()) throw ValidationError("file provider needs a path");
        spec.kind = ProviderKind::file;
        spec.path = std::string(rest);
        spec.dim = 0;
    } else if (kind == "http") {
        if (rest.empty()) throw ValidationError("http provider needs a URL");
        spec.kind = ProviderKind::http;
        spec.endpoint = std::string(rest);
        if (spec.endpoint.find("://") == std::string::npos) spec.endpoint = "http://" + spec.endpoint;
        spec.dim = 0;
    } else if (kind == "synthetic") {
        spec.kind = ProviderKind::synthetic;
        std::vector<std::string> parts;
        std::string_view r = rest;
        while (true) {
            const auto comma = r.find(',');
            parts.emplace_back(text::trim(r.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            r = r.substr(comma + 1);
        }
        if (parts.size() < 2 || parts.size() > 3) {
            throw ValidationError("synthetic provider expects <seed>,<weight>[,<dim>]");
        }
        const auto parse_u64 = [&](const std::string& s, const char* what) {
            std::uint64_t v = 0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || ptr != s.data() + s.size()) {
                throw ValidationError(std::string("invalid synthetic ") + what + " \"" + s + "\"");
            }
            return v;
        };
        spec.seed = parse_u64(parts[0], "seed");
        try {
            std::size_t used = 0;
            spec.gender_weight = std::stod(parts[1], &used);
            if (used != parts[1].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ValidationError("invalid synthetic weight \"" + parts[1] + "\"");
        }
        if (!(spec.gender_weight >= 0.0) || !std::isfinite(spec.gender_weight)) {
            throw ValidationError("synthetic weight must be finite and >= 0");
        }
        if (parts.size() == 3) spec.dim = parse_u64(parts[2], "dim");
        if (spec.dim < 2) throw ValidationError("synthetic dim must be at least 2");
    } else {
        throw ValidationError("unknown provider kind \"" + std::string(kind) + "\"");
    }
    return spec;
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_batch(std::span<const std::string> texts, EmbedRole role) const {
    if (texts.empty()) throw ProviderError("embed_batch called with no texts");
    for (const auto& t : texts) {
        if (text::trim(t).empty()) throw ProviderError("cannot embed an empty text");
    }
    auto out = embed_checked(texts, role);
    if (out.size() != texts.size()) {
        throw ProviderError(model_name() + " returned " + std::to_string(out.size()) + " vectors for " +
                            std::to_string(texts.size()) + " texts");
    }
    for (const auto& v : out) {
        if (v.dim() != dim()) {
            throw ProviderError(model_name() + " returned a vector of dimension " + std::to_string(v.dim()) +
                                ", expected " + std::to_string(dim()));
        }
    }
    return out;
}

// --- synthetic -------------------------------------------------------------

EmbeddingVector synthetic_embed(std::uint64_t seed, std::string_view text, std::size_t dim, double gender_weight) {
    if (dim < 2) throw DomainError("synthetic embeddings need dim >= 2");
    if (!(gender_weight >= 0.0) || !std::isfinite(gender_weight)) {
        throw DomainError("gender weight must be finite and >= 0");
    }
    std::string_view lemma = text;
    double sign = 0.0;
    if (text.size() >= 2 && text[text.size() - 2] == '#') {
        const char g = text.back();
        if (g == 'f' || g == 'm') {
            sign = g == 'f' ? 1.0 : -1.0;
            lemma = text.substr(0, text.size() - 2);
        }
    }
    SplitMix64 rng(splitmix64_mix(seed) ^ fnv1a64(lemma));
    std::vector<double> values(dim, 0.0);
    const std::size_t base_dim = dim - 1;
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < base_dim; i += 2) {
        const double u1 = rng.next_unit();
        const double u2 = rng.next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        values[i] = r * std::cos(theta);
        if (i + 1 < base_dim) values[i + 1] = r * std::sin(theta);
    }
    for (std::size_t i = 0; i < base_dim; ++i) norm_sq += values[i] * values[i];
    if (!(norm_sq > 0.0)) values[0] = norm_sq = 1.0;
    const double norm = std::sqrt(norm_sq);
    for (std::size_t i = 0; i < base_dim; ++i) values[i] /= norm;
    values[base_dim] = sign * gender_weight;
    return EmbeddingVector::normalized(std::move(values));
}

SyntheticProvider::SyntheticProvider(std::uint64_t seed, double gender_weight, std::size_t dim, std::string model_name)
    : seed_(seed), gender_weight_(gender_weight), dim_(dim), model_name_(std::move(model_name)) {
    if (dim_ < 2) throw DomainError("synthetic embeddings need dim >= 2");
    if (!(gender_weight_ >= 0.0) || !std::isfinite(gender_weight_)) {
        throw DomainError("gender weight must be finite and >= 0");
    }
    if (model_name_.empty()) model_name_ = "synthetic-s" + std::to_string(seed_) + "-w" + format_weight(gender_weight_);
}

std::vector<EmbeddingVector> SyntheticProvider::embed_checked(std::span<const std::string> texts, EmbedRole) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(synthetic_embed(seed_, t, dim_, gender_weight_));
    return out;
}

// --- file store --------------------------------------------------------------

void write_embedding_store(const std::filesystem::path& path, std::span<const StoredEmbedding> entries) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ProviderError("cannot write embedding store " + path.string());
    for (const auto& e : entries) {
        json j = json::object();
        j["text"] = e.text;
        j["vector"] = e.vector;
        out << j.dump() << '\n';
    }
}

FileProvider FileProvider::load(const std::filesystem::path& path, std::string model_name) {
    std::ifstream in(path);
    if (!in) throw ProviderError("cannot open embedding store " + path.string());
    FileProvider provider;
    provider.model_name_ = model_name.empty() ? path.stem().string() : std::move(model_name);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ProviderError(where + ": malformed JSON: " + e.what());
        }
        if (!j.is_object() || !j.contains("text") || !j["text"].is_string() || !j.contains("vector")) {
            throw ProviderError(where + ": expected {\"text\": string, \"vector\": [...]}");
        }
        auto values = parse_vector(j["vector"], where);
        if (provider.dim_ == 0) provider.dim_ = values.size();
        if (values.size() != provider.dim_) {
            throw ProviderError(where + ": dimension " + std::to_string(values.size()) + " differs from " +
                                std::to_string(provider.dim_));
        }
        auto vec = EmbeddingVector::normalized(std::move(values));
        if (!provider.vectors_.emplace(j["text"].get<std::string>(), std::move(vec)).second) {
            throw ProviderError(where + ": duplicate text");
        }
    }
    if (provider.vectors_.empty()) throw ProviderError("embedding store " + path.string() + " is empty");
    return provider;
}

std::vector<EmbeddingVector> FileProvider::embed_checked(std::span<const std::string> texts, EmbedRole) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        const auto it = vectors_.find(t);
        if (it == vectors_.end()) throw ProviderError("text \"" + t + "\" not found in store " + model_name_);
        out.push_back(it->second);
    }
    return out;
}

// --- HTTP sidecar ------------------------------------------------------------

HttpProvider::HttpProvider(std::string endpoint, HttpOptions options, std::size_t expected_dim)
    : endpoint_(std::move(endpoint)), options_(options) {
    if (options_.batch_limit == 0) throw DomainError("batch limit must be positive");
    std::string url = endpoint_;
    if (url.find("://") == std::string::npos) url = "http://" + url;
    const auto scheme_end = url.find("://") + 3;
    const auto path_start = url.find('/', scheme_end);
    host_ = url.substr(0, path_start);
    base_path_ = path_start == std::string::npos ? std::string() : url.substr(path_start);
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();

    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    const auto res = client.Get(base_path_ + "/v1/info");
    if (!res) {
        throw ProviderError("embedding sidecar at " + endpoint_ + " unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw ProviderError("embedding sidecar /v1/info returned HTTP " + std::to_string(res->status));
    }
    try {
        const json info = json::parse(res->body);
        model_name_ = info.at("model").get<std::string>();
        dim_ = info.at("dim").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ProviderError(std::string("malformed /v1/info response: ") + e.what());
    }
    if (dim_ == 0) throw ProviderError("embedding sidecar reports dimension 0");
    if (expected_dim != 0 && expected_dim != dim_) {
        throw ProviderError("embedding sidecar serves dimension " + std::to_string(dim_) + ", expected " +
                            std::to_string(expected_dim));
    }
}

std::vector<EmbeddingVector> HttpProvider::embed_checked(std::span<const std::string> texts, EmbedRole role) const {
    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += options_.batch_limit) {
        const auto batch = texts.subspan(start, std::min(options_.batch_limit, texts.size() - start));
        json request = json::object();
        request["texts"] = std::vector<std::string>(batch.begin(), batch.end());
        request["role"] = to_string(role);
        const auto res = client.Post(base_path_ + "/v1/embed", request.dump(), "application/json");
        if (!res) {
            throw ProviderError("embedding sidecar at " + endpoint_ + " unreachable: " +
                                httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            throw ProviderError("embedding sidecar /v1/embed returned HTTP " + std::to_string(res->status));
        }
        json body;
        try {
            body = json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw ProviderError(std::string("malformed /v1/embed response: ") + e.what());
        }
        if (!body.is_object() || !body.contains("vectors") || !body["vectors"].is_array()) {
            throw ProviderError("/v1/embed response lacks a \"vectors\" array");
        }
        if (body.contains("dim") && body["dim"].is_number_unsigned() && body["dim"].get<std::size_t>() != dim_) {
            throw ProviderError("/v1/embed reports dimension " + body["dim"].dump() + ", expected " +
                                std::to_string(dim_));
        }
        const auto& vectors = body["vectors"];
        if (vectors.size() != batch.size()) {
            throw ProviderError("/v1/embed returned " + std::to_string(vectors.size()) + " vectors for " +
                                std::to_string(batch.size()) + " texts");
        }
        for (const auto& v : vectors) {
            auto values = parse_vector(v, "/v1/embed");
            if (values.size() != dim_) {
                throw ProviderError("/v1/embed returned dimension " + std::to_string(values.size()) + ", expected " +
                                    std::to_string(dim_));
            }
            out.push_back(EmbeddingVector::normalized(std::move(values)));
        }
    }
    return out;
}

// --- cache -------------------------------------------------------------------

EmbeddingCache::EmbeddingCache(std::filesystem::path directory, std::string model_name) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw ProviderError("cannot create cache directory " + directory.string() + ": " + ec.message());
    shard_ = directory / (sanitize_file_name(model_name) + ".jsonl");
    std::ifstream in(shard_);
    if (!in) return;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const std::string where = shard_.string() + ":" + std::to_string(line_no);
        try {
            const json j = json::parse(line);
            const std::string text = j.at("text").get<std::string>();
            const std::string key = j.at("key").get<std::string>();
            if (key != sha256_hex(text)) throw ProviderError(where + ": key does not match text digest");
            const EmbedRole role = j.at("role").get<std::string>() == "passage" ? EmbedRole::passage : EmbedRole::query;
            entries_.insert_or_assign(entry_key(key, role),
                                      EmbeddingVector::normalized(parse_vector(j.at("vector"), where)));
        } catch (const json::exception& e) {
            throw ProviderError(where + ": " + e.what());
        }
    }
}

std::string EmbeddingCache::entry_key(std::string_view content_key, EmbedRole role) {
    std::string k(content_key);
    k += role == EmbedRole::query ? ":q" : ":p";
    return k;
}

std::optional<EmbeddingVector> EmbeddingCache::find(std::string_view text, EmbedRole role) const {
    const std::string key = entry_key(sha256_hex(text), role);
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EmbeddingCache::insert(std::string_view text, EmbedRole role, const EmbeddingVector& vector) {
    const std::string content_key = sha256_hex(text);
    const std::string key = entry_key(content_key, role);
    std::unique_lock lock(mutex_);
    if (entries_.contains(key)) return;
    json j = json::object();
    j["key"] = content_key;
    j["role"] = to_string(role);
    j["text"] = std::string(text);
    j["vector"] = std::vector<double>(vector.values().begin(), vector.values().end());
    std::ofstream out(shard_, std::ios::app | std::ios::binary);
    if (!out) throw ProviderError("cannot append to cache shard " + shard_.string());
    out << j.dump() << '\n';
    entries_.emplace(key, vector);
}

std::size_t EmbeddingCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

CachingProvider::CachingProvider(std::shared_ptr<const EmbeddingProvider> inner, std::filesystem::path cache_directory)
    : inner_(std::move(inner)) {
    if (!inner_) throw DomainError("caching provider needs an inner provider");
    cache_ = std::make_unique<EmbeddingCache>(std::move(cache_directory), inner_->model_name());
}

std::vector<EmbeddingVector> CachingProvider::embed_checked(std::span<const std::string> texts, EmbedRole role) const {
    std::vector<std::optional<EmbeddingVector>> found(texts.size());
    std::vector<std::string> missing;
    std::unordered_map<std::string, std::size_t> missing_index;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        found[i] = cache_->find(texts[i], role);
        if (!found[i] && missing_index.emplace(texts[i], missing.size()).second) missing.push_back(texts[i]);
    }
    if (!missing.empty()) {
        const auto fresh = inner_->embed_batch(missing, role);
        for (std::size_t i = 0; i < missing.size(); ++i) cache_->insert(missing[i], role, fresh[i]);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (!found[i]) found[i] = fresh[missing_index.at(texts[i])];
        }
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (auto& v : found) out.push_back(std::move(*v));
    return out;
}

std::shared_ptr<const EmbeddingProvider> make_provider(const ProviderSpec& spec, const HttpOptions& http) {
    switch (spec.kind) {
        case ProviderKind::synthetic:
            return std::make_shared<SyntheticProvider>(spec.seed, spec.gender_weight, spec.dim, spec.model_name);
        case ProviderKind::file: {
            auto provider = std::make_shared<FileProvider>(FileProvider::load(spec.path, spec.model_name));
            if (spec.dim != 0 && spec.dim != provider->dim()) {
                throw ProviderError("embedding store has dimension " + std::to_string(provider->dim()) +
                                    ", expected " + std::to_string(spec.dim));
            }
            return provider;
        }
        case ProviderKind::http: {
            std::string endpoint = spec.endpoint;
            if (const char* env = std::getenv(std::string(kEndpointEnvVar).c_str()); env && *env) endpoint = env;
            return std::make_shared<HttpProvider>(std::move(endpoint), http, spec.dim);
        }
    }
    throw DomainError("unknown provider kind");
}

}  // namespace rankfair
