// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

// Turning job-title strings into unit embeddings.
//
// Every provider normalizes at its boundary, so downstream cosine is a plain
// dot product. Three backends ship: a file-backed store, the deterministic
// synthetic "gender dial" embedder, and a client for the embedding sidecar.
// CachingProvider wraps any of them with a SHA-256 keyed JSONL cache.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rankfair/retrieval.hpp"

namespace rankfair {

enum class ProviderKind { file, synthetic, http };

/// Which side of the match a text is on. Only the sidecar uses it (some
/// encoders prefix queries and passages differently).
enum class EmbedRole { query, passage };

std::string_view to_string(EmbedRole role);

inline constexpr std::size_t kDefaultSyntheticDim = 384;
inline constexpr std::string_view kEndpointEnvVar = "RANKFAIR_EMBED_ENDPOINT";

struct ProviderSpec {
    ProviderKind kind = ProviderKind::synthetic;
    /// Empty means "derive": synthetic specs get a name from seed and weight,
    /// file specs use the file stem, http specs ask the sidecar.
    std::string model_name;
    /// 0 means "discover" for file and http kinds.
    std::size_t dim = kDefaultSyntheticDim;
    std::string endpoint;
    std::filesystem::path path;
    std::uint64_t seed = 0;
    double gender_weight = 0.0;

    /// The textual form accepted by parse_provider_spec.
    std::string to_string() const;
};

/// Parses `file:<path>`, `synthetic:<seed>,<weight>[,<dim>]` or
/// `http:<url>`. An optional `@<model name>` suffix sets model_name.
/// Throws ValidationError on malformed input.
ProviderSpec parse_provider_spec(std::string_view text);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual const std::string& model_name() const = 0;
    virtual std::size_t dim() const = 0;

    /// One unit vector per text, in input order. Texts must be non-empty
    /// after trimming. Safe to call concurrently.
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                             EmbedRole role = EmbedRole::query) const;

protected:
    virtual std::vector<EmbeddingVector> embed_checked(std::span<const std::string> texts,
                                                       EmbedRole role) const = 0;
};

// --- synthetic -------------------------------------------------------------

/// Deterministic gender-dial embedding.
///
/// A text ending in "#f" or "#m" is split into a lemma and a gender sign
/// (+1 for f, -1 for m); any other text is its own lemma with sign 0. The
/// lemma seeds a splitmix64 stream (state = splitmix64_mix(seed) XOR
/// fnv1a64(lemma)); consecutive outputs are mapped to (0, 1] uniforms as
/// ((x >> 11) + 1) * 2^-53 and turned into standard normals by Box-Muller.
/// The first dim-1 coordinates are those normals scaled to unit length, the
/// last coordinate is sign * gender_weight, and the whole vector is then
/// renormalized. At gender_weight 0 "x#f" and "x#m" embed identically.
EmbeddingVector synthetic_embed(std::uint64_t seed, std::string_view text, std::size_t dim, double gender_weight);

class SyntheticProvider final : public EmbeddingProvider {
public:
    SyntheticProvider(std::uint64_t seed, double gender_weight, std::size_t dim = kDefaultSyntheticDim,
                      std::string model_name = {});

    const std::string& model_name() const override { return model_name_; }
    std::size_t dim() const override { return dim_; }
    double gender_weight() const { return gender_weight_; }

protected:
    std::vector<EmbeddingVector> embed_checked(std::span<const std::string> texts, EmbedRole role) const override;

private:
    std::uint64_t seed_;
    double gender_weight_;
    std::size_t dim_;
    std::string model_name_;
};

// --- file store --------------------------------------------------------------

struct StoredEmbedding {
    std::string text;
    std::vector<double> vector;
};

/// Writes the store format: one {"text": ..., "vector": [...]} per line.
void write_embedding_store(const std::filesystem::path& path, std::span<const StoredEmbedding> entries);

class FileProvider final : public EmbeddingProvider {
public:
    /// Loads and validates a store. All vectors must share one dimension;
    /// a later duplicate text is an error.
    static FileProvider load(const std::filesystem::path& path, std::string model_name = {});

    const std::string& model_name() const override { return model_name_; }
    std::size_t dim() const override { return dim_; }
    std::size_t size() const { return vectors_.size(); }

protected:
    std::vector<EmbeddingVector> embed_checked(std::span<const std::string> texts, EmbedRole role) const override;

private:
    FileProvider() = default;
    std::string model_name_;
    std::size_t dim_ = 0;
    std::unordered_map<std::string, EmbeddingVector> vectors_;
};

// --- HTTP sidecar ------------------------------------------------------------

struct HttpOptions {
    std::chrono::milliseconds timeout{30000};
    std::size_t batch_limit = 64;
};

/// Client for the sidecar protocol: GET /v1/info, POST /v1/embed. The
/// constructor contacts /v1/info and fails with ProviderError if the sidecar
/// is unreachable or reports an inconsistent dimension.
class HttpProvider final : public EmbeddingProvider {
public:
    explicit HttpProvider(std::string endpoint, HttpOptions options = {}, std::size_t expected_dim = 0);

    const std::string& model_name() const override { return model_name_; }
    std::size_t dim() const override { return dim_; }
    const std::string& endpoint() const { return endpoint_; }

protected:
    std::vector<EmbeddingVector> embed_checked(std::span<const std::string> texts, EmbedRole role) const override;

private:
    std::string endpoint_;
    std::string host_;        // scheme://host[:port]
    std::string base_path_;   // path prefix, no trailing slash
    HttpOptions options_;
    std::string model_name_;
    std::size_t dim_ = 0;
};

// --- cache -------------------------------------------------------------------

/// On-disk embedding cache: one JSONL shard per model name under a
/// directory, entries {"key": sha256(text), "role", "text", "vector"}.
/// Concurrent lookups share a lock; inserts are serialized and appended to
/// the shard immediately.
class EmbeddingCache {
public:
    EmbeddingCache(std::filesystem::path directory, std::string model_name);

    std::optional<EmbeddingVector> find(std::string_view text, EmbedRole role) const;
    void insert(std::string_view text, EmbedRole role, const EmbeddingVector& vector);
    std::size_t size() const;
    const std::filesystem::path& shard_path() const { return shard_; }

private:
    static std::string entry_key(std::string_view content_key, EmbedRole role);

    std::filesystem::path shard_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, EmbeddingVector> entries_;
};

class CachingProvider final : public EmbeddingProvider {
public:
    CachingProvider(std::shared_ptr<const EmbeddingProvider> inner, std::filesystem::path cache_directory);

    const std::string& model_name() const override { return inner_->model_name(); }
    std::size_t dim() const override { return inner_->dim(); }
    const EmbeddingCache& cache() const { return *cache_; }

protected:
    std::vector<EmbeddingVector> embed_checked(std::span<const std::string> texts, EmbedRole role) const override;

private:
    std::shared_ptr<const EmbeddingProvider> inner_;
    std::unique_ptr<EmbeddingCache> cache_;
};

/// Builds the provider a spec describes. For http specs the endpoint is
/// taken from RANKFAIR_EMBED_ENDPOINT when that variable is set.
std::shared_ptr<const EmbeddingProvider> make_provider(const ProviderSpec& spec, const HttpOptions& http = {});

}  // namespace rankfair
