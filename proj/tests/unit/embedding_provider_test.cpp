// Copyright 2026 The rankfair Authors
// SPDX-License-Identifier: Apache-2.0

#include "rankfair/embedding_provider.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "rankfair/error.hpp"
#include "support/oracles.hpp"

namespace rankfair {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rankfair_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double norm(const EmbeddingVector& v) {
    double s = 0.0;
    for (double x : v.values()) s += x * x;
    return std::sqrt(s);
}

// Counts calls to the wrapped provider.
class CountingProvider final : public EmbeddingProvider {
public:
    explicit CountingProvider(std::shared_ptr<const EmbeddingProvider> inner) : inner_(std::move(inner)) {}
    const std::string& model_name() const override { return inner_->model_name(); }
    std::size_t dim() const override { return inner_->dim(); }
    mutable std::atomic<std::size_t> texts_embedded{0};

protected:
    std::vector<EmbeddingVector> embed_checked(std::span<const std::string> texts, EmbedRole role) const override {
        texts_embedded += texts.size();
        return inner_->embed_batch(texts, role);
    }

private:
    std::shared_ptr<const EmbeddingProvider> inner_;
};

// Returns the wrong number of vectors.
class ShortProvider final : public EmbeddingProvider {
public:
    const std::string& model_name() const override { return name_; }
    std::size_t dim() const override { return 2; }

protected:
    std::vector<EmbeddingVector> embed_checked(std::span<const std::string>, EmbedRole) const override {
        return {EmbeddingVector::normalized({1.0, 0.0})};
    }

private:
    std::string name_ = "short";
};

TEST(ParseProviderSpec, Synthetic) {
    const ProviderSpec s = parse_provider_spec("synthetic:42,0.5");
    EXPECT_EQ(s.kind, ProviderKind::synthetic);
    EXPECT_EQ(s.seed, 42u);
    EXPECT_EQ(s.gender_weight, 0.5);
    EXPECT_EQ(s.dim, kDefaultSyntheticDim);
    EXPECT_EQ(s.to_string(), "synthetic:42,0.5");
    const ProviderSpec d = parse_provider_spec("synthetic:7,2,16@dial");
    EXPECT_EQ(d.dim, 16u);
    EXPECT_EQ(d.model_name, "dial");
    EXPECT_EQ(parse_provider_spec(d.to_string()).to_string(), d.to_string());
}

TEST(ParseProviderSpec, FileAndHttp) {
    const ProviderSpec f = parse_provider_spec("file:/tmp/store.jsonl");
    EXPECT_EQ(f.kind, ProviderKind::file);
    EXPECT_EQ(f.path, fs::path("/tmp/store.jsonl"));
    EXPECT_EQ(f.dim, 0u);
    const ProviderSpec h = parse_provider_spec("http:localhost:8080");
    EXPECT_EQ(h.kind, ProviderKind::http);
    EXPECT_EQ(h.endpoint, "http://localhost:8080");
    EXPECT_EQ(parse_provider_spec("http:http://127.0.0.1:9/x").endpoint, "http://127.0.0.1:9/x");
}

TEST(ParseProviderSpec, RejectsMalformed) {
    for (const char* bad : {"synthetic", "synthetic:1", "synthetic:x,1", "synthetic:1,-1", "synthetic:1,nan",
                            "synthetic:1,1,1", "synthetic:1,1,2,3", "file:", "http:", "ftp:x", "synthetic:1,1@"}) {
        EXPECT_THROW(parse_provider_spec(bad), ValidationError) << bad;
    }
}

TEST(SyntheticEmbed, DeterministicAndUnitNorm) {
    const auto a = synthetic_embed(5, "abogada", 64, 0.3);
    const auto b = synthetic_embed(5, "abogada", 64, 0.3);
    EXPECT_EQ(a, b);
    EXPECT_NEAR(norm(a), 1.0, 1e-12);
    EXPECT_NE(synthetic_embed(6, "abogada", 64, 0.3), a);
    EXPECT_NE(synthetic_embed(5, "abogado", 64, 0.3), a);
}

TEST(SyntheticEmbed, ZeroWeightErasesGender) {
    const auto f = synthetic_embed(9, "t1#f", 32, 0.0);
    const auto m = synthetic_embed(9, "t1#m", 32, 0.0);
    EXPECT_EQ(f, m);
    EXPECT_EQ(f[31], 0.0);
    EXPECT_EQ(f, synthetic_embed(9, "t1", 32, 0.0));
}

TEST(SyntheticEmbed, OnlyTrailingMarkerCounts) {
    const auto plain = synthetic_embed(9, "a#fb", 8, 1.0);
    EXPECT_EQ(plain[7], 0.0);
    EXPECT_GT(synthetic_embed(9, "a#f", 8, 1.0)[7], 0.0);
    EXPECT_LT(synthetic_embed(9, "a#m", 8, 1.0)[7], 0.0);
}

TEST(SyntheticEmbed, LargeWeightDrivesPairToAntipodes) {
    const auto f = synthetic_embed(1, "x#f", 384, 1e3);
    const auto m = synthetic_embed(1, "x#m", 384, 1e3);
    double dot = 0.0;
    for (std::size_t i = 0; i < f.dim(); ++i) dot += f[i] * m[i];
    EXPECT_NEAR(dot, -1.0, 1e-3);
    // The construction gives (1 - w^2) / (1 + w^2) exactly.
    const double w = 0.7;
    const auto f2 = synthetic_embed(1, "y#f", 50, w);
    const auto m2 = synthetic_embed(1, "y#m", 50, w);
    double dot2 = 0.0;
    for (std::size_t i = 0; i < f2.dim(); ++i) dot2 += f2[i] * m2[i];
    EXPECT_NEAR(dot2, (1 - w * w) / (1 + w * w), 1e-12);
}

TEST(SyntheticEmbed, PairDistanceGrowsWithWeight) {
    testing::Gen gen(41);
    for (int trial = 0; trial < 30; ++trial) {
        const std::string lemma = "l" + std::to_string(gen.size(0, 1u << 20));
        const std::uint64_t seed = gen.size(0, 1000);
        double last = -1.0;
        for (double w = 0.0; w < 5.0; w += gen.uniform(0.01, 0.5)) {
            const auto f = synthetic_embed(seed, lemma + "#f", 24, w);
            const auto m = synthetic_embed(seed, lemma + "#m", 24, w);
            double d2 = 0.0;
            for (std::size_t i = 0; i < f.dim(); ++i) d2 += (f[i] - m[i]) * (f[i] - m[i]);
            EXPECT_GE(d2, last);
            last = d2;
        }
    }
}

TEST(SyntheticEmbed, RejectsBadParameters) {
    EXPECT_THROW(synthetic_embed(1, "x", 1, 0.0), DomainError);
    EXPECT_THROW(synthetic_embed(1, "x", 8, -1.0), DomainError);
    EXPECT_THROW(synthetic_embed(1, "x", 8, std::nan("")), DomainError);
}

TEST(SyntheticProvider, BatchMatchesSingleEmbeds) {
    const SyntheticProvider p(3, 0.25, 16);
    const std::vector<std::string> texts{"a#f", "b", "a#m"};
    const auto out = p.embed_batch(texts);
    ASSERT_EQ(out.size(), 3u);
    for (std::size_t i = 0; i < texts.size(); ++i) EXPECT_EQ(out[i], synthetic_embed(3, texts[i], 16, 0.25));
    EXPECT_EQ(p.model_name(), "synthetic-s3-w0.25");
    EXPECT_EQ(p.dim(), 16u);
}

TEST(EmbeddingProvider, RejectsEmptyBatchesAndTexts) {
    const SyntheticProvider p(3, 0.0, 8);
    EXPECT_THROW(p.embed_batch(std::vector<std::string>{}), ProviderError);
    EXPECT_THROW(p.embed_batch(std::vector<std::string>{"ok", "  "}), ProviderError);
}

TEST(EmbeddingProvider, ChecksVectorCount) {
    const ShortProvider p;
    EXPECT_THROW(p.embed_batch(std::vector<std::string>{"a", "b"}), ProviderError);
}

TEST(FileProvider, ReturnsRenormalizedStoredVectors) {
    const fs::path dir = scratch_dir("file_provider");
    const std::vector<StoredEmbedding> store{
        {"abogada", {3.0, 4.0, 0.0}}, {"abogado", {0.0, 0.0, 2.0}}, {"juez", {1.0, 1.0, 1.0}}};
    write_embedding_store(dir / "tiny.jsonl", store);
    const FileProvider p = FileProvider::load(dir / "tiny.jsonl");
    EXPECT_EQ(p.model_name(), "tiny");
    EXPECT_EQ(p.dim(), 3u);
    EXPECT_EQ(p.size(), 3u);
    const auto out = p.embed_batch(std::vector<std::string>{"abogado", "abogada"});
    EXPECT_EQ(out[0], EmbeddingVector::normalized({0.0, 0.0, 1.0}));
    EXPECT_DOUBLE_EQ(out[1][0], 0.6);
    EXPECT_THROW(p.embed_batch(std::vector<std::string>{"fiscal"}), ProviderError);
}

TEST(FileProvider, RoundTripsSyntheticVectors) {
    const fs::path dir = scratch_dir("file_roundtrip");
    const SyntheticProvider synth(8, 0.5, 12);
    const std::vector<std::string> texts{"t1#f", "t1#m", "n2"};
    const auto vectors = synth.embed_batch(texts);
    std::vector<StoredEmbedding> store;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        store.push_back({texts[i], {vectors[i].values().begin(), vectors[i].values().end()}});
    }
    write_embedding_store(dir / "s.jsonl", store);
    const auto back = FileProvider::load(dir / "s.jsonl", "named").embed_batch(texts);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(back[i][j], vectors[i][j], 1e-15);
    }
}

TEST(FileProvider, RejectsBadStores) {
    const fs::path dir = scratch_dir("file_bad");
    const auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream(dir / name) << content;
        return dir / name;
    };
    EXPECT_THROW(FileProvider::load(dir / "missing.jsonl"), ProviderError);
    EXPECT_THROW(FileProvider::load(write("empty.jsonl", "")), ProviderError);
    EXPECT_THROW(FileProvider::load(write("dup.jsonl", "{\"text\":\"a\",\"vector\":[1,0]}\n"
                                                       "{\"text\":\"a\",\"vector\":[0,1]}\n")),
                 ProviderError);
    EXPECT_THROW(FileProvider::load(write("mixed.jsonl", "{\"text\":\"a\",\"vector\":[1,0]}\n"
                                                         "{\"text\":\"b\",\"vector\":[0,1,0]}\n")),
                 ProviderError);
    EXPECT_THROW(FileProvider::load(write("zero.jsonl", "{\"text\":\"a\",\"vector\":[0,0]}\n")), ProviderError);
    EXPECT_THROW(FileProvider::load(write("text.jsonl", "{\"text\":\"a\",\"vector\":[\"x\"]}\n")), ProviderError);
    EXPECT_THROW(FileProvider::load(write("junk.jsonl", "nope\n")), ProviderError);
}

TEST(MakeProvider, BuildsEachKind) {
    const auto synth = make_provider(parse_provider_spec("synthetic:1,0,8"));
    EXPECT_EQ(synth->dim(), 8u);
    const fs::path dir = scratch_dir("make_provider");
    write_embedding_store(dir / "m.jsonl", std::vector<StoredEmbedding>{{"a", {1.0, 2.0}}});
    const auto file = make_provider(parse_provider_spec("file:" + (dir / "m.jsonl").string()));
    EXPECT_EQ(file->dim(), 2u);
    ProviderSpec wrong_dim = parse_provider_spec("file:" + (dir / "m.jsonl").string());
    wrong_dim.dim = 3;
    EXPECT_THROW(make_provider(wrong_dim), ProviderError);
}

TEST(EmbeddingCache, PersistsAcrossInstances) {
    const fs::path dir = scratch_dir("cache_persist");
    const auto v = EmbeddingVector::normalized({1.0, 2.0, 3.0});
    {
        EmbeddingCache cache(dir, "model/a");
        EXPECT_FALSE(cache.find("abogada", EmbedRole::query));
        cache.insert("abogada", EmbedRole::query, v);
        cache.insert("abogada", EmbedRole::query, v);
        EXPECT_EQ(cache.size(), 1u);
        EXPECT_EQ(cache.shard_path().parent_path(), dir);
    }
    EmbeddingCache reopened(dir, "model/a");
    EXPECT_EQ(reopened.size(), 1u);
    EXPECT_EQ(reopened.find("abogada", EmbedRole::query), v);
    EXPECT_FALSE(reopened.find("abogada", EmbedRole::passage));
    EmbeddingCache other(dir, "model-b");
    EXPECT_EQ(other.size(), 0u);
}

TEST(CachingProvider, EmbedsEachTextOnce) {
    const fs::path dir = scratch_dir("cache_provider");
    auto inner = std::make_shared<CountingProvider>(std::make_shared<SyntheticProvider>(2, 0.5, 16));
    const CachingProvider cached(inner, dir);
    const std::vector<std::string> first{"a#f", "b", "a#f"};
    const auto out1 = cached.embed_batch(first);
    EXPECT_EQ(inner->texts_embedded.load(), 2u);
    const std::vector<std::string> second{"b", "c", "a#f"};
    const auto out2 = cached.embed_batch(second);
    EXPECT_EQ(inner->texts_embedded.load(), 3u);
    EXPECT_EQ(out1[0], out2[2]);
    EXPECT_EQ(out1[1], out2[0]);
    EXPECT_EQ(out2[1], synthetic_embed(2, "c", 16, 0.5));
    cached.embed_batch(first, EmbedRole::passage);
    EXPECT_EQ(inner->texts_embedded.load(), 5u);

    auto fresh = std::make_shared<CountingProvider>(std::make_shared<SyntheticProvider>(2, 0.5, 16));
    const CachingProvider again(fresh, dir);
    EXPECT_EQ(again.embed_batch(second), out2);
    EXPECT_EQ(fresh->texts_embedded.load(), 0u);
}

TEST(CachingProvider, ConcurrentCallersAgree) {
    const fs::path dir = scratch_dir("cache_concurrent");
    const CachingProvider cached(std::make_shared<SyntheticProvider>(4, 1.0, 8), dir);
    std::vector<std::vector<EmbeddingVector>> results(4);
    {
        std::vector<std::jthread> threads;
        for (std::size_t t = 0; t < results.size(); ++t) {
            threads.emplace_back([&, t] {
                std::vector<std::string> texts;
                for (int i = 0; i < 50; ++i) texts.push_back("w" + std::to_string(i));
                results[t] = cached.embed_batch(texts);
            });
        }
    }
    for (const auto& r : results) EXPECT_EQ(r, results[0]);
    EXPECT_EQ(EmbeddingCache(dir, cached.model_name()).size(), 50u);
}

}  // namespace
}  // namespace rankfair
