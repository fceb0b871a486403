#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pcr/error.hpp"
#include "pcr/graph.hpp"
#include "pcr/lexical.hpp"

namespace pcr {

/// dot(u, v) / (|u| |v|), clamped to [-1, 1]. A zero-norm input yields 0 so a
/// degenerate node ranks last instead of aborting a query.
inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw DimensionError(u.size(), v.size());
    }
    double dot = 0.0;
    double uu = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) {
        return 0.0;
    }
    const double s = dot / (std::sqrt(uu) * std::sqrt(vv));
    if (std::isnan(s)) {
        return 0.0;
    }
    return std::clamp(s, -1.0, 1.0);
}

// 64-bit FNV-1a followed by the splitmix64 finalizer.
inline std::uint64_t stable_hash(std::string_view bytes, std::uint64_t seed = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return h;
}

/// Cache key for a text: "fnv1a64:" + 16 hex digits.
inline std::string content_hash(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stable_hash(text)));
    return std::string("fnv1a64:") + buf;
}

enum class ProviderKind { deterministic_local, file_cache, remote_http };

inline std::string to_string(ProviderKind k) {
    switch (k) {
        case ProviderKind::deterministic_local: return "deterministic-local";
        case ProviderKind::file_cache: return "file-cache";
        case ProviderKind::remote_http: return "remote-http";
    }
    return "unknown";
}

/// Implementations must tolerate concurrent `embed` calls.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual ProviderKind kind() const = 0;
    virtual std::size_t dimension() const = 0;
    /// Stable identifier recorded in dataset manifests.
    virtual std::string id() const = 0;
    virtual EmbeddingVector embed(std::string_view text) = 0;
};

inline EmbeddingVector embed_text(EmbeddingProvider& p, std::string_view text) {
    if (text.empty()) {
        throw ConfigError("cannot embed empty text");
    }
    EmbeddingVector v = p.embed(text);
    if (v.size() != p.dimension()) {
        throw DimensionError(p.dimension(), v.size());
    }
    for (double c : v) {
        if (!std::isfinite(c)) {
            throw ProviderError("provider '" + p.id() + "' returned a non-finite component", false);
        }
    }
    return v;
}

/// Offline embedding built by hashing token unigrams, token bigrams and
/// character trigrams into signed buckets, then L2-normalizing. Texts that
/// share vocabulary get correlated vectors; nothing here is learned.
class DeterministicProvider final : public EmbeddingProvider {
public:
    static constexpr std::uint64_t kDefaultSeed = 0x7063725f656d6231ULL;

    explicit DeterministicProvider(std::size_t dimension = 64, std::uint64_t seed = kDefaultSeed)
        : dimension_(dimension), seed_(seed) {
        if (dimension == 0) {
            throw ConfigError("embedding dimension must be positive");
        }
    }

    ProviderKind kind() const override { return ProviderKind::deterministic_local; }
    std::size_t dimension() const override { return dimension_; }

    std::string id() const override {
        std::ostringstream os;
        os << "deterministic-local:dim=" << dimension_ << ":seed=" << std::hex << seed_;
        return os.str();
    }

    EmbeddingVector compute(std::string_view text) const {
        EmbeddingVector v(dimension_, 0.0);
        const auto tokens = tokenize(text);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            add_feature(v, "w:" + tokens[i], 1.0);
            if (i + 1 < tokens.size()) {
                add_feature(v, "b:" + tokens[i] + " " + tokens[i + 1], 0.5);
            }
            const std::string padded = "#" + tokens[i] + "#";
            const std::size_t grams = padded.size() - 2;
            for (std::size_t j = 0; j < grams; ++j) {
                add_feature(v, "c:" + padded.substr(j, 3), 0.6 / static_cast<double>(grams));
            }
        }
        double norm = 0.0;
        for (double c : v) {
            norm += c * c;
        }
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (double& c : v) {
                c /= norm;
            }
        }
        return v;
    }

    EmbeddingVector embed(std::string_view text) override { return compute(text); }

private:
    void add_feature(EmbeddingVector& v, const std::string& feature, double weight) const {
        // Two independent buckets per feature soften collisions at small widths.
        for (std::uint64_t probe = 0; probe < 2; ++probe) {
            const std::uint64_t h = stable_hash(feature, seed_ + probe * 0x9e3779b97f4a7c15ULL);
            const double sign = (h >> 63) ? -1.0 : 1.0;
            v[h % dimension_] += sign * weight;
        }
    }

    std::size_t dimension_;
    std::uint64_t seed_;
};

/// Text-hash -> vector store backing the file-cache provider and the write-
/// through cache of the remote provider. All members lock internally.
class EmbeddingCache {
public:
    EmbeddingCache(std::size_t dimension, std::string provider)
        : dimension_(dimension), provider_(std::move(provider)) {}

    EmbeddingCache(EmbeddingCache&& other) noexcept
        : dimension_(other.dimension_), provider_(std::move(other.provider_)) {
        std::lock_guard lock(other.mutex_);
        entries_ = std::move(other.entries_);
    }

    static EmbeddingCache from_json(const nlohmann::json& doc) {
        const auto& dim = detail::require_field(doc, "dimension", "embedding cache");
        if (!dim.is_number_integer() || dim.get<long long>() <= 0) {
            throw ValidationError("embedding cache 'dimension' must be a positive integer", "dimension");
        }
        EmbeddingCache cache(dim.get<std::size_t>(), detail::require_string(doc, "provider", "embedding cache"));
        const auto& entries = detail::require_field(doc, "embeddings", "embedding cache");
        if (!entries.is_object()) {
            throw ValidationError("embedding cache 'embeddings' must be an object", "embeddings");
        }
        for (const auto& [key, value] : entries.items()) {
            EmbeddingVector v;
            for (const auto& c : value) {
                if (!c.is_number()) {
                    throw ValidationError("cache entry '" + key + "' has a non-numeric component", key);
                }
                v.push_back(c.get<double>());
            }
            if (v.size() != cache.dimension_) {
                throw ValidationError("cache entry '" + key + "' has the wrong length", key);
            }
            cache.entries_.emplace(key, std::move(v));
        }
        return cache;
    }

    static EmbeddingCache load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw NotFoundError("cannot open embedding cache '" + path.string() + "'");
        }
        std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        return from_json(detail::parse_json(text));
    }

    nlohmann::json to_json() const {
        std::lock_guard lock(mutex_);
        nlohmann::json entries = nlohmann::json::object();
        for (const auto& [key, v] : entries_) {
            entries[key] = v;
        }
        return {{"dimension", dimension_}, {"provider", provider_}, {"embeddings", std::move(entries)}};
    }

    void save(const std::filesystem::path& path) const {
        const std::string text = to_json().dump(1);
        std::lock_guard lock(write_mutex_);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write embedding cache '" + path.string() + "'");
        }
        out << text << '\n';
    }

    std::optional<EmbeddingVector> lookup(std::string_view text) const {
        const std::string key = content_hash(text);
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    void insert(std::string_view text, EmbeddingVector v) {
        if (v.size() != dimension_) {
            throw DimensionError(dimension_, v.size());
        }
        const std::string key = content_hash(text);
        std::lock_guard lock(mutex_);
        entries_.insert_or_assign(key, std::move(v));
    }

    std::size_t dimension() const noexcept { return dimension_; }
    const std::string& provider() const noexcept { return provider_; }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    std::size_t dimension_;
    std::string provider_;
    std::map<std::string, EmbeddingVector> entries_;
    mutable std::mutex mutex_;
    mutable std::mutex write_mutex_;
};

/// Lookup-only provider: a miss is a NotFoundError, never a computation.
class FileCacheProvider final : public EmbeddingProvider {
public:
    explicit FileCacheProvider(std::shared_ptr<const EmbeddingCache> cache) : cache_(std::move(cache)) {}

    ProviderKind kind() const override { return ProviderKind::file_cache; }
    std::size_t dimension() const override { return cache_->dimension(); }
    std::string id() const override { return "file-cache:" + cache_->provider(); }

    EmbeddingVector embed(std::string_view text) override {
        auto v = cache_->lookup(text);
        if (!v) {
            throw NotFoundError("no cached embedding for text (" + content_hash(text) + ")");
        }
        return *std::move(v);
    }

private:
    std::shared_ptr<const EmbeddingCache> cache_;
};

}  // namespace pcr
