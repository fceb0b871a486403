#pragma once

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <httplib.h>
#include <json.hpp>

#include "pcr/embedding.hpp"
#include "pcr/error.hpp"

namespace pcr {

/// Embeddings fetched from an HTTP(S) endpoint that speaks the common
/// `{"model", "input"}` -> `{"data": [{"embedding": [...]}]}` JSON shape.
/// Every fetched vector is written through to the cache (and to disk, when
/// a cache path is set) before `embed` returns; cached texts never hit the
/// network.
class RemoteProvider final : public EmbeddingProvider {
public:
    struct Endpoint {
        std::string base;  // scheme://host[:port]
        std::string path;  // /v1/embeddings
    };

    RemoteProvider(std::string url, std::string api_key, std::string model,
                   std::shared_ptr<EmbeddingCache> cache,
                   std::optional<std::filesystem::path> cache_path = std::nullopt)
        : endpoint_(split_url(url)), api_key_(std::move(api_key)), model_(std::move(model)),
          cache_(std::move(cache)), cache_path_(std::move(cache_path)) {
        if (!cache_) {
            throw ConfigError("remote provider requires a cache");
        }
    }

    /// Reads PCR_EMBED_URL (required) and PCR_EMBED_KEY (optional).
    static RemoteProvider from_environment(std::string model, std::shared_ptr<EmbeddingCache> cache,
                                           std::optional<std::filesystem::path> cache_path = std::nullopt) {
        const char* url = std::getenv("PCR_EMBED_URL");
        if (url == nullptr || *url == '\0') {
            throw ConfigError("PCR_EMBED_URL is not set; the remote-http provider needs an endpoint");
        }
        const char* key = std::getenv("PCR_EMBED_KEY");
        return RemoteProvider(url, key ? key : "", std::move(model), std::move(cache), std::move(cache_path));
    }

    static Endpoint split_url(std::string_view url) {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string_view::npos) {
            throw ConfigError("embedding endpoint '" + std::string(url) + "' has no scheme");
        }
        const std::string_view scheme = url.substr(0, scheme_end);
        if (scheme != "http" && scheme != "https") {
            throw ConfigError("embedding endpoint scheme must be http or https");
        }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
        if (scheme == "https") {
            throw ConfigError("this build has no TLS support; use an http:// endpoint");
        }
#endif
        const auto path_start = url.find('/', scheme_end + 3);
        if (path_start == std::string_view::npos) {
            return {std::string(url), "/"};
        }
        return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
    }

    ProviderKind kind() const override { return ProviderKind::remote_http; }
    std::size_t dimension() const override { return cache_->dimension(); }
    std::string id() const override { return "remote-http:" + model_; }

    EmbeddingVector embed(std::string_view text) override {
        if (auto hit = cache_->lookup(text)) {
            return *std::move(hit);
        }
        EmbeddingVector v = fetch(text);
        cache_->insert(text, v);
        if (cache_path_) {
            cache_->save(*cache_path_);
        }
        return v;
    }

private:
    EmbeddingVector fetch(std::string_view text) const {
        httplib::Client client(endpoint_.base);
        client.set_connection_timeout(10);
        client.set_read_timeout(60);
        httplib::Headers headers;
        if (!api_key_.empty()) {
            headers.emplace("Authorization", "Bearer " + api_key_);
        }
        const nlohmann::json body = {{"model", model_}, {"input", std::string(text)}};
        auto res = client.Post(endpoint_.path, headers, body.dump(), "application/json");
        if (!res) {
            throw ProviderError("embedding request failed: " + httplib::to_string(res.error()), true);
        }
        if (res->status == 429 || res->status >= 500) {
            throw ProviderError("embedding endpoint returned HTTP " + std::to_string(res->status), true);
        }
        if (res->status != 200) {
            throw ProviderError("embedding endpoint returned HTTP " + std::to_string(res->status), false);
        }

        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
            throw ProviderError(std::string("embedding response is not JSON: ") + e.what(), false);
        }
        const nlohmann::json* vec = nullptr;
        if (doc.contains("data") && doc["data"].is_array() && !doc["data"].empty() &&
            doc["data"][0].contains("embedding")) {
            vec = &doc["data"][0]["embedding"];
        } else if (doc.contains("embedding")) {
            vec = &doc["embedding"];
        }
        if (vec == nullptr || !vec->is_array()) {
            throw ProviderError("embedding response has no embedding array", false);
        }
        EmbeddingVector out;
        out.reserve(vec->size());
        for (const auto& c : *vec) {
            if (!c.is_number()) {
                throw ProviderError("embedding response has a non-numeric component", false);
            }
            out.push_back(c.get<double>());
        }
        if (out.size() != dimension()) {
            throw DimensionError(dimension(), out.size());
        }
        return out;
    }

    Endpoint endpoint_;
    std::string api_key_;
    std::string model_;
    std::shared_ptr<EmbeddingCache> cache_;
    std::optional<std::filesystem::path> cache_path_;
};

}  // namespace pcr
