#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcr/embedding.hpp"
#include "pcr/error.hpp"
#include "pcr/graph.hpp"
#include "pcr/metrics.hpp"
#include "pcr/retrieval.hpp"

namespace pcr {

struct QuerySpec {
    std::string id;
    std::string text;
    NodeId anchor;
    std::set<NodeId> relevant;
    /// Cached query embedding; empty when the dataset was written without one.
    EmbeddingVector embedding;

    friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

struct Domain {
    std::string name;
    KnowledgeGraph graph;
    std::vector<QuerySpec> queries;

    friend bool operator==(const Domain&, const Domain&) = default;
};

struct Manifest {
    std::uint64_t seed = 0;
    std::string generator_version;
    std::string embedding_provider;
    std::size_t dimension = 0;
    std::vector<std::string> domains;

    friend bool operator==(const Manifest&, const Manifest&) = default;
};

struct BenchmarkDataset {
    Manifest manifest;
    std::vector<Domain> domains;

    const Domain& domain(const std::string& name) const {
        for (const auto& d : domains) {
            if (d.name == name) {
                return d;
            }
        }
        throw NotFoundError("dataset has no domain '" + name + "'");
    }

    friend bool operator==(const BenchmarkDataset&, const BenchmarkDataset&) = default;
};

/// Checks that every query resolves against its graph: anchor and relevant
/// ids exist, relevant is non-empty, ids are unique, embeddings (when
/// present) match the graph dimension.
inline void validate_queries(const Domain& d) {
    std::set<std::string> seen;
    for (const auto& q : d.queries) {
        if (q.id.empty() || !seen.insert(q.id).second) {
            throw ValidationError("domain '" + d.name + "': duplicate or empty query id '" + q.id + "'", q.id);
        }
        if (q.text.empty()) {
            throw ValidationError("query '" + q.id + "' has empty text", q.id);
        }
        if (!d.graph.contains(q.anchor)) {
            throw ValidationError("query '" + q.id + "' anchor '" + q.anchor.value + "' is not a node of domain '" +
                                      d.name + "'",
                                  q.anchor.value);
        }
        if (q.relevant.empty()) {
            throw ValidationError("query '" + q.id + "' has no relevant nodes", q.id);
        }
        for (const auto& r : q.relevant) {
            if (!d.graph.contains(r)) {
                throw ValidationError("query '" + q.id + "' relevant node '" + r.value + "' is not a node of domain '" +
                                          d.name + "'",
                                      r.value);
            }
        }
        if (!q.embedding.empty() && q.embedding.size() != d.graph.dimension()) {
            throw ValidationError("query '" + q.id + "' embedding has the wrong length", q.id);
        }
    }
}

inline nlohmann::json queries_to_json(const Domain& d) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& q : d.queries) {
        nlohmann::json rel = nlohmann::json::array();
        for (const auto& r : q.relevant) {
            rel.push_back(r.value);
        }
        nlohmann::json j = {{"id", q.id}, {"text", q.text}, {"anchor", q.anchor.value}, {"relevant", std::move(rel)}};
        if (!q.embedding.empty()) {
            j["embedding"] = q.embedding;
        }
        arr.push_back(std::move(j));
    }
    return {{"domain", d.name}, {"queries", std::move(arr)}};
}

inline std::vector<QuerySpec> queries_from_json(const nlohmann::json& doc) {
    const auto& arr = detail::require_field(doc, "queries", "queries document");
    if (!arr.is_array()) {
        throw ValidationError("'queries' must be an array", "queries");
    }
    std::vector<QuerySpec> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "query #" + std::to_string(i);
        QuerySpec q;
        q.id = detail::require_string(arr[i], "id", where);
        q.text = detail::require_string(arr[i], "text", where);
        q.anchor = detail::require_string(arr[i], "anchor", where);
        const auto& rel = detail::require_field(arr[i], "relevant", where);
        if (!rel.is_array()) {
            throw ValidationError(where + " 'relevant' must be an array", q.id);
        }
        for (const auto& r : rel) {
            if (!r.is_string()) {
                throw ValidationError(where + " 'relevant' entries must be strings", q.id);
            }
            q.relevant.insert(NodeId(r.get<std::string>()));
        }
        if (auto e = arr[i].find("embedding"); e != arr[i].end() && !e->is_null()) {
            for (const auto& c : *e) {
                if (!c.is_number()) {
                    throw ValidationError(where + " embedding has a non-numeric component", q.id);
                }
                q.embedding.push_back(c.get<double>());
            }
        }
        out.push_back(std::move(q));
    }
    return out;
}

inline nlohmann::json to_json(const Manifest& m) {
    return {{"seed", m.seed},
            {"generator_version", m.generator_version},
            {"embedding_provider", m.embedding_provider},
            {"dimension", m.dimension},
            {"domains", m.domains}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    try {
        m.seed = j.at("seed").get<std::uint64_t>();
        m.generator_version = j.at("generator_version").get<std::string>();
        m.embedding_provider = j.at("embedding_provider").get<std::string>();
        m.dimension = j.at("dimension").get<std::size_t>();
        m.domains = j.at("domains").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid manifest: ") + e.what(), "manifest.json");
    }
    return m;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw NotFoundError("cannot open '" + p.string() + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + p.string() + "'");
    }
    out << text;
    if (!out.flush()) {
        throw Error("failed writing '" + p.string() + "'");
    }
}

inline std::string dump(const nlohmann::json& j) { return j.dump(1) + "\n"; }

template <typename F>
auto with_file_context(const std::filesystem::path& p, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw ParseError(p.string() + ": " + e.what(), e.offset());
    } catch (const ValidationError& e) {
        throw ValidationError(p.string() + ": " + e.what(), e.element());
    }
}

}  // namespace detail

/// Layout:
///   manifest.json
///   embedding_cache.json          (every node and query text)
///   <domain>/graph.json
///   <domain>/queries.json
/// Refuses to write into a non-empty directory unless `force` is set.
inline void write_dataset(const BenchmarkDataset& ds, const std::filesystem::path& dir, bool force = false,
                          const EmbeddingCache* cache = nullptr) {
    namespace fs = std::filesystem;
    if (fs::exists(dir) && !fs::is_directory(dir)) {
        throw ConfigError("'" + dir.string() + "' exists and is not a directory");
    }
    if (fs::exists(dir) && !fs::is_empty(dir) && !force) {
        throw ConfigError("output directory '" + dir.string() + "' is not empty; pass --force to overwrite");
    }
    fs::create_directories(dir);
    detail::write_file(dir / "manifest.json", detail::dump(to_json(ds.manifest)));
    for (const auto& d : ds.domains) {
        fs::create_directories(dir / d.name);
        detail::write_file(dir / d.name / "graph.json", detail::dump(graph_to_json(d.graph)));
        detail::write_file(dir / d.name / "queries.json", detail::dump(queries_to_json(d)));
    }
    if (cache != nullptr) {
        detail::write_file(dir / "embedding_cache.json", detail::dump(cache->to_json()));
    }
}

inline BenchmarkDataset load_dataset(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw NotFoundError("dataset directory '" + dir.string() + "' does not exist");
    }
    BenchmarkDataset ds;
    const auto manifest_path = dir / "manifest.json";
    ds.manifest = detail::with_file_context(manifest_path, [&] {
        return manifest_from_json(detail::parse_json(detail::read_file(manifest_path)));
    });
    for (const auto& name : ds.manifest.domains) {
        const auto gpath = dir / name / "graph.json";
        const auto qpath = dir / name / "queries.json";
        auto graph = detail::with_file_context(gpath, [&] { return load_graph(detail::read_file(gpath)); });
        auto queries = detail::with_file_context(
            qpath, [&] { return queries_from_json(detail::parse_json(detail::read_file(qpath))); });
        Domain d{name, std::move(graph), std::move(queries)};
        detail::with_file_context(qpath, [&] {
            validate_queries(d);
            return 0;
        });
        ds.domains.push_back(std::move(d));
    }
    return ds;
}

inline Query to_query(const QuerySpec& q) { return {q.id, q.text, q.anchor, q.embedding}; }

inline GroundTruth to_ground_truth(const QuerySpec& q) { return {q.id, q.relevant}; }

}  // namespace pcr
