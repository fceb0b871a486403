#pragma once
// Small fixtures shared across test files.

#include <atomic>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>
#include <unistd.h>

#include "pcr/pcr.hpp"

namespace fixture {

using pcr::Edge;
using pcr::KnowledgeGraph;
using pcr::Node;
using pcr::NodeId;

/// Nodes with given (id, text) pairs and unit-axis embeddings of width `dim`
/// (node i points along axis i % dim).
inline std::vector<Node> axis_nodes(std::initializer_list<std::pair<const char*, const char*>> spec,
                                    std::size_t dim = 3) {
    std::vector<Node> out;
    std::size_t i = 0;
    for (const auto& [id, text] : spec) {
        std::vector<double> e(dim, 0.0);
        e[i++ % dim] = 1.0;
        out.push_back({NodeId(id), text, e});
    }
    return out;
}

inline std::vector<Edge> edges(std::initializer_list<std::pair<const char*, const char*>> spec) {
    std::vector<Edge> out;
    for (const auto& [s, d] : spec) {
        out.push_back({NodeId(s), NodeId(d), std::nullopt});
    }
    return out;
}

/// a -> b -> c
inline KnowledgeGraph chain() {
    return KnowledgeGraph::build(3, axis_nodes({{"a", "alpha node"}, {"b", "beta node"}, {"c", "gamma node"}}),
                                 edges({{"a", "b"}, {"b", "c"}}));
}

inline std::vector<NodeId> ids(const std::vector<pcr::ScoredNode>& ranked) {
    std::vector<NodeId> out;
    for (const auto& s : ranked) out.push_back(s.node);
    return out;
}

inline std::vector<std::string> names(const std::vector<pcr::ScoredNode>& ranked) {
    std::vector<std::string> out;
    for (const auto& s : ranked) out.push_back(s.node.value);
    return out;
}

/// Graph whose node i ("d00", "d01", ...) carries texts[i]; embeddings are
/// deterministic so hybrid tests have a vector side too.
inline KnowledgeGraph text_graph(const std::vector<std::string>& texts, std::size_t dim = 16) {
    pcr::DeterministicProvider p(dim);
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "d%02zu", i);
        nodes.push_back({NodeId(id), texts[i], p.compute(texts[i])});
    }
    return KnowledgeGraph::build(dim, std::move(nodes), {});
}

/// Ten short documents with repeated terms, varied lengths and one term
/// (`zebra`) that occurs once.
inline const std::vector<std::string>& toy_corpus() {
    static const std::vector<std::string> docs{
        "graph retrieval with anchor nodes",
        "vector search over dense embeddings",
        "graph graph graph traversal",
        "bm25 ranking of short documents",
        "anchor constrained retrieval keeps graph structure",
        "dense retrieval misses structure",
        "breadth first search over a directed graph with many many words in it",
        "zebra",
        "ranking ranking documents",
        "structure aware retrieval for agents"};
    return docs;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("pcr-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

/// The reference dataset generated once per process.
inline const pcr::BenchmarkDataset& reference_dataset() {
    static const pcr::BenchmarkDataset ds = [] {
        pcr::DeterministicProvider provider;
        return pcr::generate_dataset(pcr::GeneratorConfig{}, provider, nullptr);
    }();
    return ds;
}

}  // namespace fixture
