#pragma once

#include <compare>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pcr/error.hpp"

namespace pcr {

/// Opaque node identifier. Ordering is plain lexicographic on the string and
/// is the tie-break order for every ranking in the library.
struct NodeId {
    std::string value;

    NodeId() = default;
    NodeId(std::string v) : value(std::move(v)) {}
    NodeId(const char* v) : value(v) {}

    const std::string& str() const noexcept { return value; }
    bool empty() const noexcept { return value.empty(); }

    friend auto operator<=>(const NodeId&, const NodeId&) = default;
    friend bool operator==(const NodeId&, const NodeId&) = default;
    friend std::ostream& operator<<(std::ostream& os, const NodeId& id) { return os << id.value; }
};

}  // namespace pcr

template <>
struct std::hash<pcr::NodeId> {
    std::size_t operator()(const pcr::NodeId& id) const noexcept {
        return std::hash<std::string>{}(id.value);
    }
};

namespace pcr {

using EmbeddingVector = std::vector<double>;

struct Node {
    NodeId id;
    std::string text;
    EmbeddingVector embedding;

    friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
    NodeId src;
    NodeId dst;
    std::optional<std::string> relation;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed graph of text nodes with embeddings. Immutable once built; the
/// only way to obtain one is `KnowledgeGraph::build` (or `load_graph`), which
/// validates every invariant.
class KnowledgeGraph {
public:
    static KnowledgeGraph build(std::size_t dimension, std::vector<Node> nodes, std::vector<Edge> edges) {
        if (dimension == 0) {
            throw ValidationError("graph dimension must be positive", "dimension");
        }
        KnowledgeGraph g;
        g.dimension_ = dimension;
        g.nodes_ = std::move(nodes);
        g.edges_ = std::move(edges);

        g.index_.reserve(g.nodes_.size());
        for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
            const Node& n = g.nodes_[i];
            if (n.id.empty()) {
                throw ValidationError("node #" + std::to_string(i) + " has an empty id", "#" + std::to_string(i));
            }
            if (n.text.empty()) {
                throw ValidationError("node '" + n.id.value + "' has empty text", n.id.value);
            }
            if (n.embedding.size() != dimension) {
                throw ValidationError("node '" + n.id.value + "' embedding has length " +
                                          std::to_string(n.embedding.size()) + ", graph dimension is " +
                                          std::to_string(dimension),
                                      n.id.value);
            }
            for (double c : n.embedding) {
                if (!std::isfinite(c)) {
                    throw ValidationError("node '" + n.id.value + "' embedding has a non-finite component",
                                          n.id.value);
                }
            }
            if (!g.index_.emplace(n.id, i).second) {
                throw ValidationError("duplicate node id '" + n.id.value + "'", n.id.value);
            }
        }

        // CSR adjacency; parallel edges and self-loops are kept but harmless to BFS.
        std::vector<std::size_t> src_idx(g.edges_.size());
        std::vector<std::size_t> dst_idx(g.edges_.size());
        g.offsets_.assign(g.nodes_.size() + 1, 0);
        for (std::size_t e = 0; e < g.edges_.size(); ++e) {
            const Edge& edge = g.edges_[e];
            for (const NodeId* end : {&edge.src, &edge.dst}) {
                if (!g.index_.contains(*end)) {
                    throw ValidationError("edge #" + std::to_string(e) + " (" + edge.src.value + " -> " +
                                              edge.dst.value + ") references unknown node '" + end->value + "'",
                                          end->value);
                }
            }
            src_idx[e] = g.index_.at(edge.src);
            dst_idx[e] = g.index_.at(edge.dst);
            ++g.offsets_[src_idx[e] + 1];
        }
        for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
            g.offsets_[i + 1] += g.offsets_[i];
        }
        g.targets_.resize(g.edges_.size());
        std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (std::size_t e = 0; e < g.edges_.size(); ++e) {
            g.targets_[cursor[src_idx[e]]++] = dst_idx[e];
        }
        return g;
    }

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::span<const Edge> edges() const noexcept { return edges_; }

    const Node& node(std::size_t index) const { return nodes_.at(index); }

    std::optional<std::size_t> index_of(const NodeId& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    bool contains(const NodeId& id) const { return index_.contains(id); }

    std::size_t require_index(const NodeId& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) {
            throw NotFoundError("unknown node '" + id.value + "'");
        }
        return it->second;
    }

    /// Out-neighbour indices of node `index`, one entry per edge.
    std::span<const std::size_t> successors(std::size_t index) const {
        return std::span<const std::size_t>(targets_).subspan(offsets_[index], offsets_[index + 1] - offsets_[index]);
    }

    friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
        return a.dimension_ == b.dimension_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    KnowledgeGraph() = default;

    std::size_t dimension_ = 0;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<NodeId, std::size_t> index_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> targets_;
};

/// Shortest hop distances from an anchor, optionally cut off at `max_depth`.
/// The anchor is always present at distance 0.
class ReachabilitySet {
public:
    ReachabilitySet(NodeId anchor, std::optional<unsigned> max_depth, std::vector<int> by_index,
                    std::span<const Node> nodes)
        : anchor_(std::move(anchor)), max_depth_(max_depth), by_index_(std::move(by_index)) {
        for (std::size_t i = 0; i < by_index_.size(); ++i) {
            if (by_index_[i] >= 0) {
                distances_.emplace(nodes[i].id, static_cast<unsigned>(by_index_[i]));
            }
        }
    }

    const NodeId& anchor() const noexcept { return anchor_; }
    std::optional<unsigned> max_depth() const noexcept { return max_depth_; }
    const std::map<NodeId, unsigned>& distances() const& noexcept { return distances_; }
    std::map<NodeId, unsigned> distances() && { return std::move(distances_); }
    std::size_t size() const noexcept { return distances_.size(); }

    bool contains(const NodeId& v) const { return distances_.contains(v); }

    std::optional<unsigned> distance(const NodeId& v) const {
        auto it = distances_.find(v);
        if (it == distances_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    /// Distance by graph node index; -1 when unreachable within the limit.
    int distance_at(std::size_t index) const { return by_index_.at(index); }

    /// Reachable node indices in ascending index order (anchor included).
    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < by_index_.size(); ++i) {
            if (by_index_[i] >= 0) {
                out.push_back(i);
            }
        }
        return out;
    }

private:
    NodeId anchor_;
    std::optional<unsigned> max_depth_;
    std::vector<int> by_index_;
    std::map<NodeId, unsigned> distances_;
};

/// Breadth-first search from `anchor` along edge direction. Cycle-safe; each
/// node is settled at its first (shortest) discovery.
inline ReachabilitySet reachable_from(const KnowledgeGraph& g, const NodeId& anchor,
                                      std::optional<unsigned> max_depth = std::nullopt) {
    const std::size_t start = g.require_index(anchor);
    std::vector<int> dist(g.size(), -1);
    dist[start] = 0;
    std::deque<std::size_t> frontier{start};
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop_front();
        if (max_depth && static_cast<unsigned>(dist[u]) >= *max_depth) {
            continue;
        }
        for (std::size_t v : g.successors(u)) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                frontier.push_back(v);
            }
        }
    }
    return ReachabilitySet(anchor, max_depth, std::move(dist), g.nodes());
}

inline std::optional<unsigned> path_length(const ReachabilitySet& r, const NodeId& v) {
    return r.distance(v);
}

// --- dataset JSON ---------------------------------------------------------

inline nlohmann::json graph_to_json(const KnowledgeGraph& g) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const Node& n : g.nodes()) {
        nodes.push_back({{"id", n.id.value}, {"text", n.text}, {"embedding", n.embedding}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : g.edges()) {
        nlohmann::json rel = e.relation ? nlohmann::json(*e.relation) : nlohmann::json(nullptr);
        edges.push_back({{"src", e.src.value}, {"dst", e.dst.value}, {"relation", std::move(rel)}});
    }
    return {{"dimension", g.dimension()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) {
        throw ValidationError(where + " is not a JSON object", where);
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ValidationError(where + " is missing field '" + key + "'", where);
    }
    return *it;
}

inline std::string require_string(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto& v = require_field(obj, key, where);
    if (!v.is_string()) {
        throw ValidationError(where + " field '" + key + "' must be a string", where);
    }
    return v.get<std::string>();
}

inline nlohmann::json parse_json(std::string_view text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " + e.what(), e.byte);
    }
}

}  // namespace detail

inline KnowledgeGraph graph_from_json(const nlohmann::json& doc) {
    const auto& dim_field = detail::require_field(doc, "dimension", "document");
    if (!dim_field.is_number_integer() || dim_field.get<long long>() <= 0) {
        throw ValidationError("'dimension' must be a positive integer", "dimension");
    }
    const auto dimension = dim_field.get<std::size_t>();

    const auto& jnodes = detail::require_field(doc, "nodes", "document");
    const auto& jedges = detail::require_field(doc, "edges", "document");
    if (!jnodes.is_array() || !jedges.is_array()) {
        throw ValidationError("'nodes' and 'edges' must be arrays", jnodes.is_array() ? "edges" : "nodes");
    }

    std::vector<Node> nodes;
    nodes.reserve(jnodes.size());
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
        const std::string where = "node #" + std::to_string(i);
        Node n;
        n.id = detail::require_string(jnodes[i], "id", where);
        n.text = detail::require_string(jnodes[i], "text", where);
        const auto& emb = detail::require_field(jnodes[i], "embedding", where);
        if (!emb.is_array()) {
            throw ValidationError(where + " embedding must be an array", n.id.value);
        }
        n.embedding.reserve(emb.size());
        for (const auto& c : emb) {
            if (!c.is_number()) {
                throw ValidationError("node '" + n.id.value + "' embedding has a non-numeric component", n.id.value);
            }
            n.embedding.push_back(c.get<double>());
        }
        nodes.push_back(std::move(n));
    }

    std::vector<Edge> edges;
    edges.reserve(jedges.size());
    for (std::size_t i = 0; i < jedges.size(); ++i) {
        const std::string where = "edge #" + std::to_string(i);
        Edge e;
        e.src = detail::require_string(jedges[i], "src", where);
        e.dst = detail::require_string(jedges[i], "dst", where);
        auto rel = jedges[i].find("relation");
        if (rel != jedges[i].end() && !rel->is_null()) {
            if (!rel->is_string()) {
                throw ValidationError(where + " relation must be a string or null", where);
            }
            e.relation = rel->get<std::string>();
        }
        edges.push_back(std::move(e));
    }
    return KnowledgeGraph::build(dimension, std::move(nodes), std::move(edges));
}

inline KnowledgeGraph load_graph(std::string_view source) {
    return graph_from_json(detail::parse_json(source));
}

inline KnowledgeGraph load_graph(std::istream& in) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return load_graph(text);
}

}  // namespace pcr
