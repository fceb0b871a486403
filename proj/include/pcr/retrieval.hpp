#pragma once

#include <algorithm>
#include <chrono>
#include <numeric>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pcr/embedding.hpp"
#include "pcr/error.hpp"
#include "pcr/graph.hpp"
#include "pcr/lexical.hpp"

namespace pcr {

struct RetrievalMethod {
    enum class Kind { vector, bm25, hybrid, pcr };
    enum class PcrScoring { vector, hybrid };
    enum class Fallback { none, global };

    Kind kind = Kind::vector;
    double alpha = 0.7;
    std::optional<unsigned> max_depth;
    PcrScoring pcr_scoring = PcrScoring::vector;
    Fallback fallback = Fallback::none;

    static RetrievalMethod vector() { return {}; }

    static RetrievalMethod bm25() {
        RetrievalMethod m;
        m.kind = Kind::bm25;
        return m;
    }

    static RetrievalMethod hybrid(double alpha = 0.7) {
        RetrievalMethod m;
        m.kind = Kind::hybrid;
        m.alpha = alpha;
        return m;
    }

    static RetrievalMethod pcr(std::optional<unsigned> max_depth = std::nullopt,
                               PcrScoring scoring = PcrScoring::vector, Fallback fallback = Fallback::none,
                               double alpha = 0.7) {
        RetrievalMethod m;
        m.kind = Kind::pcr;
        m.alpha = alpha;
        m.max_depth = max_depth;
        m.pcr_scoring = scoring;
        m.fallback = fallback;
        return m;
    }

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            throw ConfigError("alpha must lie in [0, 1]");
        }
        if (max_depth && *max_depth < 1) {
            throw ConfigError("max_depth must be at least 1 when set");
        }
    }

    bool uses_hybrid_scoring() const {
        return kind == Kind::hybrid || (kind == Kind::pcr && pcr_scoring == PcrScoring::hybrid);
    }

    /// Short display name, e.g. "pcr", "hybrid", "pcr[depth=3,hybrid]".
    std::string label() const {
        std::string base;
        std::vector<std::string> tags;
        switch (kind) {
            case Kind::vector: base = "vector"; break;
            case Kind::bm25: base = "bm25"; break;
            case Kind::hybrid: base = "hybrid"; break;
            case Kind::pcr:
                base = "pcr";
                if (max_depth) {
                    tags.push_back("depth=" + std::to_string(*max_depth));
                }
                if (pcr_scoring == PcrScoring::hybrid) {
                    tags.push_back("hybrid");
                }
                if (fallback == Fallback::global) {
                    tags.push_back("fallback");
                }
                break;
        }
        if (uses_hybrid_scoring() && alpha != 0.7) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "a=%g", alpha);
            tags.emplace_back(buf);
        }
        if (tags.empty()) {
            return base;
        }
        std::string out = base + "[";
        for (std::size_t i = 0; i < tags.size(); ++i) {
            out += (i ? "," : "") + tags[i];
        }
        return out + "]";
    }

    friend bool operator==(const RetrievalMethod&, const RetrievalMethod&) = default;
};

inline std::string to_string(RetrievalMethod::Kind k) {
    switch (k) {
        case RetrievalMethod::Kind::vector: return "vector";
        case RetrievalMethod::Kind::bm25: return "bm25";
        case RetrievalMethod::Kind::hybrid: return "hybrid";
        case RetrievalMethod::Kind::pcr: return "pcr";
    }
    return "unknown";
}

inline RetrievalMethod::Kind parse_method_kind(std::string_view s) {
    if (s == "vector") return RetrievalMethod::Kind::vector;
    if (s == "bm25") return RetrievalMethod::Kind::bm25;
    if (s == "hybrid") return RetrievalMethod::Kind::hybrid;
    if (s == "pcr") return RetrievalMethod::Kind::pcr;
    throw ConfigError("unknown retrieval method '" + std::string(s) + "'");
}

inline nlohmann::json to_json(const RetrievalMethod& m) {
    nlohmann::json j = {{"label", m.label()}, {"kind", to_string(m.kind)}};
    if (m.uses_hybrid_scoring()) {
        j["alpha"] = m.alpha;
    }
    if (m.kind == RetrievalMethod::Kind::pcr) {
        j["max_depth"] = m.max_depth ? nlohmann::json(*m.max_depth) : nlohmann::json(nullptr);
        j["pcr_scoring"] = m.pcr_scoring == RetrievalMethod::PcrScoring::hybrid ? "hybrid" : "vector";
        j["fallback"] = m.fallback == RetrievalMethod::Fallback::global ? "global" : "none";
    }
    return j;
}

struct ScoredNode {
    NodeId node;
    double score = 0.0;
    bool reachable = false;
    std::optional<unsigned> path_len;

    friend bool operator==(const ScoredNode&, const ScoredNode&) = default;
};

struct RetrievalResult {
    std::string query_id;
    RetrievalMethod method;
    std::vector<ScoredNode> ranked;
    double latency_ms = 0.0;
    bool fallback_used = false;
};

using CandidateIds = std::optional<std::span<const NodeId>>;

namespace detail {

inline void require_k(std::size_t k) {
    if (k == 0) {
        throw ConfigError("k must be at least 1");
    }
}

/// Sorted, de-duplicated node indices for a candidate id list (all of
/// [0, size) when absent).
template <typename Resolve>
std::vector<std::size_t> resolve_candidates(std::size_t size, CandidateIds candidates, Resolve&& resolve) {
    std::vector<std::size_t> out;
    if (!candidates) {
        out.resize(size);
        std::iota(out.begin(), out.end(), std::size_t{0});
        return out;
    }
    out.reserve(candidates->size());
    for (const NodeId& id : *candidates) {
        out.push_back(resolve(id));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Top-k of (candidate, score) pairs: score descending, NodeId ascending on ties.
template <typename IdOf>
std::vector<ScoredNode> top_k(std::span<const std::size_t> candidates, std::span<const double> scores,
                              std::size_t k, IdOf&& id_of) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t take = std::min(k, order.size());
    auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return id_of(candidates[a]) < id_of(candidates[b]);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), better);
    std::vector<ScoredNode> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        ScoredNode node;
        node.node = id_of(candidates[order[i]]);
        node.score = scores[order[i]];
        out.push_back(std::move(node));
    }
    return out;
}

inline std::vector<double> vector_scores(const KnowledgeGraph& g, std::span<const double> q,
                                         std::span<const std::size_t> candidates) {
    if (q.size() != g.dimension()) {
        throw DimensionError(g.dimension(), q.size());
    }
    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (std::size_t i : candidates) {
        scores.push_back(cosine_similarity(q, g.node(i).embedding));
    }
    return scores;
}

inline std::vector<double> bm25_scores(const LexicalIndex& idx, std::string_view query_text,
                                       std::span<const std::size_t> candidates) {
    const auto terms = tokenize(query_text);
    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (std::size_t i : candidates) {
        scores.push_back(idx.score(terms, i));
    }
    return scores;
}

/// alpha * (cos + 1) / 2 + (1 - alpha) * minmax(bm25), where the min-max runs
/// over the candidate set and collapses to 0 when every BM25 score is equal.
inline std::vector<double> hybrid_scores(const KnowledgeGraph& g, const LexicalIndex& idx,
                                         std::string_view query_text, std::span<const double> q, double alpha,
                                         std::span<const std::size_t> candidates) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("alpha must lie in [0, 1]");
    }
    const auto vec = vector_scores(g, q, candidates);
    const auto lex = bm25_scores(idx, query_text, candidates);
    double lo = 0.0;
    double hi = 0.0;
    if (!lex.empty()) {
        const auto [mn, mx] = std::minmax_element(lex.begin(), lex.end());
        lo = *mn;
        hi = *mx;
    }
    std::vector<double> out(candidates.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = (vec[i] + 1.0) / 2.0;
        const double b = hi > lo ? (lex[i] - lo) / (hi - lo) : 0.0;
        out[i] = alpha * v + (1.0 - alpha) * b;
    }
    return out;
}

inline void require_same_corpus(const KnowledgeGraph& g, const LexicalIndex& idx) {
    if (idx.doc_count() != g.size()) {
        throw ConfigError("lexical index was not built over this graph");
    }
}

inline void annotate(std::vector<ScoredNode>& ranked, const ReachabilitySet& reach) {
    for (ScoredNode& s : ranked) {
        s.path_len = reach.distance(s.node);
        s.reachable = s.path_len.has_value();
    }
}

}  // namespace detail

/// Exact cosine scan over `candidates` (all nodes when absent).
inline std::vector<ScoredNode> vector_search(const KnowledgeGraph& g, std::span<const double> q_embedding,
                                             std::size_t k, CandidateIds candidates = std::nullopt) {
    detail::require_k(k);
    const auto cand = detail::resolve_candidates(g.size(), candidates,
                                                 [&](const NodeId& id) { return g.require_index(id); });
    const auto scores = detail::vector_scores(g, q_embedding, cand);
    return detail::top_k(cand, scores, k, [&](std::size_t i) -> const NodeId& { return g.node(i).id; });
}

inline std::vector<ScoredNode> bm25_search(const LexicalIndex& idx, std::string_view query_text, std::size_t k,
                                           CandidateIds candidates = std::nullopt) {
    detail::require_k(k);
    const auto cand = detail::resolve_candidates(idx.doc_count(), candidates,
                                                 [&](const NodeId& id) { return idx.require(id); });
    const auto scores = detail::bm25_scores(idx, query_text, cand);
    return detail::top_k(cand, scores, k, [&](std::size_t i) -> const NodeId& { return idx.doc_id(i); });
}

inline std::vector<ScoredNode> hybrid_search(const KnowledgeGraph& g, const LexicalIndex& idx,
                                             std::string_view query_text, std::span<const double> q_embedding,
                                             std::size_t k, double alpha, CandidateIds candidates = std::nullopt) {
    detail::require_k(k);
    detail::require_same_corpus(g, idx);
    const auto cand = detail::resolve_candidates(g.size(), candidates,
                                                 [&](const NodeId& id) { return g.require_index(id); });
    const auto scores = detail::hybrid_scores(g, idx, query_text, q_embedding, alpha, cand);
    return detail::top_k(cand, scores, k, [&](std::size_t i) -> const NodeId& { return g.node(i).id; });
}

/// Path-constrained search: BFS from the anchor (bounded by
/// `method.max_depth`), then vector or hybrid ranking restricted to the
/// reachable set. When nothing is left after excluding the anchor, either
/// return an empty list or, with `Fallback::global`, rank the whole graph
/// and flag `fallback_used`.
inline RetrievalResult pcr_search(const KnowledgeGraph& g, const LexicalIndex& idx, const NodeId& anchor,
                                  std::string_view query_text, std::span<const double> q_embedding, std::size_t k,
                                  const RetrievalMethod& method, bool exclude_anchor = true) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    if (method.kind != RetrievalMethod::Kind::pcr) {
        throw ConfigError("pcr_search called with a non-pcr method");
    }
    method.validate();
    detail::require_k(k);
    detail::require_same_corpus(g, idx);
    const std::size_t anchor_index = g.require_index(anchor);

    RetrievalResult out;
    out.method = method;

    auto reach = reachable_from(g, anchor, method.max_depth);
    std::vector<std::size_t> cand = reach.indices();
    if (exclude_anchor) {
        std::erase(cand, anchor_index);
    }

    if (cand.empty()) {
        if (method.fallback == RetrievalMethod::Fallback::none) {
            out.latency_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
            return out;
        }
        out.fallback_used = true;
        cand.resize(g.size());
        std::iota(cand.begin(), cand.end(), std::size_t{0});
        if (exclude_anchor) {
            std::erase(cand, anchor_index);
        }
        reach = reachable_from(g, anchor);
    }

    const auto scores = method.pcr_scoring == RetrievalMethod::PcrScoring::hybrid
                            ? detail::hybrid_scores(g, idx, query_text, q_embedding, method.alpha, cand)
                            : detail::vector_scores(g, q_embedding, cand);
    out.ranked = detail::top_k(cand, scores, k, [&](std::size_t i) -> const NodeId& { return g.node(i).id; });
    detail::annotate(out.ranked, reach);
    out.latency_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return out;
}

/// One query as seen by the retrieval layer.
struct Query {
    std::string id;
    std::string text;
    NodeId anchor;
    EmbeddingVector embedding;
};

struct SearchOptions {
    std::size_t k = 10;
    bool exclude_anchor = true;
};

/// Runs any method for one query. Baseline results are annotated against the
/// anchor's unlimited reachability set after the timed section, so every
/// method carries the same reachable / path_len fields.
inline RetrievalResult retrieve(const KnowledgeGraph& g, const LexicalIndex& idx, const Query& query,
                                const RetrievalMethod& method, const SearchOptions& opts = {}) {
    method.validate();
    if (method.kind == RetrievalMethod::Kind::pcr) {
        auto r = pcr_search(g, idx, query.anchor, query.text, query.embedding, opts.k, method, opts.exclude_anchor);
        r.query_id = query.id;
        return r;
    }

    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    detail::require_k(opts.k);
    detail::require_same_corpus(g, idx);
    const std::size_t anchor_index = g.require_index(query.anchor);

    std::vector<NodeId> ids;
    ids.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(opts.exclude_anchor && i == anchor_index)) {
            ids.push_back(g.node(i).id);
        }
    }
    const CandidateIds cand{std::span<const NodeId>(ids)};

    RetrievalResult out;
    out.query_id = query.id;
    out.method = method;
    switch (method.kind) {
        case RetrievalMethod::Kind::vector: out.ranked = vector_search(g, query.embedding, opts.k, cand); break;
        case RetrievalMethod::Kind::bm25: out.ranked = bm25_search(idx, query.text, opts.k, cand); break;
        case RetrievalMethod::Kind::hybrid:
            out.ranked = hybrid_search(g, idx, query.text, query.embedding, opts.k, method.alpha, cand);
            break;
        case RetrievalMethod::Kind::pcr: break;
    }
    out.latency_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    detail::annotate(out.ranked, reachable_from(g, query.anchor));
    return out;
}

}  // namespace pcr
