#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pcr/dataset.hpp"
#include "pcr/embedding.hpp"
#include "pcr/error.hpp"
#include "pcr/graph.hpp"

namespace pcr {

inline constexpr const char* kGeneratorVersion = "pcr-gen/1";
inline constexpr std::uint64_t kReferenceSeed = 42;

/// Vocabulary for one synthetic domain. Nodes are the cross product of
/// `subjects` (one cluster each) and `aspects`.
struct DomainVocabulary {
    std::string name;
    std::string id_prefix;
    std::array<std::string, 5> subjects;
    std::array<std::string, 6> aspects;
    std::vector<std::string> fillers;
    std::vector<std::string> relations;
};

inline const std::vector<DomainVocabulary>& builtin_domains() {
    static const std::vector<DomainVocabulary> domains = {
        {"tech", "t",
         {"payment gateway", "search engine", "auth service", "data pipeline", "mobile client"},
         {"caching layer", "request logging", "database schema", "deployment pipeline", "latency monitoring",
          "access control"},
         {"scalable", "distributed", "cluster", "throughput", "configuration", "replica", "container", "cloud",
          "api", "version", "queue", "storage"},
         {"depends_on", "calls", "extends", "configures"}},
        {"legal", "l",
         {"contract law", "privacy regulation", "employment statute", "tax code", "intellectual property"},
         {"liability clause", "compliance audit", "court precedent", "penalty provision", "disclosure requirement",
          "jurisdiction rule"},
         {"statutory", "binding", "appeal", "tribunal", "amendment", "obligation", "remedy", "enforcement", "party",
          "exemption", "filing", "notice"},
         {"cites", "amends", "governs", "overrides"}},
        {"bio", "b",
         {"cell membrane", "immune response", "gene expression", "protein folding", "neural signaling"},
         {"enzyme activity", "receptor binding", "metabolic pathway", "mutation effect", "transport mechanism",
          "regulatory feedback"},
         {"molecular", "cellular", "tissue", "organism", "ligand", "kinase", "substrate", "gradient", "sequence",
          "structure", "signal", "energy"},
         {"regulates", "activates", "inhibits", "binds"}},
        {"microservices", "ms",
         {"order service", "inventory service", "billing service", "notification service", "user service"},
         {"message broker", "circuit breaker", "service discovery", "health check", "rate limiter",
          "schema migration"},
         {"endpoint", "retry", "timeout", "kubernetes", "sidecar", "event", "contract", "gateway", "resilience",
          "scaling", "tracing", "payload"},
         {"publishes_to", "calls", "subscribes", "owns"}},
        {"citations", "c",
         {"transformer models", "graph theory", "reinforcement learning", "information retrieval",
          "computer vision"},
         {"survey paper", "benchmark dataset", "evaluation protocol", "theoretical analysis", "empirical study",
          "open source implementation"},
         {"baseline", "ablation", "citation", "venue", "reproducibility", "metric", "corpus", "experiment",
          "proof", "workshop", "journal", "preprint"},
         {"cites", "extends", "refutes", "builds_on"}},
        {"medical", "md",
         {"cardiology", "oncology", "neurology", "endocrinology", "pulmonology"},
         {"diagnostic imaging", "treatment protocol", "risk factor", "clinical trial", "drug interaction",
          "patient outcome"},
         {"chronic", "acute", "dosage", "symptom", "therapy", "screening", "biomarker", "prognosis", "cohort",
          "guideline", "referral", "monitoring"},
         {"indicates", "treats", "contraindicates", "precedes"}},
    };
    return domains;
}

struct GeneratorConfig {
    std::uint64_t seed = kReferenceSeed;
    /// Queries for the tech domain and for each other domain. Defaults give
    /// 20 + 5 * 2 = 30 queries.
    std::size_t tech_queries = 20;
    std::size_t other_queries = 2;
    std::size_t nodes_per_domain = 30;
    std::size_t edges_per_domain = 60;

    static GeneratorConfig uniform(std::uint64_t seed, std::size_t per_domain) {
        GeneratorConfig c;
        c.seed = seed;
        c.tech_queries = per_domain;
        c.other_queries = per_domain;
        return c;
    }
};

namespace detail {

/// Unbiased draw in [0, n) straight from the engine's output, so datasets are
/// identical across standard libraries.
inline std::size_t draw(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::mt19937_64::max() - (std::mt19937_64::max() % range + 1) % range;
    std::uint64_t x;
    do {
        x = rng();
    } while (x > limit);
    return static_cast<std::size_t>(x % range);
}

inline bool chance(std::mt19937_64& rng, unsigned percent) { return draw(rng, 100) < percent; }

template <typename T>
void shuffle(std::mt19937_64& rng, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[draw(rng, i)]);
    }
}

struct ClusterLayout {
    std::vector<std::size_t> order;  // order[0] is the cluster root
    std::vector<std::size_t> parent;
};

}  // namespace detail

/// Wires `edges_per_domain` directed edges over 5 clusters of 6 nodes.
/// Each cluster is a shallow rooted hierarchy with extra forward edges
/// and at most one back edge, so cycles occur. Cross-cluster edges run from a
/// non-sink of cluster c into a sink of cluster c + 1 (mod 5): they widen the
/// reachable set by single nodes and never chain clusters together, which
/// leaves most of the graph unreachable from any anchor.
inline std::vector<std::pair<std::size_t, std::size_t>> generate_edges(std::mt19937_64& rng,
                                                                       std::size_t clusters,
                                                                       std::size_t cluster_size,
                                                                       std::size_t edge_count,
                                                                       std::vector<detail::ClusterLayout>& layout) {
    std::set<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::pair<std::size_t, std::size_t>> ordered;
    auto add = [&](std::size_t a, std::size_t b) {
        if (a != b && edges.emplace(a, b).second) {
            ordered.emplace_back(a, b);
            return true;
        }
        return false;
    };

    const std::size_t cross_budget = edge_count / 6;
    const std::size_t intra_budget = (edge_count - cross_budget) / clusters;
    layout.assign(clusters, {});

    for (std::size_t c = 0; c < clusters; ++c) {
        std::vector<std::size_t> order(cluster_size);
        for (std::size_t i = 0; i < cluster_size; ++i) {
            order[i] = c * cluster_size + i;
        }
        detail::shuffle(rng, order);
        std::vector<std::size_t> parent(cluster_size, 0);
        const std::size_t before = ordered.size();
        for (std::size_t i = 1; i < cluster_size; ++i) {
            // Two children of the root, deeper levels hang off earlier nodes.
            const std::size_t p = i <= 2 ? 0 : 1 + detail::draw(rng, std::min<std::size_t>(i - 1, 4));
            parent[i] = p;
            add(order[p], order[i]);
        }
        if (detail::chance(rng, 60)) {
            const std::size_t from = 3 + detail::draw(rng, cluster_size - 4);
            const std::size_t to = 1 + detail::draw(rng, 2);
            add(order[from], order[to]);
        }
        std::size_t guard = 0;
        while (ordered.size() - before < intra_budget && guard++ < 1000) {
            const std::size_t i = detail::draw(rng, cluster_size - 1);
            const std::size_t j = i + 1 + detail::draw(rng, cluster_size - 1 - i);
            add(order[i], order[j]);
        }
        layout[c] = {std::move(order), std::move(parent)};
    }

    std::vector<std::size_t> out_degree(clusters * cluster_size, 0);
    for (const auto& [a, _] : ordered) {
        ++out_degree[a];
    }
    std::size_t guard = 0;
    std::size_t c = 0;
    while (ordered.size() < edge_count && guard++ < 100000) {
        const std::size_t next = (c + 1) % clusters;
        std::vector<std::size_t> sources;
        std::vector<std::size_t> sinks;
        for (std::size_t i = 0; i < cluster_size; ++i) {
            const std::size_t a = c * cluster_size + i;
            const std::size_t b = next * cluster_size + i;
            if (out_degree[a] > 0) sources.push_back(a);
            if (out_degree[b] == 0) sinks.push_back(b);
        }
        if (!sources.empty() && !sinks.empty()) {
            const std::size_t a = sources[detail::draw(rng, sources.size())];
            const std::size_t b = sinks[detail::draw(rng, sinks.size())];
            if (add(a, b)) {
                ++out_degree[a];
            }
        }
        c = (c + 1) % clusters;
    }
    if (ordered.size() != edge_count) {
        throw Error("edge generator could not place " + std::to_string(edge_count) + " edges");
    }
    return ordered;
}

namespace detail {

inline QuerySpec make_query(std::mt19937_64& rng, const DomainVocabulary& vocab, const KnowledgeGraph& g,
                            const std::vector<ClusterLayout>& layout, std::size_t cluster_size,
                            std::string id) {
    const std::size_t aspect_count = vocab.aspects.size();
    for (int attempt = 0; attempt < 100; ++attempt) {
        const std::size_t c = draw(rng, layout.size());
        const std::size_t a = draw(rng, aspect_count);
        // Anchor at the cluster root most of the time, otherwise one level down.
        const std::size_t slot = chance(rng, 70) ? 0 : 1 + draw(rng, 2);
        const std::size_t anchor = layout[c].order[slot];
        const std::size_t target = c * cluster_size + a;

        const auto reach = reachable_from(g, g.node(anchor).id);
        std::vector<std::size_t> near;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const int d = reach.distance_at(i);
            if (i != anchor && d >= 1 && d <= 3) {
                near.push_back(i);
            }
        }
        if (near.empty()) {
            continue;
        }

        std::set<NodeId> relevant;
        if (target != anchor && reach.distance_at(target) >= 1 && reach.distance_at(target) <= 3) {
            relevant.insert(g.node(target).id);
        }
        const std::size_t extra = 1 + draw(rng, 2);
        for (std::size_t e = 0; e < extra; ++e) {
            relevant.insert(g.node(near[draw(rng, near.size())]).id);
        }
        if (chance(rng, 35)) {
            std::vector<std::size_t> outside;
            for (std::size_t other = 0; other < layout.size(); ++other) {
                const std::size_t v = other * cluster_size + a;
                if (reach.distance_at(v) < 0) {
                    outside.push_back(v);
                }
            }
            if (!outside.empty()) {
                relevant.insert(g.node(outside[draw(rng, outside.size())]).id);
            }
        }

        QuerySpec q;
        q.id = std::move(id);
        q.text = "how is the " + vocab.aspects[a] + " handled for " + vocab.subjects[c];
        q.anchor = g.node(anchor).id;
        q.relevant = std::move(relevant);
        return q;
    }
    throw Error("query generator found no anchor with a reachable neighbourhood");
}

}  // namespace detail

/// Builds one domain graph plus its queries. Embeddings come from `provider`
/// and are also recorded in `cache` when given.
inline Domain generate_domain(const DomainVocabulary& vocab, const GeneratorConfig& cfg, std::size_t query_count,
                              EmbeddingProvider& provider, EmbeddingCache* cache = nullptr) {
    const std::size_t clusters = vocab.subjects.size();
    const std::size_t cluster_size = vocab.aspects.size();
    if (clusters * cluster_size != cfg.nodes_per_domain) {
        throw ConfigError("vocabulary for '" + vocab.name + "' does not yield " +
                          std::to_string(cfg.nodes_per_domain) + " nodes");
    }
    std::mt19937_64 rng(cfg.seed ^ stable_hash(vocab.name));

    auto embed = [&](const std::string& text) {
        EmbeddingVector v = embed_text(provider, text);
        if (cache != nullptr) {
            cache->insert(text, v);
        }
        return v;
    };

    std::vector<Node> nodes;
    nodes.reserve(cfg.nodes_per_domain);
    for (std::size_t c = 0; c < clusters; ++c) {
        for (std::size_t a = 0; a < cluster_size; ++a) {
            std::string text = vocab.subjects[c] + " " + vocab.aspects[a] + ": notes on";
            for (int f = 0; f < 3; ++f) {
                text += " " + vocab.fillers[detail::draw(rng, vocab.fillers.size())];
            }
            Node n;
            n.id = vocab.id_prefix + std::to_string(c * cluster_size + a);
            n.text = std::move(text);
            n.embedding = embed(n.text);
            nodes.push_back(std::move(n));
        }
    }

    std::vector<detail::ClusterLayout> layout;
    const auto pairs = generate_edges(rng, clusters, cluster_size, cfg.edges_per_domain, layout);
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        std::optional<std::string> rel;
        if (!detail::chance(rng, 10)) {
            rel = vocab.relations[detail::draw(rng, vocab.relations.size())];
        }
        edges.push_back({nodes[a].id, nodes[b].id, std::move(rel)});
    }

    Domain d{vocab.name, KnowledgeGraph::build(provider.dimension(), std::move(nodes), std::move(edges)), {}};
    for (std::size_t i = 0; i < query_count; ++i) {
        char id[64];
        std::snprintf(id, sizeof id, "%s-q%02zu", vocab.name.c_str(), i);
        QuerySpec q = detail::make_query(rng, vocab, d.graph, layout, cluster_size, id);
        q.embedding = embed(q.text);
        d.queries.push_back(std::move(q));
    }
    validate_queries(d);
    return d;
}

/// Deterministic six-domain benchmark: 30 nodes / 60 edges per domain.
inline BenchmarkDataset generate_dataset(const GeneratorConfig& cfg, EmbeddingProvider& provider,
                                         EmbeddingCache* cache = nullptr) {
    BenchmarkDataset ds;
    ds.manifest.seed = cfg.seed;
    ds.manifest.generator_version = kGeneratorVersion;
    ds.manifest.embedding_provider = provider.id();
    ds.manifest.dimension = provider.dimension();
    for (const auto& vocab : builtin_domains()) {
        const std::size_t count = vocab.name == "tech" ? cfg.tech_queries : cfg.other_queries;
        ds.domains.push_back(generate_domain(vocab, cfg, count, provider, cache));
        ds.manifest.domains.push_back(vocab.name);
    }
    return ds;
}

inline BenchmarkDataset generate_dataset(std::uint64_t seed, std::size_t queries_per_domain,
                                         EmbeddingProvider& provider, EmbeddingCache* cache = nullptr) {
    return generate_dataset(GeneratorConfig::uniform(seed, queries_per_domain), provider, cache);
}

}  // namespace pcr
