#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcr/dataset.hpp"
#include "pcr/embedding.hpp"
#include "pcr/error.hpp"
#include "pcr/graph.hpp"
#include "pcr/lexical.hpp"
#include "pcr/metrics.hpp"
#include "pcr/retrieval.hpp"
#include "pcr/stats.hpp"
#include "pcr/table.hpp"

namespace pcr {

/// Depth limit of one ablation step; nullopt means unlimited.
using DepthLimit = std::optional<unsigned>;

struct RunConfig {
    std::vector<RetrievalMethod> methods = default_methods();
    std::size_t k = 10;
    std::vector<DepthLimit> depth_sweep{std::nullopt, 5u, 3u, 2u, 1u};
    std::size_t repeats = 100;
    std::size_t warmup = 5;
    std::uint64_t seed = 42;
    bool exclude_anchor = true;
    Bm25Params bm25;
    MetricsConfig metrics;

    /// PCR (vector scoring, unlimited depth, no fallback) and the three baselines.
    static std::vector<RetrievalMethod> default_methods() {
        return {RetrievalMethod::pcr(), RetrievalMethod::vector(), RetrievalMethod::bm25(),
                RetrievalMethod::hybrid(0.7)};
    }

    void validate() const {
        if (k == 0) {
            throw ConfigError("k must be at least 1");
        }
        if (repeats == 0) {
            throw ConfigError("repeats must be at least 1");
        }
        std::vector<std::string> labels;
        for (const auto& m : methods) {
            m.validate();
            labels.push_back(m.label());
        }
        std::sort(labels.begin(), labels.end());
        if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
            throw ConfigError("retrieval methods must be distinct");
        }
    }

    MetricsConfig metrics_for_run() const {
        MetricsConfig m = metrics;
        if (std::find(m.ks.begin(), m.ks.end(), static_cast<unsigned>(k)) == m.ks.end()) {
            m.ks.push_back(static_cast<unsigned>(k));
        }
        return m;
    }
};

/// A domain with its index, query embeddings and unlimited anchor
/// reachability sets computed once.
struct PreparedDomain {
    const Domain* domain;
    LexicalIndex index;
    std::vector<Query> queries;
    std::vector<GroundTruth> truths;
    std::vector<ReachabilitySet> reach;
};

inline PreparedDomain prepare_domain(const Domain& d, const Bm25Params& bm25, EmbeddingProvider* provider) {
    std::vector<const QuerySpec*> specs;
    for (const auto& q : d.queries) {
        specs.push_back(&q);
    }
    std::sort(specs.begin(), specs.end(), [](const QuerySpec* a, const QuerySpec* b) { return a->id < b->id; });

    PreparedDomain p{&d, LexicalIndex::build(d.graph, bm25), {}, {}, {}};
    for (const QuerySpec* q : specs) {
        Query query = to_query(*q);
        if (query.embedding.empty()) {
            if (provider == nullptr) {
                throw ConfigError("query '" + q->id + "' has no cached embedding and no provider was given");
            }
            query.embedding = embed_text(*provider, q->text);
        }
        if (query.embedding.size() != d.graph.dimension()) {
            throw DimensionError(d.graph.dimension(), query.embedding.size());
        }
        p.reach.push_back(reachable_from(d.graph, q->anchor));
        p.truths.push_back(to_ground_truth(*q));
        p.queries.push_back(std::move(query));
    }
    return p;
}

struct QueryOutcome {
    std::string domain;
    std::string query_id;
    std::string method;
    MetricsReport metrics;
    RetrievalResult result;
};

struct MethodSummary {
    RetrievalMethod method;
    AggregateReport metrics;
    std::size_t fallback_count = 0;
    double mean_latency_ms = 0.0;
};

struct DomainSummary {
    std::string domain;
    std::vector<MethodSummary> methods;
};

struct BenchmarkReport {
    std::size_t k = 10;
    std::vector<MethodSummary> overall;
    std::vector<DomainSummary> per_domain;
    std::vector<PairedComparison> comparisons;
    std::vector<QueryOutcome> outcomes;
};

namespace detail {

inline MethodSummary summarize(const RetrievalMethod& m, const std::vector<const QueryOutcome*>& rows) {
    std::vector<MetricsReport> reports;
    MethodSummary s{m, {}, 0, 0.0};
    for (const auto* o : rows) {
        reports.push_back(o->metrics);
        s.fallback_count += o->result.fallback_used ? 1 : 0;
        s.mean_latency_ms += o->result.latency_ms;
    }
    s.metrics = aggregate(reports);
    s.mean_latency_ms /= static_cast<double>(rows.size());
    return s;
}

}  // namespace detail

/// Runs every (method, query) pair of the dataset and aggregates overall and
/// per domain. Relevance@k of every PCR method is compared against every
/// non-PCR method with a paired t-test over all queries. Output order is
/// fixed: dataset domain order, query ids ascending, methods as configured.
inline BenchmarkReport run_benchmark(const BenchmarkDataset& ds, const RunConfig& cfg,
                                     EmbeddingProvider* provider = nullptr) {
    if (cfg.methods.empty()) {
        throw ConfigError("no retrieval methods configured");
    }
    cfg.validate();
    const MetricsConfig mcfg = cfg.metrics_for_run();
    const SearchOptions opts{cfg.k, cfg.exclude_anchor};

    BenchmarkReport rep;
    rep.k = cfg.k;
    for (const auto& d : ds.domains) {
        const PreparedDomain p = prepare_domain(d, cfg.bm25, provider);
        for (std::size_t qi = 0; qi < p.queries.size(); ++qi) {
            for (const auto& m : cfg.methods) {
                RetrievalResult r = retrieve(d.graph, p.index, p.queries[qi], m, opts);
                MetricsReport mr = evaluate(r, p.truths[qi], p.reach[qi], mcfg);
                rep.outcomes.push_back({d.name, p.queries[qi].id, m.label(), std::move(mr), std::move(r)});
            }
        }
    }
    if (rep.outcomes.empty()) {
        throw EmptyInputError("dataset contains no queries");
    }

    for (const auto& m : cfg.methods) {
        const std::string label = m.label();
        std::vector<const QueryOutcome*> all;
        for (const auto& o : rep.outcomes) {
            if (o.method == label) all.push_back(&o);
        }
        rep.overall.push_back(detail::summarize(m, all));
    }
    for (const auto& d : ds.domains) {
        DomainSummary ds_sum{d.name, {}};
        for (const auto& m : cfg.methods) {
            const std::string label = m.label();
            std::vector<const QueryOutcome*> rows;
            for (const auto& o : rep.outcomes) {
                if (o.method == label && o.domain == d.name) rows.push_back(&o);
            }
            if (!rows.empty()) {
                ds_sum.methods.push_back(detail::summarize(m, rows));
            }
        }
        if (!ds_sum.methods.empty()) {
            rep.per_domain.push_back(std::move(ds_sum));
        }
    }

    const auto k = static_cast<unsigned>(cfg.k);
    auto column = [&](const std::string& label) {
        std::vector<double> xs;
        for (const auto& o : rep.outcomes) {
            if (o.method == label) xs.push_back(o.metrics.relevance_at.at(k));
        }
        return xs;
    };
    for (const auto& a : cfg.methods) {
        if (a.kind != RetrievalMethod::Kind::pcr) continue;
        for (const auto& b : cfg.methods) {
            if (b.kind == RetrievalMethod::Kind::pcr) continue;
            const auto xa = column(a.label());
            const auto xb = column(b.label());
            if (xa.size() >= 2) {
                rep.comparisons.push_back(
                    compare_paired(a.label(), b.label(), "relevance@" + std::to_string(k), xa, xb));
            }
        }
    }
    return rep;
}

// --- ablations -----------------------------------------------------------

struct DepthAblationRow {
    DepthLimit depth;
    AggregateReport metrics;
    /// Reachable non-anchor nodes per query at this depth, in query order.
    std::vector<std::size_t> candidate_counts;
};

inline std::string depth_label(DepthLimit d) { return d ? "Depth " + std::to_string(*d) : "Unlimited"; }

/// One PCR run per depth over the selected domains (all when `domains` is
/// empty).
inline std::vector<DepthAblationRow> run_depth_ablation(const BenchmarkDataset& ds, const std::vector<DepthLimit>& depths,
                                                        std::size_t k, const std::vector<std::string>& domains = {},
                                                        const MetricsConfig& metrics = {},
                                                        EmbeddingProvider* provider = nullptr,
                                                        bool exclude_anchor = true) {
    if (depths.empty()) {
        throw ConfigError("depth ablation needs at least one depth");
    }
    RunConfig cfg;
    cfg.k = k;
    cfg.metrics = metrics;
    cfg.exclude_anchor = exclude_anchor;
    const MetricsConfig mcfg = cfg.metrics_for_run();

    std::vector<PreparedDomain> prepared;
    for (const auto& d : ds.domains) {
        if (domains.empty() || std::find(domains.begin(), domains.end(), d.name) != domains.end()) {
            prepared.push_back(prepare_domain(d, cfg.bm25, provider));
        }
    }
    if (prepared.empty()) {
        throw NotFoundError("no matching domains for the depth ablation");
    }

    std::vector<DepthAblationRow> rows;
    for (const DepthLimit& depth : depths) {
        const auto method = RetrievalMethod::pcr(depth);
        method.validate();
        DepthAblationRow row{depth, {}, {}};
        std::vector<MetricsReport> reports;
        for (const auto& p : prepared) {
            for (std::size_t qi = 0; qi < p.queries.size(); ++qi) {
                const auto& q = p.queries[qi];
                const auto limited = reachable_from(p.domain->graph, q.anchor, depth);
                row.candidate_counts.push_back(limited.size() - (exclude_anchor ? 1 : 0));
                const auto r = retrieve(p.domain->graph, p.index, q, method, {k, exclude_anchor});
                reports.push_back(evaluate(r, p.truths[qi], p.reach[qi], mcfg));
            }
        }
        if (reports.empty()) {
            throw EmptyInputError("no queries in the selected domains");
        }
        row.metrics = aggregate(reports);
        rows.push_back(std::move(row));
    }
    return rows;
}

struct HybridAblationRow {
    std::string configuration;
    RetrievalMethod method;
    AggregateReport metrics;
};

/// Vector-scored PCR against hybrid-scored PCR over identical queries.
inline std::vector<HybridAblationRow> run_hybrid_ablation(const BenchmarkDataset& ds, std::size_t k,
                                                          double alpha = 0.7,
                                                          const std::vector<std::string>& domains = {"tech"},
                                                          const MetricsConfig& metrics = {},
                                                          EmbeddingProvider* provider = nullptr) {
    RunConfig cfg;
    cfg.k = k;
    cfg.metrics = metrics;
    cfg.methods = {RetrievalMethod::pcr(),
                   RetrievalMethod::pcr(std::nullopt, RetrievalMethod::PcrScoring::hybrid,
                                        RetrievalMethod::Fallback::none, alpha)};
    BenchmarkDataset subset;
    subset.manifest = ds.manifest;
    for (const auto& d : ds.domains) {
        if (domains.empty() || std::find(domains.begin(), domains.end(), d.name) != domains.end()) {
            subset.domains.push_back(d);
        }
    }
    if (subset.domains.empty()) {
        throw NotFoundError("no matching domains for the hybrid ablation");
    }
    const auto rep = run_benchmark(subset, cfg, provider);
    return {{"Vector-only PCR", rep.overall[0].method, rep.overall[0].metrics},
            {"Hybrid PCR", rep.overall[1].method, rep.overall[1].metrics}};
}

// --- latency ---------------------------------------------------------------

struct LatencySummary {
    std::size_t samples = 0;
    MeanStd full;
    double full_min = 0.0;
    double full_max = 0.0;
    MeanStd reachability;
    double reachability_min = 0.0;
    double reachability_max = 0.0;
};

/// Single-threaded wall-clock timings over every query of `domain`, for the
/// full PCR query (embedding the query text when a provider is given) and
/// for the reachability step alone. The first `cfg.warmup` passes are
/// discarded.
inline LatencySummary run_latency_bench(const BenchmarkDataset& ds, const RunConfig& cfg,
                                        EmbeddingProvider* provider = nullptr, const std::string& domain = "tech") {
    cfg.validate();
    using Clock = std::chrono::steady_clock;
    const Domain& d = ds.domain(domain);
    const PreparedDomain p = prepare_domain(d, cfg.bm25, provider);
    if (p.queries.empty()) {
        throw EmptyInputError("domain '" + domain + "' has no queries");
    }
    RetrievalMethod method = RetrievalMethod::pcr();
    for (const auto& m : cfg.methods) {
        if (m.kind == RetrievalMethod::Kind::pcr) {
            method = m;
            break;
        }
    }

    std::vector<double> full;
    std::vector<double> reach;
    for (std::size_t pass = 0; pass < cfg.warmup + cfg.repeats; ++pass) {
        const bool record = pass >= cfg.warmup;
        for (const auto& q : p.queries) {
            auto t0 = Clock::now();
            EmbeddingVector emb = provider != nullptr ? embed_text(*provider, q.text) : q.embedding;
            const auto r = pcr_search(d.graph, p.index, q.anchor, q.text, emb, cfg.k, method, cfg.exclude_anchor);
            auto t1 = Clock::now();

            auto t2 = Clock::now();
            const auto rs = reachable_from(d.graph, q.anchor, method.max_depth);
            auto t3 = Clock::now();

            if (record) {
                full.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
                reach.push_back(std::chrono::duration<double, std::milli>(t3 - t2).count());
            }
        }
    }

    LatencySummary s;
    s.samples = full.size();
    s.full = mean_std(full);
    s.full_min = *std::min_element(full.begin(), full.end());
    s.full_max = *std::max_element(full.begin(), full.end());
    s.reachability = mean_std(reach);
    s.reachability_min = *std::min_element(reach.begin(), reach.end());
    s.reachability_max = *std::max_element(reach.begin(), reach.end());
    return s;
}

// --- report serialization --------------------------------------------------

inline nlohmann::json to_json(const MethodSummary& s) {
    return {{"method", to_json(s.method)},
            {"metrics", to_json(s.metrics)},
            {"fallback_count", s.fallback_count},
            {"mean_latency_ms", s.mean_latency_ms}};
}

inline nlohmann::json overall_json(const BenchmarkReport& rep) {
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& s : rep.overall) {
        methods.push_back(to_json(s));
    }
    return {{"k", rep.k}, {"methods", std::move(methods)}};
}

inline nlohmann::json per_domain_json(const BenchmarkReport& rep) {
    nlohmann::json domains = nlohmann::json::array();
    for (const auto& d : rep.per_domain) {
        nlohmann::json methods = nlohmann::json::array();
        for (const auto& s : d.methods) {
            methods.push_back(to_json(s));
        }
        domains.push_back({{"domain", d.domain}, {"methods", std::move(methods)}});
    }
    return {{"k", rep.k}, {"domains", std::move(domains)}};
}

inline nlohmann::json comparisons_json(const BenchmarkReport& rep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : rep.comparisons) {
        rows.push_back(to_json(c));
    }
    return {{"k", rep.k}, {"comparisons", std::move(rows)}};
}

inline nlohmann::json to_json(const std::vector<DepthAblationRow>& rows, std::size_t k) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        double mean_candidates = 0.0;
        for (std::size_t c : r.candidate_counts) {
            mean_candidates += static_cast<double>(c);
        }
        if (!r.candidate_counts.empty()) {
            mean_candidates /= static_cast<double>(r.candidate_counts.size());
        }
        arr.push_back({{"max_depth", r.depth ? nlohmann::json(*r.depth) : nlohmann::json(nullptr)},
                       {"label", depth_label(r.depth)},
                       {"metrics", to_json(r.metrics)},
                       {"candidate_counts", r.candidate_counts},
                       {"mean_candidates", mean_candidates}});
    }
    return {{"k", k}, {"rows", std::move(arr)}};
}

inline nlohmann::json to_json(const std::vector<HybridAblationRow>& rows, std::size_t k) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"configuration", r.configuration}, {"method", to_json(r.method)}, {"metrics", to_json(r.metrics)}});
    }
    return {{"k", k}, {"rows", std::move(arr)}};
}

inline nlohmann::json to_json(const LatencySummary& s) {
    return {{"samples", s.samples},
            {"latency_ms", {{"mean", s.full.mean}, {"std", s.full.std}, {"min", s.full_min}, {"max", s.full_max}}},
            {"reachability_latency_ms",
             {{"mean", s.reachability.mean},
              {"std", s.reachability.std},
              {"min", s.reachability_min},
              {"max", s.reachability_max}}}};
}

inline std::string render_overall(const std::vector<MethodSummary>& rows) {
    std::vector<std::pair<std::string, AggregateReport>> table;
    for (const auto& s : rows) {
        table.emplace_back(s.method.label(), s.metrics);
    }
    return render_metrics_table(table);
}

inline std::string render_per_domain(const BenchmarkReport& rep) {
    std::vector<std::string> header{"Domain"};
    for (const auto& s : rep.overall) {
        header.push_back(s.method.label() + " Rel@" + std::to_string(rep.k));
        header.push_back(s.method.label() + " Struct.");
    }
    TextTable t(header);
    const auto k = static_cast<unsigned>(rep.k);
    for (const auto& d : rep.per_domain) {
        std::vector<std::string> row{d.domain};
        for (const auto& s : d.methods) {
            row.push_back(fixed(s.metrics.relevance_at.at(k).mean));
            row.push_back(fixed(s.metrics.structural_consistency.mean));
        }
        t.add_row(std::move(row));
    }
    return t.render();
}

inline std::string render_depth_ablation(const std::vector<DepthAblationRow>& rows, std::size_t k) {
    TextTable t({"Max Depth", "Relevance@" + std::to_string(k), "Struct. Consistency", "Distance Penalty",
                 "Candidates"});
    for (const auto& r : rows) {
        double mean_candidates = 0.0;
        for (std::size_t c : r.candidate_counts) mean_candidates += static_cast<double>(c);
        if (!r.candidate_counts.empty()) mean_candidates /= static_cast<double>(r.candidate_counts.size());
        t.add_row({depth_label(r.depth), fixed(r.metrics.relevance_at.at(static_cast<unsigned>(k)).mean),
                   fixed(r.metrics.structural_consistency.mean), fixed(r.metrics.distance_penalty.mean),
                   fixed(mean_candidates, 1)});
    }
    return t.render();
}

inline std::string render_hybrid_ablation(const std::vector<HybridAblationRow>& rows, std::size_t k) {
    TextTable t({"Configuration", "Relevance@" + std::to_string(k), "Struct. Consistency", "Multi-hop Consistency"});
    for (const auto& r : rows) {
        t.add_row({r.configuration, fixed(r.metrics.relevance_at.at(static_cast<unsigned>(k)).mean),
                   fixed(r.metrics.structural_consistency.mean), fixed(r.metrics.multihop_consistency.mean)});
    }
    return t.render();
}

inline std::string render_latency(const LatencySummary& s) {
    TextTable t({"Metric", "Value"});
    t.add_row({"Average Latency", fixed(s.full.mean, 3) + " ms ± " + fixed(s.full.std, 3) + " ms"});
    t.add_row({"Min Latency", fixed(s.full_min, 3) + " ms"});
    t.add_row({"Max Latency", fixed(s.full_max, 3) + " ms"});
    t.add_row({"Reachability Computation",
               fixed(s.reachability.mean, 3) + " ms ± " + fixed(s.reachability.std, 3) + " ms"});
    t.add_row({"Samples", std::to_string(s.samples)});
    return t.render();
}

}  // namespace pcr
