#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcr/error.hpp"
#include "pcr/graph.hpp"
#include "pcr/retrieval.hpp"
#include "pcr/table.hpp"

namespace pcr {

struct GroundTruth {
    std::string query_id;
    std::set<NodeId> relevant;
};

/// Denominator of Relevance@k. `returned` divides by min(k, |ranked|) so a
/// method that honestly returns fewer than k nodes is not penalized for the
/// missing slots; `k` always divides by k.
enum class RelevanceDenominator { returned, k };

struct MetricsConfig {
    std::vector<unsigned> ks{1, 5, 10};
    double penalty_weight = 0.1;
    double unreachable_distance = 8.0;
    RelevanceDenominator denominator = RelevanceDenominator::returned;
};

struct MetricsReport {
    std::map<unsigned, double> relevance_at;
    double structural_consistency = 0.0;
    double structural_inconsistency = 0.0;
    double multihop_consistency = 0.0;
    double distance_penalty = 0.0;
    double penalty_weight = 0.1;
    std::size_t result_count = 0;
};

/// |top-k ∩ relevant|; the monotone quantity behind Relevance@k.
inline std::size_t relevant_hits(const RetrievalResult& result, const GroundTruth& truth, std::size_t k) {
    std::size_t hits = 0;
    const std::size_t n = std::min(k, result.ranked.size());
    for (std::size_t i = 0; i < n; ++i) {
        hits += truth.relevant.contains(result.ranked[i].node) ? 1 : 0;
    }
    return hits;
}

inline double relevance_at_k(const RetrievalResult& result, const GroundTruth& truth, std::size_t k,
                             RelevanceDenominator denominator = RelevanceDenominator::returned) {
    if (k == 0) {
        throw ConfigError("k must be at least 1");
    }
    if (result.ranked.empty()) {
        return 0.0;
    }
    const std::size_t denom = denominator == RelevanceDenominator::k ? k : std::min(k, result.ranked.size());
    return static_cast<double>(relevant_hits(result, truth, k)) / static_cast<double>(denom);
}

/// Fraction of retrieved nodes inside `reach`; vacuously 1 for an empty result.
inline double structural_consistency(const RetrievalResult& result, const ReachabilitySet& reach) {
    if (result.ranked.empty()) {
        return 1.0;
    }
    std::size_t inside = 0;
    for (const ScoredNode& s : result.ranked) {
        inside += reach.contains(s.node) ? 1 : 0;
    }
    return static_cast<double>(inside) / static_cast<double>(result.ranked.size());
}

/// 1 / (1 + sigma/mu) over the hop distances of the reachable retrieved
/// nodes (population sigma). 0 when none is reachable; 1 when mu is 0.
inline double multihop_consistency(const RetrievalResult& result, const ReachabilitySet& reach) {
    std::vector<unsigned> lengths;
    for (const ScoredNode& s : result.ranked) {
        if (auto d = reach.distance(s.node)) {
            lengths.push_back(*d);
        }
    }
    if (lengths.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (unsigned l : lengths) {
        sum += l;
    }
    const double mu = sum / static_cast<double>(lengths.size());
    if (mu == 0.0) {
        return 1.0;
    }
    double ss = 0.0;
    for (unsigned l : lengths) {
        ss += (l - mu) * (l - mu);
    }
    const double sigma = std::sqrt(ss / static_cast<double>(lengths.size()));
    return 1.0 / (1.0 + sigma / mu);
}

/// weight * mean hop distance of the retrieved nodes, counting an
/// unreachable node as `unreachable_distance` hops.
inline double distance_penalty(const RetrievalResult& result, const ReachabilitySet& reach, double weight = 0.1,
                               double unreachable_distance = 8.0) {
    if (weight < 0.0) {
        throw ConfigError("penalty weight must be non-negative");
    }
    if (result.ranked.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const ScoredNode& s : result.ranked) {
        auto d = reach.distance(s.node);
        sum += d ? static_cast<double>(*d) : unreachable_distance;
    }
    return weight * (sum / static_cast<double>(result.ranked.size()));
}

/// All metrics for one (method, query) pair. `reach` should be the anchor's
/// unlimited reachability set.
inline MetricsReport evaluate(const RetrievalResult& result, const GroundTruth& truth, const ReachabilitySet& reach,
                              const MetricsConfig& cfg = {}) {
    MetricsReport r;
    for (unsigned k : cfg.ks) {
        r.relevance_at[k] = relevance_at_k(result, truth, k, cfg.denominator);
    }
    r.structural_consistency = structural_consistency(result, reach);
    r.structural_inconsistency = 1.0 - r.structural_consistency;
    r.multihop_consistency = multihop_consistency(result, reach);
    r.distance_penalty = distance_penalty(result, reach, cfg.penalty_weight, cfg.unreachable_distance);
    r.penalty_weight = cfg.penalty_weight;
    r.result_count = result.ranked.size();
    return r;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;

    friend bool operator==(const MeanStd&, const MeanStd&) = default;
};

/// Mean and population standard deviation.
inline MeanStd mean_std(std::span<const double> xs) {
    if (xs.empty()) {
        throw EmptyInputError("cannot summarize an empty sample");
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

struct AggregateReport {
    std::size_t n = 0;
    std::map<unsigned, MeanStd> relevance_at;
    MeanStd structural_consistency;
    MeanStd structural_inconsistency;
    MeanStd multihop_consistency;
    MeanStd distance_penalty;
    MeanStd result_count;
};

inline AggregateReport aggregate(std::span<const MetricsReport> reports) {
    if (reports.empty()) {
        throw EmptyInputError("cannot aggregate an empty list of reports");
    }
    auto column = [&](auto&& field) {
        std::vector<double> xs;
        xs.reserve(reports.size());
        for (const auto& r : reports) {
            xs.push_back(field(r));
        }
        return mean_std(xs);
    };
    AggregateReport a;
    a.n = reports.size();
    for (const auto& [k, _] : reports.front().relevance_at) {
        a.relevance_at[k] = column([k = k](const MetricsReport& r) { return r.relevance_at.at(k); });
    }
    a.structural_consistency = column([](const MetricsReport& r) { return r.structural_consistency; });
    a.structural_inconsistency = column([](const MetricsReport& r) { return r.structural_inconsistency; });
    a.multihop_consistency = column([](const MetricsReport& r) { return r.multihop_consistency; });
    a.distance_penalty = column([](const MetricsReport& r) { return r.distance_penalty; });
    a.result_count = column([](const MetricsReport& r) { return static_cast<double>(r.result_count); });
    return a;
}

inline nlohmann::json to_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

inline MeanStd mean_std_from_json(const nlohmann::json& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

inline nlohmann::json to_json(const AggregateReport& a) {
    nlohmann::json rel = nlohmann::json::object();
    for (const auto& [k, v] : a.relevance_at) {
        rel[std::to_string(k)] = to_json(v);
    }
    return {{"n_queries", a.n},
            {"relevance_at", std::move(rel)},
            {"structural_consistency", to_json(a.structural_consistency)},
            {"structural_inconsistency", to_json(a.structural_inconsistency)},
            {"multihop_consistency", to_json(a.multihop_consistency)},
            {"distance_penalty", to_json(a.distance_penalty)},
            {"result_count", to_json(a.result_count)}};
}

inline AggregateReport aggregate_from_json(const nlohmann::json& j) {
    AggregateReport a;
    a.n = j.at("n_queries").get<std::size_t>();
    for (const auto& [k, v] : j.at("relevance_at").items()) {
        a.relevance_at[static_cast<unsigned>(std::stoul(k))] = mean_std_from_json(v);
    }
    a.structural_consistency = mean_std_from_json(j.at("structural_consistency"));
    a.structural_inconsistency = mean_std_from_json(j.at("structural_inconsistency"));
    a.multihop_consistency = mean_std_from_json(j.at("multihop_consistency"));
    a.distance_penalty = mean_std_from_json(j.at("distance_penalty"));
    a.result_count = mean_std_from_json(j.at("result_count"));
    return a;
}

/// One row per method in the layout of the overall-performance table.
inline std::string render_metrics_table(const std::vector<std::pair<std::string, AggregateReport>>& rows) {
    std::vector<std::string> header{"Method"};
    std::set<unsigned> ks;
    for (const auto& [_, a] : rows) {
        for (const auto& [k, __] : a.relevance_at) {
            ks.insert(k);
        }
    }
    for (unsigned k : ks) {
        header.push_back("Relevance@" + std::to_string(k));
    }
    for (const char* h : {"Struct. Consistency", "Struct. Inconsistency", "Multi-hop", "Distance Penalty", "Results", "n"}) {
        header.emplace_back(h);
    }
    TextTable t(header);
    for (const auto& [label, a] : rows) {
        std::vector<std::string> row{label};
        for (unsigned k : ks) {
            auto it = a.relevance_at.find(k);
            row.push_back(it == a.relevance_at.end() ? "-" : pm(it->second.mean, it->second.std));
        }
        row.push_back(pm(a.structural_consistency.mean, a.structural_consistency.std));
        row.push_back(pm(a.structural_inconsistency.mean, a.structural_inconsistency.std));
        row.push_back(pm(a.multihop_consistency.mean, a.multihop_consistency.std));
        row.push_back(pm(a.distance_penalty.mean, a.distance_penalty.std));
        row.push_back(fixed(a.result_count.mean, 1));
        row.push_back(std::to_string(a.n));
        t.add_row(std::move(row));
    }
    return t.render();
}

}  // namespace pcr
