#pragma once

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcr/pcr.hpp"
#include "pcr/remote_embedding.hpp"

namespace pcr::cli {

namespace fs = std::filesystem;

struct MethodFlags {
    std::string kind = "pcr";
    double alpha = 0.7;
    std::optional<unsigned> max_depth;
    std::string pcr_scoring = "vector";
    std::string fallback;
    bool include_anchor = false;
};

struct ProviderFlags {
    std::string kind = "deterministic-local";
    std::string model = "text-embedding-3-small";
};

inline void add_method_flags(CLI::App* cmd, MethodFlags& f, bool with_kind) {
    if (with_kind) {
        cmd->add_option("--method", f.kind, "Retrieval method")
            ->check(CLI::IsMember({"vector", "bm25", "hybrid", "pcr"}))
            ->capture_default_str();
    }
    cmd->add_option("--alpha", f.alpha, "Hybrid weight on the vector score")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--max-depth", f.max_depth, "PCR depth limit in hops (unlimited when omitted)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--pcr-scoring", f.pcr_scoring, "PCR scoring inside the reachable set")
        ->check(CLI::IsMember({"vector", "hybrid"}))
        ->capture_default_str();
    cmd->add_option("--fallback", f.fallback, "PCR fallback when nothing is reachable")
        ->check(CLI::IsMember({"none", "global"}));
    cmd->add_flag("--include-anchor", f.include_anchor, "Allow the anchor node itself in results");
}

inline void add_provider_flags(CLI::App* cmd, ProviderFlags& f) {
    cmd->add_option("--provider", f.kind, "Embedding provider")
        ->check(CLI::IsMember({"deterministic-local", "file-cache", "remote-http"}))
        ->capture_default_str();
    cmd->add_option("--model", f.model, "Model name sent to the remote-http provider")->capture_default_str();
}

inline RetrievalMethod build_method(const std::string& kind, const MethodFlags& f, const std::string& default_fallback) {
    RetrievalMethod m;
    m.kind = parse_method_kind(kind);
    m.alpha = f.alpha;
    if (m.kind == RetrievalMethod::Kind::pcr) {
        m.max_depth = f.max_depth;
        m.pcr_scoring = f.pcr_scoring == "hybrid" ? RetrievalMethod::PcrScoring::hybrid
                                                  : RetrievalMethod::PcrScoring::vector;
        const std::string& fb = f.fallback.empty() ? default_fallback : f.fallback;
        m.fallback = fb == "global" ? RetrievalMethod::Fallback::global : RetrievalMethod::Fallback::none;
    }
    m.validate();
    return m;
}

/// Provider for query texts of an existing dataset. Deterministic and
/// remote providers must match the provider recorded in the manifest, so
/// queries land in the same vector space as the nodes.
inline std::unique_ptr<EmbeddingProvider> make_provider(const ProviderFlags& f, std::size_t dimension,
                                                        const fs::path& dataset_dir,
                                                        const std::optional<std::string>& manifest_provider) {
    const fs::path cache_path = dataset_dir / "embedding_cache.json";
    std::unique_ptr<EmbeddingProvider> p;
    if (f.kind == "deterministic-local") {
        p = std::make_unique<DeterministicProvider>(dimension);
    } else if (f.kind == "file-cache") {
        return std::make_unique<FileCacheProvider>(std::make_shared<EmbeddingCache>(EmbeddingCache::load(cache_path)));
    } else {
        auto cache = fs::exists(cache_path) ? std::make_shared<EmbeddingCache>(EmbeddingCache::load(cache_path))
                                            : std::make_shared<EmbeddingCache>(dimension, "remote-http:" + f.model);
        p = std::make_unique<RemoteProvider>(RemoteProvider::from_environment(f.model, cache, cache_path));
    }
    if (manifest_provider && p->id() != *manifest_provider) {
        throw ConfigError("dataset embeddings come from '" + *manifest_provider + "' but the selected provider is '" +
                          p->id() + "'; use --provider file-cache or the matching provider");
    }
    return p;
}

inline void write_report(const fs::path& dir, const std::string& stem, const nlohmann::json& j,
                         const std::string& table) {
    fs::create_directories(dir);
    detail::write_file(dir / (stem + ".json"), j.dump(2) + "\n");
    detail::write_file(dir / (stem + ".txt"), table);
}

inline std::vector<DepthLimit> parse_depths(const std::string& spec) {
    std::vector<DepthLimit> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "unlimited" || item == "none") {
            out.emplace_back(std::nullopt);
            continue;
        }
        try {
            std::size_t used = 0;
            const long v = std::stol(item, &used);
            if (used != item.size() || v < 1) {
                throw std::invalid_argument(item);
            }
            out.emplace_back(static_cast<unsigned>(v));
        } catch (const std::logic_error&) {
            throw ConfigError("invalid depth '" + item + "' (expected a positive integer or 'unlimited')");
        }
    }
    if (out.empty()) {
        throw ConfigError("no depths given");
    }
    return out;
}

/// Entry point shared by the `pcr` binary and the tests. Returns 0 on
/// success, 2 on a usage error, 1 on any other failure.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Path-constrained retrieval over knowledge graphs", "pcr"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // generate
    std::uint64_t seed = kReferenceSeed;
    std::string out_dir;
    std::optional<std::size_t> queries_per_domain;
    std::size_t dimension = 64;
    bool force = false;
    ProviderFlags gen_provider;
    auto* gen = app.add_subcommand("generate", "Generate the six-domain benchmark dataset");
    gen->add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
    gen->add_option("--out", out_dir, "Output dataset directory")->required();
    gen->add_option("--queries-per-domain", queries_per_domain,
                    "Uniform query count per domain (default: 20 for tech, 2 elsewhere)")
        ->check(CLI::PositiveNumber);
    gen->add_option("--dimension", dimension, "Embedding width for the deterministic provider")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen->add_flag("--force", force, "Overwrite a non-empty output directory");
    add_provider_flags(gen, gen_provider);

    // validate
    std::string dataset;
    auto* val = app.add_subcommand("validate", "Check a dataset directory against the schema");
    val->add_option("--dataset", dataset, "Dataset directory")->required();

    // retrieve
    std::string domain = "tech";
    std::string anchor;
    std::string query;
    std::size_t k = 10;
    MethodFlags mflags;
    ProviderFlags qprovider;
    std::string retrieve_out;
    auto* ret = app.add_subcommand("retrieve", "Run one query and print the ranked nodes");
    ret->add_option("--dataset", dataset, "Dataset directory")->required();
    ret->add_option("--domain", domain, "Domain name")->capture_default_str();
    ret->add_option("--anchor", anchor, "Anchor node id")->required();
    ret->add_option("--query", query, "Query text")->required();
    ret->add_option("--k", k, "Number of results")->check(CLI::PositiveNumber)->capture_default_str();
    ret->add_option("--out", retrieve_out, "Also write retrieve.json into this directory");
    add_method_flags(ret, mflags, true);
    add_provider_flags(ret, qprovider);

    // evaluate
    std::string methods_spec = "pcr,vector,bm25,hybrid";
    std::string report_dir = "reports";
    double penalty_weight = 0.1;
    double unreachable_distance = 8.0;
    std::string denominator = "returned";
    double k1 = 1.5;
    double b = 0.75;
    auto* ev = app.add_subcommand("evaluate", "Evaluate every method over the dataset");
    ev->add_option("--dataset", dataset, "Dataset directory")->required();
    ev->add_option("--k", k, "Number of results")->check(CLI::PositiveNumber)->capture_default_str();
    ev->add_option("--methods", methods_spec, "Comma-separated methods")->capture_default_str();
    ev->add_option("--out", report_dir, "Report directory")->capture_default_str();
    ev->add_option("--penalty-weight", penalty_weight, "Distance penalty weight")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    ev->add_option("--unreachable-distance", unreachable_distance, "Hop distance charged for unreachable results")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    ev->add_option("--relevance-denominator", denominator, "Relevance@k denominator")
        ->check(CLI::IsMember({"returned", "k"}))
        ->capture_default_str();
    ev->add_option("--bm25-k1", k1, "BM25 k1")->check(CLI::NonNegativeNumber)->capture_default_str();
    ev->add_option("--bm25-b", b, "BM25 b")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    add_method_flags(ev, mflags, false);

    // ablate-depth
    std::string depths_spec = "unlimited,5,3,2,1";
    std::vector<std::string> domains;
    auto* abd = app.add_subcommand("ablate-depth", "PCR with a sweep of depth limits");
    abd->add_option("--dataset", dataset, "Dataset directory")->required();
    abd->add_option("--depths", depths_spec, "Comma-separated depths; 'unlimited' for no limit")
        ->capture_default_str();
    abd->add_option("--domain", domains, "Restrict to these domains (repeatable; default: all)");
    abd->add_option("--k", k, "Number of results")->check(CLI::PositiveNumber)->capture_default_str();
    abd->add_option("--out", report_dir, "Report directory")->capture_default_str();
    abd->add_option("--penalty-weight", penalty_weight, "Distance penalty weight")->capture_default_str();
    abd->add_option("--unreachable-distance", unreachable_distance, "Hop distance charged for unreachable results")
        ->capture_default_str();

    // ablate-hybrid
    auto* abh = app.add_subcommand("ablate-hybrid", "Vector-scored against hybrid-scored PCR");
    abh->add_option("--dataset", dataset, "Dataset directory")->required();
    abh->add_option("--domain", domains, "Restrict to these domains (repeatable; default: tech)");
    abh->add_option("--alpha", mflags.alpha, "Hybrid weight")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    abh->add_option("--k", k, "Number of results")->check(CLI::PositiveNumber)->capture_default_str();
    abh->add_option("--out", report_dir, "Report directory")->capture_default_str();

    // bench
    std::size_t repeats = 100;
    std::size_t warmup = 5;
    ProviderFlags bprovider;
    auto* bench = app.add_subcommand("bench", "Time full PCR queries and the reachability step");
    bench->add_option("--dataset", dataset, "Dataset directory")->required();
    bench->add_option("--domain", domain, "Domain name")->capture_default_str();
    bench->add_option("--repeats", repeats, "Timed passes over the domain's queries")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench->add_option("--warmup", warmup, "Untimed passes before measuring")->capture_default_str();
    bench->add_option("--k", k, "Number of results")->check(CLI::PositiveNumber)->capture_default_str();
    bench->add_option("--out", report_dir, "Report directory")->capture_default_str();
    add_method_flags(bench, mflags, false);
    add_provider_flags(bench, bprovider);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (gen->parsed()) {
            GeneratorConfig cfg;
            cfg.seed = seed;
            if (queries_per_domain) {
                cfg = GeneratorConfig::uniform(seed, *queries_per_domain);
            }
            std::unique_ptr<EmbeddingProvider> provider;
            std::shared_ptr<EmbeddingCache> remote_cache;
            if (gen_provider.kind == "deterministic-local") {
                provider = std::make_unique<DeterministicProvider>(dimension);
            } else if (gen_provider.kind == "remote-http") {
                remote_cache = std::make_shared<EmbeddingCache>(dimension, "remote-http:" + gen_provider.model);
                provider = std::make_unique<RemoteProvider>(RemoteProvider::from_environment(gen_provider.model, remote_cache));
            } else {
                throw ConfigError("generate needs a provider that can compute embeddings");
            }
            EmbeddingCache cache(provider->dimension(), provider->id());
            const auto ds = generate_dataset(cfg, *provider, &cache);
            write_dataset(ds, out_dir, force, &cache);
            std::size_t nq = 0;
            for (const auto& d : ds.domains) nq += d.queries.size();
            out << "wrote " << ds.domains.size() << " domains, " << nq << " queries to " << out_dir << "\n";
            return 0;
        }

        if (val->parsed()) {
            const auto ds = load_dataset(dataset);
            TextTable t({"Domain", "Nodes", "Edges", "Queries", "Dimension"});
            for (const auto& d : ds.domains) {
                t.add_row({d.name, std::to_string(d.graph.size()), std::to_string(d.graph.edges().size()),
                           std::to_string(d.queries.size()), std::to_string(d.graph.dimension())});
            }
            out << t.render() << "dataset OK\n";
            return 0;
        }

        const auto ds = load_dataset(dataset);

        if (ret->parsed()) {
            const Domain& d = ds.domain(domain);
            const auto method = build_method(mflags.kind, mflags, "global");
            auto provider = make_provider(qprovider, ds.manifest.dimension, dataset,
                                          qprovider.kind == "file-cache" ? std::nullopt
                                                                         : std::optional(ds.manifest.embedding_provider));
            const auto idx = LexicalIndex::build(d.graph);
            const Query q{"cli", query, NodeId(anchor), embed_text(*provider, query)};
            const auto r = retrieve(d.graph, idx, q, method, {k, !mflags.include_anchor});

            TextTable t({"Rank", "Node", "Score", "Reachable", "Path", "Text"});
            for (std::size_t i = 0; i < r.ranked.size(); ++i) {
                const auto& s = r.ranked[i];
                t.add_row({std::to_string(i + 1), s.node.value, fixed(s.score, 4), s.reachable ? "yes" : "no",
                           s.path_len ? std::to_string(*s.path_len) : "-",
                           d.graph.node(d.graph.require_index(s.node)).text});
            }
            out << "method " << method.label() << ", anchor " << anchor << ", " << r.ranked.size() << " results"
                << (r.fallback_used ? " (fallback to global search)" : "") << "\n"
                << t.render();
            if (!retrieve_out.empty()) {
                nlohmann::json ranked = nlohmann::json::array();
                for (const auto& s : r.ranked) {
                    ranked.push_back({{"node", s.node.value},
                                      {"score", s.score},
                                      {"reachable", s.reachable},
                                      {"path_len", s.path_len ? nlohmann::json(*s.path_len) : nlohmann::json(nullptr)}});
                }
                nlohmann::json j = {{"domain", domain}, {"anchor", anchor},         {"query", query},
                                    {"method", to_json(method)}, {"fallback_used", r.fallback_used},
                                    {"latency_ms", r.latency_ms}, {"ranked", std::move(ranked)}};
                write_report(retrieve_out, "retrieve", j, t.render());
            }
            return 0;
        }

        if (ev->parsed()) {
            RunConfig cfg;
            cfg.k = k;
            cfg.exclude_anchor = !mflags.include_anchor;
            cfg.bm25 = {k1, b};
            cfg.metrics.penalty_weight = penalty_weight;
            cfg.metrics.unreachable_distance = unreachable_distance;
            cfg.metrics.denominator = denominator == "k" ? RelevanceDenominator::k : RelevanceDenominator::returned;
            cfg.methods.clear();
            std::stringstream ss(methods_spec);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) cfg.methods.push_back(build_method(item, mflags, "none"));
            }
            const auto rep = run_benchmark(ds, cfg);
            const std::string overall = render_overall(rep.overall);
            const std::string per_domain = render_per_domain(rep);
            const std::string comparisons = render_comparison_table(rep.comparisons);
            write_report(report_dir, "overall", overall_json(rep), overall);
            write_report(report_dir, "per_domain", per_domain_json(rep), per_domain);
            write_report(report_dir, "comparisons", comparisons_json(rep), comparisons);
            out << "Overall (k=" << k << ")\n" << overall << "\nPer domain\n" << per_domain;
            if (!rep.comparisons.empty()) {
                out << "\nPaired t-tests on Relevance@" << k << "\n" << comparisons;
            }
            return 0;
        }

        if (abd->parsed()) {
            MetricsConfig mc;
            mc.penalty_weight = penalty_weight;
            mc.unreachable_distance = unreachable_distance;
            const auto rows = run_depth_ablation(ds, parse_depths(depths_spec), k, domains, mc);
            const std::string table = render_depth_ablation(rows, k);
            write_report(report_dir, "ablation_depth", to_json(rows, k), table);
            out << table;
            return 0;
        }

        if (abh->parsed()) {
            const auto rows =
                run_hybrid_ablation(ds, k, mflags.alpha, domains.empty() ? std::vector<std::string>{"tech"} : domains);
            const std::string table = render_hybrid_ablation(rows, k);
            write_report(report_dir, "ablation_hybrid", to_json(rows, k), table);
            out << table;
            return 0;
        }

        if (bench->parsed()) {
            RunConfig cfg;
            cfg.k = k;
            cfg.repeats = repeats;
            cfg.warmup = warmup;
            cfg.exclude_anchor = !mflags.include_anchor;
            cfg.methods = {build_method("pcr", mflags, "none")};
            auto provider = make_provider(bprovider, ds.manifest.dimension, dataset,
                                          bprovider.kind == "file-cache" ? std::nullopt
                                                                         : std::optional(ds.manifest.embedding_provider));
            const auto s = run_latency_bench(ds, cfg, provider.get(), domain);
            const std::string table = render_latency(s);
            write_report(report_dir, "latency", to_json(s), table);
            out << table;
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "usage error: no subcommand\n";
    return 2;
}

}  // namespace pcr::cli
