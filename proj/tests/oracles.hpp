#pragma once
// Independent reference implementations used only by the tests. Nothing in
// here calls into the library's algorithms; each oracle recomputes its
// answer from first principles (usually the slow way).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pcr/graph.hpp"

namespace oracle {

using pcr::Edge;
using pcr::KnowledgeGraph;
using pcr::Node;
using pcr::NodeId;

// --- random inputs ----------------------------------------------------------

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}

    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
    bool coin(double p) { return uniform(0.0, 1.0) < p; }
};

inline const std::vector<std::string>& words() {
    static const std::vector<std::string> w{"graph",  "anchor", "cache",  "query",   "index",  "vector",
                                            "path",   "depth",  "node",   "edge",    "search", "rank",
                                            "policy", "audit",  "gene",   "protein", "dose",   "service",
                                            "retry",  "token",  "schema", "latency", "cloud",  "shard"};
    return w;
}

inline std::string random_text(Rng& rng, std::size_t min_words = 1, std::size_t max_words = 6) {
    const std::size_t n = min_words + rng.below(max_words - min_words + 1);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        s += (i ? " " : "") + words()[rng.below(words().size())];
    }
    return s;
}

inline std::vector<double> random_vector(Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (double& x : v) {
        x = rng.normal();
    }
    return v;
}

inline std::string node_name(std::size_t i) {
    // Zero-padded so lexicographic and numeric order agree.
    char buf[16];
    std::snprintf(buf, sizeof buf, "n%03zu", i);
    return buf;
}

/// Random directed graph with `n` nodes and `m` edges; self-loops and
/// parallel edges appear naturally. Node ids are inserted in shuffled order.
inline KnowledgeGraph random_graph(Rng& rng, std::size_t n, std::size_t m, std::size_t dim = 8) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng.engine);
    std::vector<Node> nodes;
    for (std::size_t i : order) {
        nodes.push_back({NodeId(node_name(i)), random_text(rng), random_vector(rng, dim)});
    }
    std::vector<Edge> edges;
    for (std::size_t e = 0; e < m; ++e) {
        edges.push_back({NodeId(node_name(rng.below(n))), NodeId(node_name(rng.below(n))), std::nullopt});
    }
    return KnowledgeGraph::build(dim, std::move(nodes), std::move(edges));
}

/// Two disjoint halves with edges only inside each half.
inline KnowledgeGraph two_component_graph(Rng& rng, std::size_t n, std::size_t m, std::size_t dim = 8) {
    const std::size_t half = n / 2;
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < n; ++i) {
        nodes.push_back({NodeId(node_name(i)), random_text(rng), random_vector(rng, dim)});
    }
    std::vector<Edge> edges;
    for (std::size_t e = 0; e < m; ++e) {
        const bool left = e % 2 == 0;
        const std::size_t lo = left ? 0 : half;
        const std::size_t span = left ? half : n - half;
        edges.push_back({NodeId(node_name(lo + rng.below(span))), NodeId(node_name(lo + rng.below(span))),
                         std::nullopt});
    }
    return KnowledgeGraph::build(dim, std::move(nodes), std::move(edges));
}

// --- shortest paths ---------------------------------------------------------

inline constexpr unsigned kInf = std::numeric_limits<unsigned>::max() / 4;

/// All-pairs hop distances by Floyd–Warshall over the raw edge list,
/// keyed by node id.
inline std::map<std::string, std::map<std::string, unsigned>> floyd_warshall(const KnowledgeGraph& g) {
    const std::size_t n = g.size();
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i) pos[g.node(i).id.value] = i;
    std::vector<std::vector<unsigned>> d(n, std::vector<unsigned>(n, kInf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (const auto& e : g.edges()) {
        auto& cell = d[pos.at(e.src.value)][pos.at(e.dst.value)];
        cell = std::min(cell, 1u);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    std::map<std::string, std::map<std::string, unsigned>> out;
    for (const auto& [a, i] : pos)
        for (const auto& [b, j] : pos)
            if (d[i][j] < kInf) out[a][b] = d[i][j];
    return out;
}

/// Nodes within `depth` hops of `anchor` by repeated frontier expansion over
/// the edge list (no queue, no CSR).
inline std::set<std::string> within_hops(const KnowledgeGraph& g, const std::string& anchor,
                                         std::optional<unsigned> depth) {
    std::set<std::string> seen{anchor};
    std::set<std::string> frontier{anchor};
    for (unsigned level = 0; !frontier.empty() && (!depth || level < *depth); ++level) {
        std::set<std::string> next;
        for (const auto& e : g.edges()) {
            if (frontier.contains(e.src.value) && !seen.contains(e.dst.value)) {
                next.insert(e.dst.value);
            }
        }
        seen.insert(next.begin(), next.end());
        frontier = std::move(next);
    }
    return seen;
}

// --- scoring ----------------------------------------------------------------

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    long double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += static_cast<long double>(u[i]) * v[i];
        nu += static_cast<long double>(u[i]) * u[i];
        nv += static_cast<long double>(v[i]) * v[i];
    }
    if (nu == 0 || nv == 0) return 0.0;
    return static_cast<double>(dot / (std::sqrt(nu) * std::sqrt(nv)));
}

inline std::vector<std::string> words_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

/// Clean-room BM25 straight from the textbook formula with the
/// non-negative IDF ln((N - df + 0.5) / (df + 0.5) + 1).
inline std::vector<double> bm25(const std::vector<std::string>& docs, const std::string& query, double k1 = 1.5,
                                double b = 0.75) {
    std::vector<std::vector<std::string>> toks;
    double total = 0;
    for (const auto& d : docs) {
        toks.push_back(words_of(d));
        total += static_cast<double>(toks.back().size());
    }
    const double N = static_cast<double>(docs.size());
    const double avgdl = total / N;
    std::vector<double> scores(docs.size(), 0.0);
    for (const auto& term : words_of(query)) {
        double df = 0;
        for (const auto& t : toks) df += std::count(t.begin(), t.end(), term) > 0 ? 1 : 0;
        const double idf = std::log((N - df + 0.5) / (df + 0.5) + 1.0);
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const double tf = static_cast<double>(std::count(toks[i].begin(), toks[i].end(), term));
            const double dl = static_cast<double>(toks[i].size());
            scores[i] += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl));
        }
    }
    return scores;
}

/// Ids sorted by score descending, id ascending on ties; the full order.
inline std::vector<std::string> full_rank(const std::vector<std::pair<std::string, double>>& scored) {
    auto v = scored;
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<std::string> ids;
    for (const auto& [id, _] : v) ids.push_back(id);
    return ids;
}

// --- statistics -------------------------------------------------------------

inline long double t_pdf(long double x, long double nu) {
    const long double logc = std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) - 0.5L * std::log(nu * 3.14159265358979323846L);
    return std::exp(logc - (nu + 1) / 2 * std::log1p(x * x / nu));
}

inline long double simpson(long double a, long double b, long double nu, long double fa, long double fm, long double fb,
                           long double whole, long double eps, int depth) {
    const long double m = (a + b) / 2;
    const long double lm = (a + m) / 2, rm = (m + b) / 2;
    const long double flm = t_pdf(lm, nu), frm = t_pdf(rm, nu);
    const long double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const long double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15 * eps) {
        return left + right + (left + right - whole) / 15;
    }
    return simpson(a, m, nu, fa, flm, fm, left, eps / 2, depth - 1) +
           simpson(m, b, nu, fm, frm, fb, right, eps / 2, depth - 1);
}

/// Two-tailed p-value 1 - 2 * integral_0^|t| pdf, by adaptive Simpson.
inline double t_two_tailed_p(double t, double df) {
    const long double b = std::fabs(static_cast<long double>(t));
    if (b == 0) return 1.0;
    const long double nu = df;
    const long double fa = t_pdf(0, nu), fb = t_pdf(b, nu), fm = t_pdf(b / 2, nu);
    const long double whole = b / 6 * (fa + 4 * fm + fb);
    const long double area = simpson(0, b, nu, fa, fm, fb, whole, 1e-13L, 40);
    return static_cast<double>(std::max<long double>(0, 1 - 2 * area));
}

}  // namespace oracle
