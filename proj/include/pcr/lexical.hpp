#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pcr/error.hpp"
#include "pcr/graph.hpp"

namespace pcr {

/// Lowercase, split on anything that is not an ASCII letter or digit, drop
/// empty tokens. No stemming, no stopwords. Bytes >= 0x80 are separators.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;
};

/// BM25 statistics over every node text of a graph. Documents are addressed
/// by the graph's node index; `NodeId` lookups go through the id table.
class LexicalIndex {
public:
    /// term -> (document index -> term frequency)
    using Postings = std::map<std::size_t, unsigned>;

    static LexicalIndex build(const KnowledgeGraph& g, Bm25Params params = {}) {
        if (g.empty()) {
            throw EmptyCorpusError();
        }
        if (!(params.k1 >= 0.0) || !(params.b >= 0.0 && params.b <= 1.0)) {
            throw ConfigError("BM25 parameters out of range: need k1 >= 0 and 0 <= b <= 1");
        }
        LexicalIndex idx;
        idx.params_ = params;
        idx.doc_lengths_.reserve(g.size());
        std::size_t total = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Node& n = g.node(i);
            idx.ids_.emplace(n.id, i);
            idx.doc_ids_.push_back(n.id);
            const auto tokens = tokenize(n.text);
            idx.doc_lengths_.push_back(tokens.size());
            total += tokens.size();
            for (const auto& t : tokens) {
                ++idx.postings_[t][i];
            }
        }
        idx.avg_doc_len_ = static_cast<double>(total) / static_cast<double>(g.size());
        return idx;
    }

    std::size_t doc_count() const noexcept { return doc_lengths_.size(); }
    double avg_doc_len() const noexcept { return avg_doc_len_; }
    const Bm25Params& params() const noexcept { return params_; }

    std::size_t doc_length(const NodeId& v) const { return doc_lengths_.at(require(v)); }

    std::size_t doc_freq(const std::string& term) const {
        auto it = postings_.find(term);
        return it == postings_.end() ? 0 : it->second.size();
    }

    unsigned term_freq(const std::string& term, const NodeId& v) const {
        const std::size_t d = require(v);
        auto it = postings_.find(term);
        if (it == postings_.end()) {
            return 0;
        }
        auto p = it->second.find(d);
        return p == it->second.end() ? 0 : p->second;
    }

    const std::map<std::string, Postings>& postings() const noexcept { return postings_; }

    /// ln((N - df + 0.5) / (df + 0.5) + 1); never negative.
    double idf(const std::string& term) const {
        const double n = static_cast<double>(doc_count());
        const double df = static_cast<double>(doc_freq(term));
        return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    }

    /// BM25 score of one document. Every query token contributes, so a term
    /// repeated in the query counts once per repetition.
    double score(const std::vector<std::string>& query_terms, std::size_t doc) const {
        const double len_norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_lengths_.at(doc)) / avg_doc_len_;
        double s = 0.0;
        for (const auto& t : query_terms) {
            auto it = postings_.find(t);
            if (it == postings_.end()) {
                continue;
            }
            auto p = it->second.find(doc);
            if (p == it->second.end()) {
                continue;
            }
            const double tf = p->second;
            s += idf(t) * tf * (params_.k1 + 1.0) / (tf + params_.k1 * len_norm);
        }
        return s;
    }

    std::size_t require(const NodeId& v) const {
        auto it = ids_.find(v);
        if (it == ids_.end()) {
            throw NotFoundError("node '" + v.value + "' is not in the lexical index");
        }
        return it->second;
    }

    const NodeId& doc_id(std::size_t doc) const { return doc_ids_.at(doc); }

private:
    LexicalIndex() = default;

    Bm25Params params_;
    double avg_doc_len_ = 0.0;
    std::vector<std::size_t> doc_lengths_;
    std::vector<NodeId> doc_ids_;
    std::unordered_map<NodeId, std::size_t> ids_;
    std::map<std::string, Postings> postings_;
};

inline LexicalIndex build_index(const KnowledgeGraph& g, double k1 = 1.5, double b = 0.75) {
    return LexicalIndex::build(g, Bm25Params{k1, b});
}

inline double bm25_score(const LexicalIndex& idx, std::string_view query_text, const NodeId& v) {
    return idx.score(tokenize(query_text), idx.require(v));
}

}  // namespace pcr
