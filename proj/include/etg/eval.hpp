#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "etg/error.hpp"
#include "etg/graph.hpp"

namespace etg {

struct PrfScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t matched = 0;
    std::size_t predicted = 0;
    std::size_t gold = 0;
};

/// Scores from raw counts. 0/0 ratios are 0, except that an empty prediction
/// against an empty gold set is a perfect score.
inline PrfScore prf_from_counts(std::size_t matched, std::size_t predicted, std::size_t gold) {
    PrfScore s{0.0, 0.0, 0.0, matched, predicted, gold};
    if (predicted == 0 && gold == 0) {
        s.precision = s.recall = s.f1 = 1.0;
        return s;
    }
    if (predicted > 0) s.precision = static_cast<double>(matched) / static_cast<double>(predicted);
    if (gold > 0) s.recall = static_cast<double>(matched) / static_cast<double>(gold);
    if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

template <typename Key>
PrfScore prf_of_sets(const std::set<Key>& pred, const std::set<Key>& gold) {
    std::size_t matched = 0;
    auto p = pred.begin();
    auto g = gold.begin();
    while (p != pred.end() && g != gold.end()) {
        if (*p < *g) {
            ++p;
        } else if (*g < *p) {
            ++g;
        } else {
            ++matched;
            ++p;
            ++g;
        }
    }
    return prf_from_counts(matched, pred.size(), gold.size());
}

inline PrfScore node_prf(const TemporalGraph& pred, const TemporalGraph& gold,
                         MatchMode mode = MatchMode::Normalized) {
    return prf_of_sets(pred.node_keys(mode), gold.node_keys(mode));
}

/// Head, label and tail must all agree. Both graphs must share a merge regime.
inline PrfScore edge_prf(const TemporalGraph& pred, const TemporalGraph& gold,
                         MatchMode mode = MatchMode::Normalized) {
    if (pred.merged() != gold.merged()) {
        throw Error(ErrorKind::MergeRegimeMismatch, "prediction and gold differ in reciprocal merging");
    }
    return prf_of_sets(pred.edge_keys(mode), gold.edge_keys(mode));
}

/// Node, edge and per-label counts, either from one graph or pooled.
struct GraphCounts {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    std::map<Relation, std::size_t> label_counts;

    GraphCounts& operator+=(const GraphCounts& other) {
        node_count += other.node_count;
        edge_count += other.edge_count;
        for (const auto& [label, n] : other.label_counts) label_counts[label] += n;
        return *this;
    }
};

inline GraphCounts count_graph(const TemporalGraph& g) {
    GraphCounts c;
    c.node_count = g.node_keys().size();
    c.edge_count = g.size();
    for (const auto& e : g.edges()) ++c.label_counts[e.relation()];
    return c;
}

struct GraphStats {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    /// Relations per event: 2 * edges / nodes.
    double avg_node_degree = 0.0;
    /// Percent of labelled edges per relation; empty when there are none.
    std::map<Relation, double> label_distribution;
};

inline GraphStats graph_stats(const GraphCounts& counts) {
    if (counts.node_count == 0) throw Error(ErrorKind::EmptyGraph, "node degree of a graph with no nodes");
    GraphStats s;
    s.node_count = counts.node_count;
    s.edge_count = counts.edge_count;
    s.avg_node_degree = 2.0 * static_cast<double>(counts.edge_count) / static_cast<double>(counts.node_count);
    std::size_t labelled = 0;
    for (const auto& [label, n] : counts.label_counts) labelled += n;
    if (labelled > 0) {
        for (const auto& [label, n] : counts.label_counts) {
            s.label_distribution[label] = 100.0 * static_cast<double>(n) / static_cast<double>(labelled);
        }
    }
    return s;
}

inline GraphStats graph_stats(const TemporalGraph& g) { return graph_stats(count_graph(g)); }

struct DocumentScore {
    std::string doc_id;
    PrfScore node;
    PrfScore edge;
};

struct PairScore {
    PrfScore node;
    PrfScore edge;
};

struct EvalReport {
    std::vector<DocumentScore> per_doc;
    PairScore macro;
    PairScore micro;
    GraphCounts pred_counts;
    GraphCounts gold_counts;
};

namespace detail {

inline PrfScore macro_average(std::span<const PrfScore> scores) {
    PrfScore m;
    if (scores.empty()) return m;
    for (const auto& s : scores) {
        m.precision += s.precision;
        m.recall += s.recall;
        m.f1 += s.f1;
        m.matched += s.matched;
        m.predicted += s.predicted;
        m.gold += s.gold;
    }
    const auto n = static_cast<double>(scores.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    return m;
}

}  // namespace detail

struct ScoredPair {
    std::string doc_id;
    TemporalGraph pred;
    TemporalGraph gold;
};

/// Macro is the mean of per-document scores; micro recomputes P/R/F1 from
/// pooled counts. Aggregation follows input order.
inline EvalReport evaluate_corpus(std::span<const ScoredPair> pairs, MatchMode mode = MatchMode::Normalized) {
    EvalReport r;
    std::vector<PrfScore> nodes, edges;
    std::size_t nm = 0, np = 0, ng = 0, em = 0, ep = 0, eg = 0;
    for (const auto& p : pairs) {
        DocumentScore d{p.doc_id, node_prf(p.pred, p.gold, mode), edge_prf(p.pred, p.gold, mode)};
        nodes.push_back(d.node);
        edges.push_back(d.edge);
        nm += d.node.matched;
        np += d.node.predicted;
        ng += d.node.gold;
        em += d.edge.matched;
        ep += d.edge.predicted;
        eg += d.edge.gold;
        r.pred_counts += count_graph(p.pred);
        r.gold_counts += count_graph(p.gold);
        r.per_doc.push_back(std::move(d));
    }
    r.macro = {detail::macro_average(nodes), detail::macro_average(edges)};
    r.micro = {prf_from_counts(nm, np, ng), prf_from_counts(em, ep, eg)};
    return r;
}

}  // namespace etg
