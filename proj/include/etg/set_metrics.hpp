#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "etg/graph.hpp"

namespace etg {

/// Generated edges in the order they were decoded; may repeat.
using EdgeList = std::vector<Edge>;
/// Unique edges under normalized equality.
using EdgeSet = std::vector<Edge>;

/// Keeps the first occurrence of each edge.
inline EdgeSet dedup(std::span<const Edge> edges) {
    EdgeSet out;
    std::set<EdgeKey> seen;
    for (const auto& e : edges) {
        if (seen.insert(edge_key(e)).second) out.push_back(e);
    }
    return out;
}

/// Duplication regularizer (|E| - |unique(E)|) / |unique(E)|; 0 for an empty list.
inline double r_dupl(std::span<const Edge> edges) {
    if (edges.empty()) return 0.0;
    const auto unique = static_cast<double>(dedup(edges).size());
    return (static_cast<double>(edges.size()) - unique) / unique;
}

/// Cardinality regularizer |gold| vs |generated|, relative to the generated
/// size. The denominator is clamped to 1 so an empty generation stays finite.
inline double r_card(std::size_t gold_size, std::size_t generated_size) {
    const double diff = gold_size > generated_size ? static_cast<double>(gold_size - generated_size)
                                                   : static_cast<double>(generated_size - gold_size);
    return diff / static_cast<double>(std::max<std::size_t>(generated_size, 1));
}

inline double r_card(std::span<const Edge> gold, std::span<const Edge> generated) {
    return r_card(gold.size(), generated.size());
}

}  // namespace etg
