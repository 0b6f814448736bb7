#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "etg/dot.hpp"
#include "etg/error.hpp"

namespace etg {

/// Permutations use std::mt19937_64 (fully specified by the standard) with
/// rejection-sampled bounded draws, so shuffles are identical on every
/// platform and standard library. std::uniform_int_distribution is not.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound); bound must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) return x % bound;
    }
}

/// Fisher-Yates, drawing from the top index down.
template <typename T>
void shuffle_in_place(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

inline std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    shuffle_in_place(std::span<std::size_t>(perm), rng);
    return perm;
}

struct AugmentationConfig {
    std::size_t k = 4;
    std::uint64_t seed = 0;
    bool include_original = true;
};

/// Reorders the edge lines of a cleanly parsing target. Header, footer and the
/// bytes of every edge line are kept; only the line order changes.
inline LinearizedGraph permute_target(const LinearizedGraph& lg, std::uint64_t seed) {
    const ParseOutcome parsed = parse(lg.text);
    if (!parsed.clean()) {
        throw Error(ErrorKind::UnparseableTarget,
                    std::to_string(parsed.skipped_lines) + " skipped line(s), " +
                        std::to_string(parsed.fallback_count()) + " fallback edge(s)");
    }

    std::vector<std::string_view> lines;
    std::string_view text = lg.text;
    for (std::size_t start = 0;;) {
        std::size_t nl = text.find('\n', start);
        lines.push_back(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }

    // On a clean parse, edge i sits on the line containing its head span.
    std::vector<std::size_t> edge_lines;
    edge_lines.reserve(parsed.edges.size());
    std::size_t line = 0, line_start = 0;
    for (const auto& e : parsed.edges) {
        while (line_start + lines[line].size() < e.head.begin) {
            line_start += lines[line].size() + 1;
            ++line;
        }
        edge_lines.push_back(line);
    }

    const auto perm = random_permutation(edge_lines.size(), seed);
    std::vector<std::string_view> shuffled = lines;
    LinearizedGraph out;
    out.edge_order.reserve(perm.size());
    for (std::size_t slot = 0; slot < perm.size(); ++slot) {
        shuffled[edge_lines[slot]] = lines[edge_lines[perm[slot]]];
        out.edge_order.push_back(parsed.edges[perm[slot]].edge);
    }
    out.text.reserve(lg.text.size());
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
        if (i > 0) out.text += '\n';
        out.text += shuffled[i];
    }
    return out;
}

/// The original (optionally) followed by k permutations; permutation i is
/// seeded with seed ^ i. Sampling is with replacement, so small graphs may
/// repeat an order.
inline std::vector<LinearizedGraph> make_augmented_set(const LinearizedGraph& lg, const AugmentationConfig& cfg) {
    std::vector<LinearizedGraph> out;
    out.reserve(cfg.k + 1);
    if (cfg.include_original) {
        if (!parse(lg.text).clean()) throw Error(ErrorKind::UnparseableTarget, "target does not parse cleanly");
        out.push_back(lg);
    }
    for (std::size_t i = 0; i < cfg.k; ++i) {
        out.push_back(permute_target(lg, cfg.seed ^ static_cast<std::uint64_t>(i)));
    }
    return out;
}

}  // namespace etg
