#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "etg/error.hpp"

namespace etg {

/// Last-layer decoder states, T rows of width d, row-major.
class HiddenStateMatrix {
public:
    HiddenStateMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (rows_ == 0 || cols_ == 0) {
            throw Error(ErrorKind::DimensionMismatch, "hidden states need at least one row and column");
        }
        if (values_.size() != rows_ * cols_) {
            throw Error(ErrorKind::DimensionMismatch,
                        "expected " + std::to_string(rows_ * cols_) + " values, got " +
                            std::to_string(values_.size()));
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, "hidden state entry is not finite");
        }
    }

    static HiddenStateMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw Error(ErrorKind::DimensionMismatch, "hidden states need at least one row");
        const std::size_t cols = rows.front().size();
        std::vector<double> flat;
        flat.reserve(rows.size() * cols);
        for (const auto& r : rows) {
            if (r.size() != cols) throw Error(ErrorKind::DimensionMismatch, "ragged hidden-state rows");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return HiddenStateMatrix(rows.size(), cols, std::move(flat));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values_).subspan(i * cols_, cols_);
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
};

/// Token positions of an edge's head event, relation label and tail event.
struct SpanIndex {
    std::vector<std::size_t> head;
    std::vector<std::size_t> rel;
    std::vector<std::size_t> tail;
};

/// Concatenated [pool(head); pool(rel); pool(tail)], length 3d.
struct EdgeEmbedding {
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
};

enum class RepeatedIndex { Deduplicate, Reject };

/// Unweighted mean of the selected rows. Repeated positions count once
/// unless the policy rejects them.
inline std::vector<double> pool_span(const HiddenStateMatrix& h, std::span<const std::size_t> indices,
                                     RepeatedIndex policy = RepeatedIndex::Deduplicate) {
    if (indices.empty()) throw Error(ErrorKind::EmptySpan, "pooling over an empty span");
    std::vector<std::size_t> unique(indices.begin(), indices.end());
    std::sort(unique.begin(), unique.end());
    auto last = std::unique(unique.begin(), unique.end());
    if (last != unique.end() && policy == RepeatedIndex::Reject) {
        throw Error(ErrorKind::DuplicateIndex, "span repeats a position");
    }
    unique.erase(last, unique.end());
    if (unique.back() >= h.rows()) {
        throw Error(ErrorKind::IndexOutOfRange, "position " + std::to_string(unique.back()) +
                                                    " outside sequence of length " + std::to_string(h.rows()));
    }
    std::vector<double> mean(h.cols(), 0.0);
    for (std::size_t i : unique) {
        auto r = h.row(i);
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += r[k];
    }
    const auto n = static_cast<double>(unique.size());
    for (double& v : mean) v /= n;
    return mean;
}

inline EdgeEmbedding edge_embedding(const HiddenStateMatrix& h, const SpanIndex& s,
                                    RepeatedIndex policy = RepeatedIndex::Deduplicate) {
    EdgeEmbedding e;
    e.values.reserve(3 * h.cols());
    for (const auto* part : {&s.head, &s.rel, &s.tail}) {
        auto pooled = pool_span(h, *part, policy);
        e.values.insert(e.values.end(), pooled.begin(), pooled.end());
    }
    return e;
}

inline constexpr double kDegenerateNorm = 1e-12;

/// 1 - cos(a, b), clamped to [0, 2]. Symmetric in its arguments bit-for-bit.
inline double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimensionMismatch, "vectors of length " + std::to_string(a.size()) + " and " +
                                                      std::to_string(b.size()));
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    if (std::sqrt(na) <= kDegenerateNorm || std::sqrt(nb) <= kDegenerateNorm) {
        throw Error(ErrorKind::DegenerateVector, "vector norm at or below 1e-12");
    }
    const double d = 1.0 - dot / std::sqrt(na * nb);
    return std::clamp(d, 0.0, 2.0);
}

/// Returned when exactly one side is empty: each directed term is at most 2.
inline constexpr double kEmptySetPenalty = 4.0;

/// Average Hausdorff distance under cosine distance:
///   mean over gold of nearest generated + mean over generated of nearest gold.
/// Both empty gives 0; one empty gives kEmptySetPenalty.
inline double avg_hausdorff(std::span<const EdgeEmbedding> gold, std::span<const EdgeEmbedding> generated) {
    if (gold.empty() && generated.empty()) return 0.0;
    const std::size_t dim = gold.empty() ? generated.front().dim() : gold.front().dim();
    for (auto set : {gold, generated}) {
        for (const auto& e : set) {
            if (e.dim() != dim) throw Error(ErrorKind::DimensionMismatch, "edge embeddings differ in width");
        }
    }
    if (gold.empty() || generated.empty()) {
        // Still reject degenerate points on the non-empty side.
        for (auto set : {gold, generated}) {
            for (const auto& e : set) (void)cosine_distance(e.values, e.values);
        }
        return kEmptySetPenalty;
    }

    const std::size_t n = gold.size(), m = generated.size();
    std::vector<double> row_min(n, std::numeric_limits<double>::infinity());
    std::vector<double> col_min(m, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double d = cosine_distance(gold[i].values, generated[j].values);
            row_min[i] = std::min(row_min[i], d);
            col_min[j] = std::min(col_min[j], d);
        }
    }
    double gold_term = 0.0, gen_term = 0.0;
    for (double v : row_min) gold_term += v;
    for (double v : col_min) gen_term += v;
    return gold_term / static_cast<double>(n) + gen_term / static_cast<double>(m);
}

}  // namespace etg
