#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etg/dot.hpp"
#include "etg/embed.hpp"
#include "etg/error.hpp"
#include "etg/graph.hpp"
#include "etg/set_metrics.hpp"

namespace etg {

/// Regularizer weights and the loss mixing factor. The defaults are plain
/// configuration, not tuned values.
struct SprConfig {
    double w_dupl = 1.0;
    double w_card = 1.0;
    double w_match = 1.0;
    double lambda = 0.5;
    std::size_t warmup_steps = 0;

    void validate() const {
        for (double w : {w_dupl, w_card, w_match}) {
            if (!std::isfinite(w) || w < 0.0) throw Error(ErrorKind::InvalidConfig, "weights must be finite and >= 0");
        }
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorKind::InvalidConfig, "lambda must lie in [0, 1]");
    }
};

struct SprParseSummary {
    std::size_t edges = 0;
    std::size_t unique_edges = 0;
    std::size_t skipped_lines = 0;
    std::size_t fallback_edges = 0;
    /// Unique generated edges left out of the matching term for lack of a span.
    std::size_t missing_spans = 0;
};

struct SprReport {
    double r_dupl = 0.0;
    double r_card = 0.0;
    double d_hausdorff = 0.0;
    double spr_total = 0.0;
    std::optional<double> combined_loss;
    bool active = false;
    SprParseSummary parse;
};

/// Token-level cross-entropy of the current step, supplied by the host.
struct LossInput {
    double cross_entropy = 0.0;
    std::size_t step = 0;
};

/// Cross-entropy alone during warmup, then (1 - lambda) * ce + lambda * spr.
inline double combine_loss(double cross_entropy, double spr_total, std::size_t step, const SprConfig& cfg) {
    if (step < cfg.warmup_steps) return cross_entropy;
    return (1.0 - cfg.lambda) * cross_entropy + cfg.lambda * spr_total;
}

/// Evaluates the three set regularizers on one sampled sequence.
///
/// `span_map[i]` holds the token positions of the i-th edge recovered from
/// `sampled`, in parse order. Duplication is measured on the raw edge list;
/// cardinality and matching on the deduplicated set, embedding each unique
/// edge at its first occurrence.
inline SprReport compute_spr(std::string_view sampled, const TemporalGraph& gold, const HiddenStateMatrix& hidden,
                             std::span<const std::optional<SpanIndex>> span_map,
                             std::span<const EdgeEmbedding> gold_embeddings, const SprConfig& cfg,
                             std::optional<LossInput> loss = std::nullopt) {
    cfg.validate();
    const std::size_t width = 3 * hidden.cols();
    for (const auto& g : gold_embeddings) {
        if (g.dim() != width) {
            throw Error(ErrorKind::DimensionMismatch, "gold embedding width " + std::to_string(g.dim()) +
                                                          ", expected " + std::to_string(width));
        }
    }

    const ParseOutcome parsed = parse(sampled);
    SprReport r;
    r.parse.edges = parsed.edges.size();
    r.parse.skipped_lines = parsed.skipped_lines;
    r.parse.fallback_edges = parsed.fallback_count();

    const EdgeList list = parsed.edge_list();
    r.r_dupl = r_dupl(list);

    std::vector<EdgeEmbedding> generated;
    std::set<EdgeKey> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (!seen.insert(edge_key(list[i])).second) continue;
        if (i < span_map.size() && span_map[i]) {
            generated.push_back(edge_embedding(hidden, *span_map[i]));
        } else {
            ++r.parse.missing_spans;
        }
    }
    r.parse.unique_edges = seen.size();
    r.r_card = r_card(gold.size(), seen.size());
    r.d_hausdorff = avg_hausdorff(gold_embeddings, generated);
    r.spr_total = cfg.w_dupl * r.r_dupl + cfg.w_card * r.r_card + cfg.w_match * r.d_hausdorff;

    if (loss) {
        r.active = loss->step >= cfg.warmup_steps;
        r.combined_loss = combine_loss(loss->cross_entropy, r.spr_total, loss->step, cfg);
    }
    return r;
}

/// Two-phase training plan: plain fine-tuning epochs, then epochs with SPR.
struct EpochPlan {
    std::size_t warmup_epochs = 10;
    std::size_t spr_epochs = 3;
    std::size_t steps_per_epoch = 1;
};

/// Step-indexed activation, stored as runs starting at `step_start`.
class ActivationSchedule {
public:
    struct Segment {
        std::size_t step_start;
        bool active;
    };

    ActivationSchedule(std::size_t warmup_steps, std::size_t total_steps)
        : warmup_steps_(warmup_steps), total_steps_(total_steps) {
        if (warmup_steps_ > 0) segments_.push_back({0, false});
        if (total_steps_ > warmup_steps_) segments_.push_back({warmup_steps_, true});
    }

    std::size_t warmup_steps() const noexcept { return warmup_steps_; }
    std::size_t total_steps() const noexcept { return total_steps_; }
    const std::vector<Segment>& segments() const noexcept { return segments_; }

    /// Steps past the plan stay in the final phase.
    bool active_at(std::size_t step) const noexcept { return total_steps_ > warmup_steps_ && step >= warmup_steps_; }

    std::vector<bool> per_step() const {
        std::vector<bool> out(total_steps_);
        for (std::size_t s = 0; s < total_steps_; ++s) out[s] = active_at(s);
        return out;
    }

private:
    std::size_t warmup_steps_;
    std::size_t total_steps_;
    std::vector<Segment> segments_;
};

inline ActivationSchedule spr_schedule(const EpochPlan& plan) {
    if (plan.steps_per_epoch == 0 || plan.warmup_epochs + plan.spr_epochs == 0) {
        throw Error(ErrorKind::InvalidConfig, "epoch plan must cover at least one step");
    }
    return ActivationSchedule(plan.warmup_epochs * plan.steps_per_epoch,
                              (plan.warmup_epochs + plan.spr_epochs) * plan.steps_per_epoch);
}

}  // namespace etg
