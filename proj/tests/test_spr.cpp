#include <gtest/gtest.h>

#include "etg/spr.hpp"
#include "support/generators.hpp"

using namespace etg;

namespace {

// Hidden states laying out each embedding as three consecutive rows, with
// single-token spans pointing at them.
struct Sequence {
    HiddenStateMatrix states;
    std::vector<std::optional<SpanIndex>> spans;
};

Sequence sequence_for(const std::vector<EdgeEmbedding>& embeddings, std::size_t d) {
    std::vector<std::vector<double>> rows;
    std::vector<std::optional<SpanIndex>> spans;
    for (const auto& e : embeddings) {
        const std::size_t base = rows.size();
        for (std::size_t part = 0; part < 3; ++part) {
            rows.emplace_back(e.values.begin() + static_cast<std::ptrdiff_t>(part * d),
                              e.values.begin() + static_cast<std::ptrdiff_t>((part + 1) * d));
        }
        spans.push_back(SpanIndex{{base}, {base + 1}, {base + 2}});
    }
    if (rows.empty()) rows.push_back(std::vector<double>(d, 1.0));
    return {HiddenStateMatrix::from_rows(rows), spans};
}

std::string dot_of(const std::vector<Edge>& edges) {
    std::string s = "strict graph {\n";
    for (const auto& e : edges) s += format_edge_line(e) + "\n";
    return s + "}";
}

}  // namespace

TEST(ComputeSpr, PerfectGenerationIsZero) {
    tk::Gen g(71);
    const auto gold = TemporalGraph::from_edges(tk::random_edges(g, 5));
    const auto emb = tk::random_embeddings(g, gold.size(), 12);
    const auto seq = sequence_for(emb, 4);
    const auto r = compute_spr(linearize(gold).text, gold, seq.states, seq.spans, emb, SprConfig{});
    EXPECT_EQ(r.r_dupl, 0.0);
    EXPECT_EQ(r.r_card, 0.0);
    EXPECT_EQ(r.d_hausdorff, 0.0);
    EXPECT_EQ(r.spr_total, 0.0);
    EXPECT_FALSE(r.combined_loss.has_value());
}

TEST(ComputeSpr, WeightedSumOfComponents) {
    // gen: [x, x, y] -> r_dupl 0.5; gold has 3 edges vs 2 unique -> r_card 0.5.
    const Edge x("a", Relation::Before, "b"), y("b", Relation::Before, "c"), z("c", Relation::Before, "d");
    const auto gold = TemporalGraph::from_edges(std::vector<Edge>{x, y, z});
    const EdgeEmbedding u{{1, 0, 0}}, v{{0, 1, 0}}, w{{0, 0, 1}};
    const std::vector<EdgeEmbedding> gold_emb{u, v, w};
    const auto seq = sequence_for({u, u, v}, 1);
    const auto r = compute_spr(dot_of({x, x, y}), gold, seq.states, seq.spans, gold_emb, SprConfig{});
    EXPECT_DOUBLE_EQ(r.r_dupl, 0.5);
    EXPECT_DOUBLE_EQ(r.r_card, 0.5);
    // gold->gen mins (0, 0, 1)/3 plus gen->gold (0, 0)/2.
    EXPECT_DOUBLE_EQ(r.d_hausdorff, 1.0 / 3.0);
    EXPECT_EQ(r.parse.unique_edges, 2u);

    SprConfig weighted{2.0, 0.5, 3.0, 0.5, 0};
    const auto rw = compute_spr(dot_of({x, x, y}), gold, seq.states, seq.spans, gold_emb, weighted);
    EXPECT_DOUBLE_EQ(rw.spr_total, 2.0 * 0.5 + 0.5 * 0.5 + 3.0 / 3.0);
}

TEST(ComputeSpr, UnitWeightsExample) {
    SprReport r;
    r.r_dupl = 0.5;
    r.r_card = 0.25;
    r.d_hausdorff = 0.5;
    const SprConfig c;
    EXPECT_DOUBLE_EQ(c.w_dupl * r.r_dupl + c.w_card * r.r_card + c.w_match * r.d_hausdorff, 1.25);
}

TEST(ComputeSpr, UnparseableSampleUsesEmptySetConventions) {
    tk::Gen g(72);
    const auto gold = TemporalGraph::from_edges(tk::random_edges(g, 6));
    const auto emb = tk::random_embeddings(g, gold.size(), 6);
    const auto seq = sequence_for({}, 2);
    const auto r = compute_spr("I am not a graph", gold, seq.states, seq.spans, emb, SprConfig{});
    EXPECT_EQ(r.r_dupl, 0.0);
    EXPECT_EQ(r.r_card, static_cast<double>(gold.size()));
    EXPECT_EQ(r.d_hausdorff, 4.0);
    EXPECT_EQ(r.parse.skipped_lines, 1u);
}

TEST(ComputeSpr, MissingSpansAreCountedAndDropped) {
    const Edge x("a", Relation::Before, "b"), y("b", Relation::Before, "c");
    const auto gold = TemporalGraph::from_edges(std::vector<Edge>{x, y});
    const EdgeEmbedding u{{1, 0, 0}}, v{{0, 1, 0}};
    auto seq = sequence_for({u, v}, 1);
    seq.spans[1].reset();
    const auto r = compute_spr(dot_of({x, y}), gold, seq.states, seq.spans, std::vector<EdgeEmbedding>{u, v},
                               SprConfig{});
    EXPECT_EQ(r.parse.missing_spans, 1u);
    EXPECT_EQ(r.r_card, 0.0);
    EXPECT_DOUBLE_EQ(r.d_hausdorff, 0.5);
}

TEST(ComputeSpr, RejectsMismatchedGoldWidth) {
    const auto seq = sequence_for({EdgeEmbedding{{1, 0, 0}}}, 1);
    try {
        compute_spr("", TemporalGraph{}, seq.states, seq.spans, std::vector<EdgeEmbedding>{{{1, 0}}}, SprConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(ComputeSpr, AddsCombinedLossWhenGivenCrossEntropy) {
    const auto seq = sequence_for({}, 1);
    SprConfig cfg;
    cfg.warmup_steps = 10;
    const auto before = compute_spr("", TemporalGraph{}, seq.states, seq.spans, {}, cfg, LossInput{2.0, 3});
    EXPECT_FALSE(before.active);
    EXPECT_EQ(*before.combined_loss, 2.0);
    const auto after = compute_spr("", TemporalGraph{}, seq.states, seq.spans, {}, cfg, LossInput{2.0, 10});
    EXPECT_TRUE(after.active);
    EXPECT_EQ(*after.combined_loss, 1.0);
}

TEST(SprConfig, Validates) {
    EXPECT_THROW((SprConfig{-1, 1, 1, 0.5, 0}.validate()), Error);
    EXPECT_THROW((SprConfig{1, 1, 1, 1.5, 0}.validate()), Error);
    EXPECT_THROW((SprConfig{1, INFINITY, 1, 0.5, 0}.validate()), Error);
    EXPECT_NO_THROW((SprConfig{0, 0, 0, 0, 0}.validate()));
}

TEST(CombineLoss, Examples) {
    SprConfig cfg;
    EXPECT_DOUBLE_EQ(combine_loss(2.0, 1.0, 0, cfg), 1.5);
    cfg.lambda = 0.0;
    EXPECT_EQ(combine_loss(2.0, 100.0, 5, cfg), 2.0);
    cfg.lambda = 0.9;
    cfg.warmup_steps = 100;
    EXPECT_EQ(combine_loss(2.0, 100.0, 99, cfg), 2.0);
    EXPECT_DOUBLE_EQ(combine_loss(2.0, 100.0, 100, cfg), 0.1 * 2.0 + 0.9 * 100.0);
}

TEST(CombineLoss, MonotoneInSpr) {
    tk::Gen g(73);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        SprConfig cfg;
        cfg.lambda = u(g);
        cfg.warmup_steps = tk::pick(g, 0, 10);
        const std::size_t step = cfg.warmup_steps + tk::pick(g, 0, 5);
        const double ce = 5 * u(g), s = 5 * u(g);
        EXPECT_LE(combine_loss(ce, s, step, cfg), combine_loss(ce, s + u(g), step, cfg));
    }
}

TEST(SprSchedule, TwoPhasePlan) {
    const auto s = spr_schedule({10, 3, 100});
    EXPECT_EQ(s.warmup_steps(), 1000u);
    EXPECT_EQ(s.total_steps(), 1300u);
    EXPECT_FALSE(s.active_at(0));
    EXPECT_FALSE(s.active_at(999));
    EXPECT_TRUE(s.active_at(1000));
    EXPECT_TRUE(s.active_at(1299));
    ASSERT_EQ(s.segments().size(), 2u);
    EXPECT_EQ(s.segments()[1].step_start, 1000u);
    const auto steps = s.per_step();
    EXPECT_EQ(std::count(steps.begin(), steps.end(), true), 300);
}

TEST(SprSchedule, EdgeCases) {
    const auto none = spr_schedule({5, 0, 10});
    for (std::size_t i = 0; i < 60; ++i) EXPECT_FALSE(none.active_at(i));
    ASSERT_EQ(none.segments().size(), 1u);

    const auto flip = spr_schedule({1, 1, 1});
    EXPECT_FALSE(flip.active_at(0));
    EXPECT_TRUE(flip.active_at(1));

    const auto all = spr_schedule({0, 2, 3});
    EXPECT_TRUE(all.active_at(0));
    EXPECT_THROW(spr_schedule({1, 1, 0}), Error);
    EXPECT_THROW(spr_schedule({0, 0, 4}), Error);
}

TEST(Spr, AddingMissingGoldEdgeHelps) {
    tk::Gen g(74);
    for (int i = 0; i < 100; ++i) {
        const auto gold = TemporalGraph::from_edges(tk::random_edges(g, tk::pick(g, 1, 12)));
        const std::size_t d = tk::pick(g, 2, 8);
        const auto emb = tk::random_embeddings(g, gold.size(), 3 * d);
        const std::size_t missing = tk::pick(g, 0, gold.size() - 1);
        std::vector<Edge> gen;
        std::vector<EdgeEmbedding> gen_emb;
        for (std::size_t k = 0; k < gold.size(); ++k) {
            if (k == missing) continue;
            gen.push_back(gold.edges()[k]);
            gen_emb.push_back(emb[k]);
        }
        const auto s0 = sequence_for(gen_emb, d);
        const auto r0 = compute_spr(dot_of(gen), gold, s0.states, s0.spans, emb, SprConfig{});
        gen.push_back(gold.edges()[missing]);
        gen_emb.push_back(emb[missing]);
        const auto s1 = sequence_for(gen_emb, d);
        const auto r1 = compute_spr(dot_of(gen), gold, s1.states, s1.spans, emb, SprConfig{});
        EXPECT_LT(r1.r_card, r0.r_card);
        EXPECT_LE(r1.d_hausdorff, r0.d_hausdorff);
        EXPECT_LT(r1.spr_total, r0.spr_total);
    }
}
