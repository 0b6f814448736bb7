#pragma once

// JSON and JSONL mappings for the library types. Requires nlohmann/json.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "etg/corpus.hpp"
#include "etg/dot.hpp"
#include "etg/embed.hpp"
#include "etg/error.hpp"
#include "etg/eval.hpp"
#include "etg/spr.hpp"

namespace etg::io {

using Json = nlohmann::ordered_json;

inline CorpusDocument document_from_json(const Json& j) {
    try {
        CorpusDocument d;
        d.doc_id = j.at("doc_id").get<std::string>();
        d.text = j.at("text").get<std::string>();
        d.descriptors = j.at("descriptors").get<std::vector<std::string>>();
        for (const auto& ev : j.at("events")) {
            const auto& span = ev.at("span");
            if (!span.is_array() || span.size() != 2) {
                throw Error(ErrorKind::UnparseableAnnotation, "event span must be [start, end]");
            }
            d.events.push_back({{span[0].get<std::size_t>(), span[1].get<std::size_t>()},
                                ev.at("surface").get<std::string>()});
        }
        for (const auto& rel : j.at("relations")) {
            d.relations.push_back({rel.at("head").get<std::size_t>(), rel.at("tail").get<std::size_t>(),
                                   rel.at("label").get<std::string>()});
        }
        d.validate();
        return d;
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::UnparseableAnnotation, e.what());
    }
}

inline Json document_to_json(const CorpusDocument& d) {
    Json events = Json::array();
    for (const auto& ev : d.events) events.push_back({{"span", {ev.span.begin, ev.span.end}}, {"surface", ev.surface}});
    Json relations = Json::array();
    for (const auto& r : d.relations) relations.push_back({{"head", r.head}, {"tail", r.tail}, {"label", r.label}});
    return {{"doc_id", d.doc_id},
            {"text", d.text},
            {"descriptors", d.descriptors},
            {"events", events},
            {"relations", relations}};
}

inline Json row_to_json(const DatasetRow& r) {
    return {{"doc_id", r.doc_id}, {"input", r.input}, {"target", r.target}};
}

inline Json edge_to_json(const Edge& e) {
    return {{"head", e.head().raw()}, {"relation", to_string(e.relation())}, {"tail", e.tail().raw()}};
}

inline Json span_to_json(const Span& s) { return Json::array({s.begin, s.end}); }

inline Json parse_outcome_to_json(const ParseOutcome& p) {
    Json edges = Json::array();
    for (const auto& pe : p.edges) {
        Json e = edge_to_json(pe.edge);
        e["spans"] = {{"head", span_to_json(pe.head)},
                      {"relation", span_to_json(pe.relation)},
                      {"tail", span_to_json(pe.tail)}};
        e["fallback"] = pe.fallback;
        edges.push_back(std::move(e));
    }
    return {{"edges", edges}, {"skipped_lines", p.skipped_lines}};
}

inline Json prf_to_json(const PrfScore& s) {
    return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
            {"matched", s.matched},     {"predicted", s.predicted}, {"gold", s.gold}};
}

inline Json stats_to_json(const GraphCounts& counts) {
    Json j = {{"node_count", counts.node_count}, {"edge_count", counts.edge_count}};
    if (counts.node_count == 0) {
        j["avg_node_degree"] = nullptr;
        j["label_distribution"] = Json::object();
        return j;
    }
    const GraphStats s = graph_stats(counts);
    j["avg_node_degree"] = s.avg_node_degree;
    Json dist = Json::object();
    for (const auto& [label, pct] : s.label_distribution) dist[std::string(to_string(label))] = pct;
    j["label_distribution"] = dist;
    return j;
}

inline Json eval_report_to_json(const EvalReport& r) {
    Json per_doc = Json::array();
    for (const auto& d : r.per_doc) {
        per_doc.push_back({{"doc_id", d.doc_id}, {"node", prf_to_json(d.node)}, {"edge", prf_to_json(d.edge)}});
    }
    return {{"per_doc", per_doc},
            {"macro", {{"node", prf_to_json(r.macro.node)}, {"edge", prf_to_json(r.macro.edge)}}},
            {"micro", {{"node", prf_to_json(r.micro.node)}, {"edge", prf_to_json(r.micro.edge)}}},
            {"stats", {{"pred", stats_to_json(r.pred_counts)}, {"gold", stats_to_json(r.gold_counts)}}},
            {"conventions",
             "0/0 precision or recall is 0; an empty prediction against an empty gold graph scores 1; "
             "edges are deduplicated before scoring"}};
}

inline Json spr_report_to_json(const SprReport& r) {
    Json j = {{"r_dupl", r.r_dupl},
              {"r_card", r.r_card},
              {"d_hausdorff", r.d_hausdorff},
              {"spr_total", r.spr_total},
              {"combined_loss", nullptr},
              {"active", r.active},
              {"parse",
               {{"edges", r.parse.edges},
                {"unique_edges", r.parse.unique_edges},
                {"skipped_lines", r.parse.skipped_lines},
                {"fallback_edges", r.parse.fallback_edges},
                {"missing_spans", r.parse.missing_spans}}}};
    if (r.combined_loss) j["combined_loss"] = *r.combined_loss;
    return j;
}

inline Json schedule_to_json(const ActivationSchedule& s) {
    Json out = Json::array();
    for (const auto& seg : s.segments()) out.push_back({{"step_start", seg.step_start}, {"active", seg.active}});
    return out;
}

/// `{"dim": d, "states": [[...], ...], "spans": [{"head": [...], "rel": [...], "tail": [...]} | null, ...]}`
struct HiddenStateFixture {
    HiddenStateMatrix states;
    std::vector<std::optional<SpanIndex>> spans;
};

inline HiddenStateFixture hidden_fixture_from_json(const Json& j) {
    try {
        const auto dim = j.at("dim").get<std::size_t>();
        auto rows = j.at("states").get<std::vector<std::vector<double>>>();
        for (const auto& r : rows) {
            if (r.size() != dim) throw Error(ErrorKind::DimensionMismatch, "state row width differs from dim");
        }
        HiddenStateFixture f{HiddenStateMatrix::from_rows(rows), {}};
        if (j.contains("spans")) {
            for (const auto& s : j.at("spans")) {
                if (s.is_null()) {
                    f.spans.emplace_back(std::nullopt);
                    continue;
                }
                f.spans.emplace_back(SpanIndex{s.at("head").get<std::vector<std::size_t>>(),
                                               s.at("rel").get<std::vector<std::size_t>>(),
                                               s.at("tail").get<std::vector<std::size_t>>()});
            }
        }
        return f;
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("malformed hidden-state fixture: ") + e.what());
    }
}

}  // namespace etg::io
