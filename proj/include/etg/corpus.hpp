#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "etg/augment.hpp"
#include "etg/dot.hpp"
#include "etg/error.hpp"
#include "etg/graph.hpp"

namespace etg {

struct EventMention {
    Span span;
    std::string surface;
};

struct RelationAnnotation {
    std::size_t head = 0;
    std::size_t tail = 0;
    std::string label;
};

/// A source document with tool-produced event mentions and relations.
struct CorpusDocument {
    std::string doc_id;
    std::string text;
    std::vector<std::string> descriptors;
    std::vector<EventMention> events;
    std::vector<RelationAnnotation> relations;

    /// Structural checks only; bad individual relations are handled at
    /// extraction time.
    void validate() const {
        if (doc_id.empty()) throw Error(ErrorKind::UnparseableAnnotation, "missing doc_id");
        if (descriptors.empty()) throw Error(ErrorKind::UnparseableAnnotation, doc_id + ": no descriptors");
        for (const auto& ev : events) {
            if (ev.span.begin > ev.span.end || ev.span.end > text.size()) {
                throw Error(ErrorKind::UnparseableAnnotation, doc_id + ": event span outside text");
            }
        }
        for (const auto& rel : relations) {
            if (rel.head >= events.size() || rel.tail >= events.size()) {
                throw Error(ErrorKind::UnparseableAnnotation, doc_id + ": relation refers to unknown event");
            }
        }
    }
};

/// An extracted edge with the text positions of its two mentions.
struct AnchoredEdge {
    Edge edge;
    std::size_t first_mention = 0;
    std::size_t second_mention = 0;
};

struct ExtractedEdges {
    /// Deduplicated, in document appearance order.
    std::vector<AnchoredEdge> edges;
    std::size_t self_loops = 0;
    /// Unknown labels or blank event surfaces.
    std::size_t invalid_relations = 0;

    std::vector<Edge> edge_list() const {
        std::vector<Edge> out;
        out.reserve(edges.size());
        for (const auto& a : edges) out.push_back(a.edge);
        return out;
    }
};

/// Builds the target edges of a document. Edges are ordered by the earlier of
/// their two mentions, then the later one, then annotation order; the first
/// edge in that order wins among duplicates.
inline ExtractedEdges extract_edges(const CorpusDocument& doc, bool merge) {
    doc.validate();
    ExtractedEdges out;
    std::vector<AnchoredEdge> all;
    for (const auto& rel : doc.relations) {
        auto label = parse_relation(rel.label);
        const auto& h = doc.events[rel.head];
        const auto& t = doc.events[rel.tail];
        if (!label || normalize_text(h.surface).empty() || normalize_text(t.surface).empty()) {
            ++out.invalid_relations;
            continue;
        }
        if (normalize_text(h.surface) == normalize_text(t.surface)) {
            ++out.self_loops;
            continue;
        }
        Edge e(EventText(h.surface), *label, EventText(t.surface));
        if (merge) e = merge_reciprocal(e);
        all.push_back({std::move(e), std::min(h.span.begin, t.span.begin), std::max(h.span.begin, t.span.begin)});
    }
    std::stable_sort(all.begin(), all.end(), [](const AnchoredEdge& a, const AnchoredEdge& b) {
        return std::pair(a.first_mention, a.second_mention) < std::pair(b.first_mention, b.second_mention);
    });
    std::set<EdgeKey> seen;
    for (auto& a : all) {
        if (seen.insert(edge_key(a.edge)).second) out.edges.push_back(std::move(a));
    }
    return out;
}

/// Event frequency times inverse descriptor frequency, natural log:
///   (f / total) * ln(descriptors / descriptors_with_event).
inline double ef_idf(std::size_t event_freq, std::size_t total_events, std::size_t descriptor_count,
                     std::size_t descriptors_with_event) {
    if (total_events == 0 || event_freq > total_events || descriptors_with_event == 0 ||
        descriptors_with_event > descriptor_count) {
        throw Error(ErrorKind::InvalidCounts,
                    "need 0 <= f <= total, total > 0 and 1 <= descriptors_with_event <= descriptor_count");
    }
    if (event_freq == 0) return 0.0;
    return (static_cast<double>(event_freq) / static_cast<double>(total_events)) *
           std::log(static_cast<double>(descriptor_count) / static_cast<double>(descriptors_with_event));
}

struct SalienceEntry {
    std::string event;
    std::string descriptor;
    double score = 0.0;
};

struct SalienceTable {
    /// Sorted by descriptor, then descending score, then event.
    std::vector<SalienceEntry> entries;
    std::size_t descriptor_universe_size = 0;
};

/// Event occurrence counts per descriptor. Merging is a plain sum, so partial
/// counts from any split of the corpus combine to the same table.
struct SalienceCounts {
    std::map<std::string, std::map<std::string, std::size_t>> by_descriptor;

    void add(const CorpusDocument& doc) {
        std::set<std::string> descriptors(doc.descriptors.begin(), doc.descriptors.end());
        for (const auto& d : descriptors) {
            auto& counts = by_descriptor[d];
            for (const auto& ev : doc.events) {
                std::string key = normalize_text(ev.surface);
                if (!key.empty()) ++counts[key];
            }
        }
    }

    SalienceCounts& operator+=(const SalienceCounts& other) {
        for (const auto& [d, counts] : other.by_descriptor) {
            auto& mine = by_descriptor[d];
            for (const auto& [e, n] : counts) mine[e] += n;
        }
        return *this;
    }
};

inline SalienceTable salience_table(const SalienceCounts& counts, double min_score = 0.0) {
    SalienceTable table;
    table.descriptor_universe_size = counts.by_descriptor.size();
    std::map<std::string, std::size_t> spread;
    for (const auto& [d, events] : counts.by_descriptor) {
        for (const auto& [e, n] : events) {
            if (n > 0) ++spread[e];
        }
    }
    for (const auto& [d, events] : counts.by_descriptor) {
        std::size_t total = 0;
        for (const auto& [e, n] : events) total += n;
        if (total == 0) continue;
        for (const auto& [e, n] : events) {
            if (n == 0) continue;
            double score = ef_idf(n, total, table.descriptor_universe_size, spread[e]);
            if (score >= min_score) table.entries.push_back({e, d, score});
        }
    }
    std::sort(table.entries.begin(), table.entries.end(), [](const SalienceEntry& a, const SalienceEntry& b) {
        if (a.descriptor != b.descriptor) return a.descriptor < b.descriptor;
        if (a.score != b.score) return a.score > b.score;
        return a.event < b.event;
    });
    return table;
}

inline SalienceTable salience_table(std::span<const CorpusDocument> docs, double min_score = 0.0) {
    SalienceCounts counts;
    for (const auto& d : docs) counts.add(d);
    return salience_table(counts, min_score);
}

struct Selection {
    std::vector<CorpusDocument> documents;
    /// Allowlisted documents dropped because no valid edge survived extraction.
    std::size_t dropped_empty = 0;
};

/// Keeps documents tagged with an allowlisted descriptor, at most `cap` per
/// descriptor, choosing by ascending doc_id. Output is sorted by doc_id.
inline Selection select_documents(std::span<const CorpusDocument> docs, std::span<const std::string> allowlist,
                                  std::size_t cap) {
    if (cap == 0) throw Error(ErrorKind::InvalidConfig, "per-descriptor cap must be at least 1");
    Selection out;
    std::set<std::string> allowed(allowlist.begin(), allowlist.end());
    std::vector<const CorpusDocument*> candidates;
    for (const auto& d : docs) {
        bool hit = std::any_of(d.descriptors.begin(), d.descriptors.end(),
                               [&](const std::string& s) { return allowed.count(s) > 0; });
        if (!hit) continue;
        if (extract_edges(d, false).edges.empty()) {
            ++out.dropped_empty;
            continue;
        }
        candidates.push_back(&d);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const CorpusDocument* a, const CorpusDocument* b) { return a->doc_id < b->doc_id; });

    std::map<std::string, std::size_t> taken;
    std::set<std::string> chosen_ids;
    for (const CorpusDocument* d : candidates) {
        bool chosen = false;
        std::set<std::string> own(d->descriptors.begin(), d->descriptors.end());
        for (const auto& s : own) {
            if (allowed.count(s) && taken[s] < cap) {
                ++taken[s];
                chosen = true;
            }
        }
        if (chosen && chosen_ids.insert(d->doc_id).second) out.documents.push_back(*d);
    }
    return out;
}

enum class EdgeOrder { Appearance, Random };

struct EmitOptions {
    bool merge = true;
    EdgeOrder order = EdgeOrder::Appearance;
    AugmentationConfig augment{0, 0, true};
};

struct DatasetRow {
    std::string doc_id;
    std::string input;
    std::string target;
};

struct EmitResult {
    std::vector<DatasetRow> rows;
    std::size_t empty_documents = 0;
    std::size_t self_loops = 0;
    std::size_t invalid_relations = 0;
};

/// Seed for the document at `index`; spreads consecutive indices apart.
inline std::uint64_t document_seed(std::uint64_t seed, std::size_t index) {
    return seed ^ (static_cast<std::uint64_t>(index) * 0x9E3779B97F4A7C15ULL);
}

/// One row with the original target per document followed by its
/// permutations. Documents without a valid edge are skipped and counted.
inline EmitResult emit_dataset(std::span<const CorpusDocument> docs, const EmitOptions& opts) {
    EmitResult out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& doc = docs[i];
        ExtractedEdges extracted = extract_edges(doc, opts.merge);
        out.self_loops += extracted.self_loops;
        out.invalid_relations += extracted.invalid_relations;
        if (extracted.edges.empty()) {
            ++out.empty_documents;
            continue;
        }
        const std::uint64_t seed = document_seed(opts.augment.seed, i);
        std::vector<Edge> order = extracted.edge_list();
        if (opts.order == EdgeOrder::Random) {
            Rng rng(seed);
            shuffle_in_place(std::span<Edge>(order), rng);
        }
        const TemporalGraph graph = TemporalGraph::from_edges(order, opts.merge);
        const LinearizedGraph target = linearize(graph, order);
        AugmentationConfig cfg = opts.augment;
        cfg.seed = seed;
        for (auto& lg : make_augmented_set(target, cfg)) {
            out.rows.push_back({doc.doc_id, doc.text, std::move(lg.text)});
        }
    }
    return out;
}

struct Split {
    std::vector<CorpusDocument> train;
    std::vector<CorpusDocument> test;
};

/// Seeded document-level split; both halves keep input order.
inline Split split_documents(std::span<const CorpusDocument> docs, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "test fraction must lie in [0, 1]");
    }
    const auto perm = random_permutation(docs.size(), seed);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(docs.size())));
    std::vector<bool> is_test(docs.size(), false);
    for (std::size_t i = 0; i < n_test; ++i) is_test[perm[i]] = true;
    Split out;
    for (std::size_t i = 0; i < docs.size(); ++i) (is_test[i] ? out.test : out.train).push_back(docs[i]);
    return out;
}

}  // namespace etg
