#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "etg/error.hpp"

namespace etg {

namespace detail {

constexpr bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

constexpr char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace detail

/// Canonical form used for set membership: trimmed, whitespace runs collapsed
/// to a single space, ASCII letters lowercased. Non-ASCII bytes pass through.
inline std::string normalize_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (detail::is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(detail::ascii_lower(c));
    }
    return out;
}

/// An event mention. Keeps the surface text for serialization and the
/// normalized text for comparisons.
class EventText {
public:
    explicit EventText(std::string raw) : raw_(std::move(raw)), normalized_(normalize_text(raw_)) {
        if (normalized_.empty()) {
            throw Error(ErrorKind::EmptyEvent, "event text is empty or whitespace");
        }
    }

    const std::string& raw() const noexcept { return raw_; }
    const std::string& normalized() const noexcept { return normalized_; }

    bool operator==(const EventText& other) const noexcept { return normalized_ == other.normalized_; }

private:
    std::string raw_;
    std::string normalized_;
};

inline EventText normalize_event(std::string_view raw) { return EventText(std::string(raw)); }

enum class Relation { Before, After, Includes, IsIncluded, Simultaneous };

inline constexpr std::array<Relation, 5> kAllRelations = {
    Relation::Before, Relation::After, Relation::Includes, Relation::IsIncluded, Relation::Simultaneous};

inline constexpr std::array<Relation, 3> kMergedRelations = {
    Relation::Before, Relation::Includes, Relation::Simultaneous};

constexpr std::string_view to_string(Relation r) {
    switch (r) {
        case Relation::Before: return "before";
        case Relation::After: return "after";
        case Relation::Includes: return "includes";
        case Relation::IsIncluded: return "is_included";
        case Relation::Simultaneous: return "simultaneous";
    }
    return "";
}

/// Labels are matched exactly (lowercase, as emitted by the linearizer).
constexpr std::optional<Relation> parse_relation(std::string_view label) {
    for (Relation r : kAllRelations) {
        if (to_string(r) == label) return r;
    }
    return std::nullopt;
}

constexpr bool is_merged_label(Relation r) {
    return r == Relation::Before || r == Relation::Includes || r == Relation::Simultaneous;
}

/// Whether event strings are compared in canonical or exact surface form.
enum class MatchMode { Normalized, Strict };

/// A directed temporal relation between two distinct events.
class Edge {
public:
    Edge(EventText head, Relation relation, EventText tail)
        : head_(std::move(head)), relation_(relation), tail_(std::move(tail)) {
        if (head_.normalized() == tail_.normalized()) {
            throw Error(ErrorKind::SelfLoop, "self-loop on event '" + head_.raw() + "'");
        }
    }

    Edge(std::string_view head, Relation relation, std::string_view tail)
        : Edge(normalize_event(head), relation, normalize_event(tail)) {}

    const EventText& head() const noexcept { return head_; }
    Relation relation() const noexcept { return relation_; }
    const EventText& tail() const noexcept { return tail_; }

    bool operator==(const Edge& other) const noexcept {
        return relation_ == other.relation_ && head_ == other.head_ && tail_ == other.tail_;
    }

private:
    EventText head_;
    Relation relation_;
    EventText tail_;
};

/// Comparable identity of an edge under a match mode.
struct EdgeKey {
    std::string head;
    Relation relation;
    std::string tail;

    auto operator<=>(const EdgeKey&) const = default;
};

inline EdgeKey edge_key(const Edge& e, MatchMode mode = MatchMode::Normalized) {
    if (mode == MatchMode::Strict) return {e.head().raw(), e.relation(), e.tail().raw()};
    return {e.head().normalized(), e.relation(), e.tail().normalized()};
}

inline const std::string& event_key(const EventText& e, MatchMode mode = MatchMode::Normalized) {
    return mode == MatchMode::Strict ? e.raw() : e.normalized();
}

/// after(a,b) -> before(b,a); is_included(a,b) -> includes(b,a).
inline Edge merge_reciprocal(const Edge& e) {
    switch (e.relation()) {
        case Relation::After: return Edge(e.tail(), Relation::Before, e.head());
        case Relation::IsIncluded: return Edge(e.tail(), Relation::Includes, e.head());
        default: return e;
    }
}

/// True iff the two edge collections are equal as multisets of keys; for
/// deduplicated inputs this is set equality.
inline bool edge_set_equal(std::span<const Edge> a, std::span<const Edge> b,
                           MatchMode mode = MatchMode::Normalized) {
    if (a.size() != b.size()) return false;
    std::vector<EdgeKey> ka, kb;
    ka.reserve(a.size());
    kb.reserve(b.size());
    for (const auto& e : a) ka.push_back(edge_key(e, mode));
    for (const auto& e : b) kb.push_back(edge_key(e, mode));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
}

/// A deduplicated edge set with insertion order retained. The node set is
/// derived from the edges, so there are never isolated vertices.
class TemporalGraph {
public:
    TemporalGraph() = default;

    /// Duplicates (normalized equality) keep their first occurrence. A merged
    /// graph rejects reciprocal labels.
    static TemporalGraph from_edges(std::span<const Edge> edges, bool merged = false) {
        TemporalGraph g;
        g.merged_ = merged;
        std::set<EdgeKey> seen;
        for (const auto& e : edges) {
            if (merged && !is_merged_label(e.relation())) {
                throw Error(ErrorKind::UnmergedLabel,
                            "label '" + std::string(to_string(e.relation())) + "' in merged graph");
            }
            if (seen.insert(edge_key(e)).second) g.edges_.push_back(e);
        }
        return g;
    }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    bool merged() const noexcept { return merged_; }
    std::size_t size() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return edges_.empty(); }

    /// Distinct endpoints in first-appearance order.
    std::vector<EventText> nodes() const {
        std::vector<EventText> out;
        std::set<std::string> seen;
        for (const auto& e : edges_) {
            for (const EventText* ev : {&e.head(), &e.tail()}) {
                if (seen.insert(ev->normalized()).second) out.push_back(*ev);
            }
        }
        return out;
    }

    std::set<std::string> node_keys(MatchMode mode = MatchMode::Normalized) const {
        std::set<std::string> out;
        for (const auto& e : edges_) {
            out.insert(event_key(e.head(), mode));
            out.insert(event_key(e.tail(), mode));
        }
        return out;
    }

    std::set<EdgeKey> edge_keys(MatchMode mode = MatchMode::Normalized) const {
        std::set<EdgeKey> out;
        for (const auto& e : edges_) out.insert(edge_key(e, mode));
        return out;
    }

    /// Rewrites reciprocal labels; merging can create new duplicates, which
    /// are dropped.
    TemporalGraph merge_reciprocals() const {
        std::vector<Edge> merged;
        merged.reserve(edges_.size());
        for (const auto& e : edges_) merged.push_back(merge_reciprocal(e));
        return from_edges(merged, true);
    }

private:
    std::vector<Edge> edges_;
    bool merged_ = false;
};

}  // namespace etg
