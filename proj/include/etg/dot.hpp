#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etg/error.hpp"
#include "etg/graph.hpp"

namespace etg {

/// DOT target string plus the edge order it encodes.
struct LinearizedGraph {
    std::string text;
    std::vector<Edge> edge_order;
};

/// Half-open byte range [begin, end) into the parsed string.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    bool operator==(const Span&) const = default;
};

struct ParsedEdge {
    Edge edge;
    Span head;
    Span relation;
    Span tail;
    /// Recovered by the unanchored scan of a line that did not match the
    /// one-edge-per-line production.
    bool fallback = false;
};

struct ParseOutcome {
    std::vector<ParsedEdge> edges;
    std::size_t skipped_lines = 0;

    std::vector<Edge> edge_list() const {
        std::vector<Edge> out;
        out.reserve(edges.size());
        for (const auto& p : edges) out.push_back(p.edge);
        return out;
    }

    std::size_t fallback_count() const noexcept {
        std::size_t n = 0;
        for (const auto& p : edges) n += p.fallback ? 1 : 0;
        return n;
    }

    /// Every non-structural line was a well-formed edge line.
    bool clean() const noexcept { return skipped_lines == 0 && fallback_count() == 0; }
};

inline constexpr std::string_view kDotHeader = "strict graph {";
inline constexpr std::string_view kDotFooter = "}";

/// Quote-escapes an event for a DOT string literal. Line breaks become spaces
/// so that every edge stays on one line.
inline std::string escape_event(std::string_view raw) {
    std::string out;
    out.reserve(raw.size() + 2);
    for (char c : raw) {
        switch (c) {
            case '\n':
            case '\r': out.push_back(' '); break;
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string format_edge_line(const Edge& e) {
    std::string line;
    line.reserve(e.head().raw().size() + e.tail().raw().size() + 24);
    line += '"';
    line += escape_event(e.head().raw());
    line += "\" -- \"";
    line += escape_event(e.tail().raw());
    line += "\" [rel=";
    line += to_string(e.relation());
    line += "];";
    return line;
}

/// Serializes `order`, which must be a permutation of the graph's edges.
inline LinearizedGraph linearize(const TemporalGraph& g, std::span<const Edge> order) {
    if (!edge_set_equal(g.edges(), order)) {
        throw Error(ErrorKind::OrderMismatch, "edge order is not a permutation of the graph's edges");
    }
    LinearizedGraph out;
    out.text = kDotHeader;
    out.text += '\n';
    for (const auto& e : order) {
        out.text += format_edge_line(e);
        out.text += '\n';
    }
    out.text += kDotFooter;
    out.edge_order.assign(order.begin(), order.end());
    return out;
}

inline LinearizedGraph linearize(const TemporalGraph& g) { return linearize(g, g.edges()); }

namespace detail {

struct EdgeMatch {
    std::string head;
    std::string label;
    std::string tail;
    Span head_span;
    Span rel_span;
    Span tail_span;
    std::size_t end = 0;
};

constexpr bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

inline std::size_t skip_blank(std::string_view s, std::size_t pos) {
    while (pos < s.size() && is_blank(s[pos])) ++pos;
    return pos;
}

// Reads a double-quoted literal starting at `pos`; returns the unescaped body.
inline std::optional<std::string> read_quoted(std::string_view s, std::size_t& pos, Span& body) {
    if (pos >= s.size() || s[pos] != '"') return std::nullopt;
    std::string value;
    std::size_t i = pos + 1;
    body.begin = i;
    while (i < s.size()) {
        char c = s[i];
        if (c == '\\' && i + 1 < s.size()) {
            value.push_back(s[i + 1]);
            i += 2;
            continue;
        }
        if (c == '"') {
            body.end = i;
            pos = i + 1;
            return value;
        }
        if (c == '\n') return std::nullopt;
        value.push_back(c);
        ++i;
    }
    return std::nullopt;
}

inline bool consume(std::string_view s, std::size_t& pos, std::string_view token) {
    if (s.substr(pos, token.size()) != token) return false;
    pos += token.size();
    return true;
}

// `"HEAD" -- "TAIL" [rel=LABEL];` with flexible blanks, an optionally quoted
// label and an optional trailing semicolon. Offsets are relative to `s`.
inline std::optional<EdgeMatch> match_edge_at(std::string_view s, std::size_t pos) {
    EdgeMatch m;
    auto head = read_quoted(s, pos, m.head_span);
    if (!head) return std::nullopt;
    pos = skip_blank(s, pos);
    if (!consume(s, pos, "--")) return std::nullopt;
    pos = skip_blank(s, pos);
    auto tail = read_quoted(s, pos, m.tail_span);
    if (!tail) return std::nullopt;
    pos = skip_blank(s, pos);
    if (!consume(s, pos, "[")) return std::nullopt;
    pos = skip_blank(s, pos);
    if (!consume(s, pos, "rel")) return std::nullopt;
    pos = skip_blank(s, pos);
    if (!consume(s, pos, "=")) return std::nullopt;
    pos = skip_blank(s, pos);
    bool quoted_label = consume(s, pos, "\"");
    m.rel_span.begin = pos;
    while (pos < s.size() && ((s[pos] >= 'a' && s[pos] <= 'z') || (s[pos] >= 'A' && s[pos] <= 'Z') ||
                              s[pos] == '_')) {
        ++pos;
    }
    m.rel_span.end = pos;
    if (m.rel_span.size() == 0) return std::nullopt;
    if (quoted_label && !consume(s, pos, "\"")) return std::nullopt;
    pos = skip_blank(s, pos);
    if (!consume(s, pos, "]")) return std::nullopt;
    std::size_t after = skip_blank(s, pos);
    if (after < s.size() && s[after] == ';') pos = after + 1;
    m.head = std::move(*head);
    m.tail = std::move(*tail);
    m.label = std::string(s.substr(m.rel_span.begin, m.rel_span.size()));
    m.end = pos;
    return m;
}

inline bool is_header_line(std::string_view line) {
    std::size_t pos = skip_blank(line, 0);
    if (consume(line, pos, "strict")) {
        std::size_t after = skip_blank(line, pos);
        if (after == pos) return false;
        pos = after;
    }
    if (!consume(line, pos, "digraph") && !consume(line, pos, "graph")) return false;
    pos = skip_blank(line, pos);
    if (!consume(line, pos, "{")) return false;
    return skip_blank(line, pos) == line.size();
}

inline bool is_footer_line(std::string_view line) {
    std::size_t pos = skip_blank(line, 0);
    if (!consume(line, pos, "}")) return false;
    return skip_blank(line, pos) == line.size();
}

inline Span shift(Span s, std::size_t offset) { return {s.begin + offset, s.end + offset}; }

// Labels must be known and events non-empty and distinct.
inline std::optional<ParsedEdge> validate(const EdgeMatch& m, std::size_t offset, bool fallback) {
    auto rel = parse_relation(m.label);
    if (!rel) return std::nullopt;
    std::string head_norm = normalize_text(m.head);
    std::string tail_norm = normalize_text(m.tail);
    if (head_norm.empty() || tail_norm.empty() || head_norm == tail_norm) return std::nullopt;
    return ParsedEdge{Edge(EventText(m.head), *rel, EventText(m.tail)), shift(m.head_span, offset),
                      shift(m.rel_span, offset), shift(m.tail_span, offset), fallback};
}

}  // namespace detail

/// Lenient, total parser for model-generated DOT. Never throws on malformed
/// input: lines that yield no valid edge are counted in `skipped_lines`.
inline ParseOutcome parse(std::string_view text) {
    ParseOutcome out;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t nl = text.find('\n', line_start);
        std::size_t line_end = nl == std::string_view::npos ? text.size() : nl;
        std::string_view line = text.substr(line_start, line_end - line_start);

        bool blank = detail::skip_blank(line, 0) == line.size();
        if (!blank && !detail::is_header_line(line) && !detail::is_footer_line(line)) {
            std::size_t first = detail::skip_blank(line, 0);
            auto anchored = detail::match_edge_at(line, first);
            if (anchored && detail::skip_blank(line, anchored->end) == line.size()) {
                if (auto edge = detail::validate(*anchored, line_start, false)) {
                    out.edges.push_back(std::move(*edge));
                } else {
                    ++out.skipped_lines;
                }
            } else {
                std::size_t found = 0;
                std::size_t pos = line.find('"');
                while (pos != std::string_view::npos) {
                    auto m = detail::match_edge_at(line, pos);
                    if (!m) {
                        pos = line.find('"', pos + 1);
                        continue;
                    }
                    if (auto edge = detail::validate(*m, line_start, true)) {
                        out.edges.push_back(std::move(*edge));
                        ++found;
                    }
                    pos = line.find('"', m->end);
                }
                if (found == 0) ++out.skipped_lines;
            }
        }
        if (nl == std::string_view::npos) break;
        line_start = nl + 1;
    }
    return out;
}

}  // namespace etg
