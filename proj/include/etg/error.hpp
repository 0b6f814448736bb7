#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace etg {

enum class ErrorKind {
    EmptyEvent,
    SelfLoop,
    UnmergedLabel,
    OrderMismatch,
    IndexOutOfRange,
    EmptySpan,
    DuplicateIndex,
    DegenerateVector,
    DimensionMismatch,
    NonFiniteValue,
    UnparseableTarget,
    MergeRegimeMismatch,
    EmptyGraph,
    InvalidCounts,
    InvalidConfig,
    UnparseableAnnotation,
    IoError,
    InvalidInput,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::EmptyEvent: return "EmptyEvent";
        case ErrorKind::SelfLoop: return "SelfLoop";
        case ErrorKind::UnmergedLabel: return "UnmergedLabel";
        case ErrorKind::OrderMismatch: return "OrderMismatch";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::EmptySpan: return "EmptySpan";
        case ErrorKind::DuplicateIndex: return "DuplicateIndex";
        case ErrorKind::DegenerateVector: return "DegenerateVector";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::UnparseableTarget: return "UnparseableTarget";
        case ErrorKind::MergeRegimeMismatch: return "MergeRegimeMismatch";
        case ErrorKind::EmptyGraph: return "EmptyGraph";
        case ErrorKind::InvalidCounts: return "InvalidCounts";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::UnparseableAnnotation: return "UnparseableAnnotation";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

/// All library failures are reported through this one exception type; the
/// kind is what callers and tests branch on.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace etg
