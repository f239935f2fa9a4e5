#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frame4 {

enum class ErrorKind {
    DegenerateRows,
    NotRegular,
    NotUnit,
    Not2Regular,
    RankDeficient,
    PatternMismatch,
    AvoidanceFailed,
    ResolutionError,
    SideDegenerate,
    UnknownPreset,
    InvalidArgument,
    IoError,
};

constexpr std::string_view error_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DegenerateRows: return "DegenerateRows";
        case ErrorKind::NotRegular: return "NotRegular";
        case ErrorKind::NotUnit: return "NotUnit";
        case ErrorKind::Not2Regular: return "Not2Regular";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::PatternMismatch: return "PatternMismatch";
        case ErrorKind::AvoidanceFailed: return "AvoidanceFailed";
        case ErrorKind::ResolutionError: return "ResolutionError";
        case ErrorKind::SideDegenerate: return "SideDegenerate";
        case ErrorKind::UnknownPreset: return "UnknownPreset";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Admissibility failures are properties of the input curve (the requested
/// frame does not exist or cannot be resolved); everything else is a usage or
/// IO problem.
constexpr bool is_admissibility_failure(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NotRegular:
        case ErrorKind::Not2Regular:
        case ErrorKind::RankDeficient:
        case ErrorKind::PatternMismatch:
        case ErrorKind::AvoidanceFailed:
        case ErrorKind::ResolutionError:
        case ErrorKind::SideDegenerate:
        case ErrorKind::DegenerateRows:
            return true;
        default:
            return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return error_name(kind_); }

private:
    ErrorKind kind_;
};

}  // namespace frame4
