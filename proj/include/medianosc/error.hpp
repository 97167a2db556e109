#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace medianosc {

enum class ErrorCode {
    InvalidParameter,
    InvalidGrid,
    IndivisibleCube,
    FamilyTooLarge,
    HypothesisViolated,
    BetaTooSmall,
    OverlappingPair,
    DomainError,
    NonInvertible,
    DegenerateModulus,
    Io,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::InvalidGrid: return "InvalidGrid";
        case ErrorCode::IndivisibleCube: return "IndivisibleCube";
        case ErrorCode::FamilyTooLarge: return "FamilyTooLarge";
        case ErrorCode::HypothesisViolated: return "HypothesisViolated";
        case ErrorCode::BetaTooSmall: return "BetaTooSmall";
        case ErrorCode::OverlappingPair: return "OverlappingPair";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::NonInvertible: return "NonInvertible";
        case ErrorCode::DegenerateModulus: return "DegenerateModulus";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const char* message) {
    if (!condition) fail(code, message);
}

}  // namespace detail
}  // namespace medianosc
