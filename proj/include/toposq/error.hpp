#pragma once

#include <stdexcept>
#include <string>

namespace toposq {

enum class ErrorCode {
    NotHermitian,
    NotAProjection,
    DimensionMismatch,
    NonCommuting,
    DegenerateInterval,
    NonCommutingGenerators,
    InvalidContext,
    ContextNotInPoset,
    NotInContext,
    NotASubcontext,
    PointNotInBundle,
    NotASubfunctor,
    NotCoveringClosed,
    FrameMismatch,
    TooLarge,
    NotUnitVector,
    NotADensity,
    ModeMismatch,
    Underdetermined,
    Inconsistent,
    ParseError,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NotAProjection: return "NotAProjection";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonCommuting: return "NonCommuting";
        case ErrorCode::DegenerateInterval: return "DegenerateInterval";
        case ErrorCode::NonCommutingGenerators: return "NonCommutingGenerators";
        case ErrorCode::InvalidContext: return "InvalidContext";
        case ErrorCode::ContextNotInPoset: return "ContextNotInPoset";
        case ErrorCode::NotInContext: return "NotInContext";
        case ErrorCode::NotASubcontext: return "NotASubcontext";
        case ErrorCode::PointNotInBundle: return "PointNotInBundle";
        case ErrorCode::NotASubfunctor: return "NotASubfunctor";
        case ErrorCode::NotCoveringClosed: return "NotCoveringClosed";
        case ErrorCode::FrameMismatch: return "FrameMismatch";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::NotUnitVector: return "NotUnitVector";
        case ErrorCode::NotADensity: return "NotADensity";
        case ErrorCode::ModeMismatch: return "ModeMismatch";
        case ErrorCode::Underdetermined: return "Underdetermined";
        case ErrorCode::Inconsistent: return "Inconsistent";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace toposq
