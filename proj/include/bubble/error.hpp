#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bubble {

enum class ErrorCode {
    NonPositive,
    GammaInconsistent,
    SigmaZero,
    NoPositiveRoot,
    ConvergenceFailure,
    IndexInvalid,
    GridTooCoarse,
    RadiusInsideBubble,
    ModeNotOscillatory,
    ViscosityNonzero,
    DipoleNotAllowed,
    LinearSolveFailure,
    StabilityViolation,
    SeriesTooShort,
    NotDecaying,
    SeriesEmpty,
    BoundaryNonzero,
    TruncationInsufficient,
    CompatibilityViolated,
    InsufficientRadii,
    ViscousGeneralDataRejected,
    ConfigInvalid,
    Io,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositive: return "NonPositive";
        case ErrorCode::GammaInconsistent: return "GammaInconsistent";
        case ErrorCode::SigmaZero: return "SigmaZero";
        case ErrorCode::NoPositiveRoot: return "NoPositiveRoot";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::IndexInvalid: return "IndexInvalid";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::RadiusInsideBubble: return "RadiusInsideBubble";
        case ErrorCode::ModeNotOscillatory: return "ModeNotOscillatory";
        case ErrorCode::ViscosityNonzero: return "ViscosityNonzero";
        case ErrorCode::DipoleNotAllowed: return "DipoleNotAllowed";
        case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
        case ErrorCode::StabilityViolation: return "StabilityViolation";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::NotDecaying: return "NotDecaying";
        case ErrorCode::SeriesEmpty: return "SeriesEmpty";
        case ErrorCode::BoundaryNonzero: return "BoundaryNonzero";
        case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
        case ErrorCode::CompatibilityViolated: return "CompatibilityViolated";
        case ErrorCode::InsufficientRadii: return "InsufficientRadii";
        case ErrorCode::ViscousGeneralDataRejected: return "ViscousGeneralDataRejected";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Library error carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace bubble
