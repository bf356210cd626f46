#pragma once

#include <stdexcept>
#include <string>

namespace tmfchase {

enum class ErrorCode {
    InvalidOperand,
    MissingActionData,
    OutOfRange,
    InconsistentFlags,
    SchemaViolation,
    DuplicateGenerator,
    NotFound,
    IncompleteData,
    InconsistentInstance,
    TooLarge,
    NotVTorsion,
    AxiomDisabled,
    Inconclusive,
    InvalidInput,
    ParseError,
    IoError,
};

inline const char* error_code_name(ErrorCode c)
{
    switch (c) {
        case ErrorCode::InvalidOperand: return "InvalidOperand";
        case ErrorCode::MissingActionData: return "MissingActionData";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::InconsistentFlags: return "InconsistentFlags";
        case ErrorCode::SchemaViolation: return "SchemaViolation";
        case ErrorCode::DuplicateGenerator: return "DuplicateGenerator";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::IncompleteData: return "IncompleteData";
        case ErrorCode::InconsistentInstance: return "InconsistentInstance";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::NotVTorsion: return "NotVTorsion";
        case ErrorCode::AxiomDisabled: return "AxiomDisabled";
        case ErrorCode::Inconclusive: return "Inconclusive";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code)
    {
    }

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tmfchase
