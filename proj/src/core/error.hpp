#pragma once

#include <stdexcept>
#include <string>

namespace gf {

enum class ErrorCode {
    AllCollinear,
    DuplicateCollision,
    DegenerateTriangle,
    EmptyDomain,
    AdaptationStall,
    SingularElement,
    ConflictingConstraints,
    FactorizationFailure,
    LocationFailure,
    NoConvergence,
    ConfigInvalid,
    ExtrapolationWarning,
    IoFailure,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::AllCollinear: return "AllCollinear";
        case ErrorCode::DuplicateCollision: return "DuplicateCollision";
        case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
        case ErrorCode::EmptyDomain: return "EmptyDomain";
        case ErrorCode::AdaptationStall: return "AdaptationStall";
        case ErrorCode::SingularElement: return "SingularElement";
        case ErrorCode::ConflictingConstraints: return "ConflictingConstraints";
        case ErrorCode::FactorizationFailure: return "FactorizationFailure";
        case ErrorCode::LocationFailure: return "LocationFailure";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::ExtrapolationWarning: return "ExtrapolationWarning";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace gf
