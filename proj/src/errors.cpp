#include "erg/errors.hpp"

namespace erg {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::ZeroSlopePiece: return "ZeroSlopePiece";
        case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::EmptyReturnSet: return "EmptyReturnSet";
        case ErrorCode::LPInfeasible: return "LPInfeasible";
        case ErrorCode::BranchExplosion: return "BranchExplosion";
        case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
        case ErrorCode::EmptyPreimageSet: return "EmptyPreimageSet";
        case ErrorCode::DeltaCollapse: return "DeltaCollapse";
        case ErrorCode::NoValidAlpha: return "NoValidAlpha";
        case ErrorCode::SupportOverflow: return "SupportOverflow";
        case ErrorCode::MonotonicityBreak: return "MonotonicityBreak";
        case ErrorCode::PeriodicityLost: return "PeriodicityLost";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::ConstructionFailed: return "ConstructionFailed";
        case ErrorCode::IOError: return "IOError";
    }
    return "Unknown";
}

}  // namespace erg
