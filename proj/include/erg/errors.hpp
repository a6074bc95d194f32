#pragma once

#include <stdexcept>
#include <string>

namespace erg {

enum class ErrorCode {
    ZeroSlopePiece,
    ResolutionTooCoarse,
    NotFound,
    EmptyReturnSet,
    LPInfeasible,
    BranchExplosion,
    DegenerateGeometry,
    EmptyPreimageSet,
    DeltaCollapse,
    NoValidAlpha,
    SupportOverflow,
    MonotonicityBreak,
    PeriodicityLost,
    ConfigError,
    ConstructionFailed,
    IOError,
};

struct Error : std::runtime_error {
    ErrorCode code;
    Error(ErrorCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

const char* error_code_name(ErrorCode c);

}  // namespace erg
