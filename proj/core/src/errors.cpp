#include "ym/errors.hpp"

namespace ym {

std::string_view error_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NonPlanar: return "NonPlanar";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::MalformedRotation: return "MalformedRotation";
    case ErrorCode::NotOnGraph: return "NotOnGraph";
    case ErrorCode::EmptyLoop: return "EmptyLoop";
    case ErrorCode::WrongDegree: return "WrongDegree";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::AmbiguousPath: return "AmbiguousPath";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::MissingSymbol: return "MissingSymbol";
    case ErrorCode::TriangularSolveFailed: return "TriangularSolveFailed";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::EdgeNotOnUnbounded: return "EdgeNotOnUnbounded";
    case ErrorCode::EdgeMultiplicity: return "EdgeMultiplicity";
    case ErrorCode::NotExtendedInvariant: return "NotExtendedInvariant";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::PatternMismatch: return "PatternMismatch";
    case ErrorCode::UnderdeterminedSystem: return "UnderdeterminedSystem";
    case ErrorCode::InconsistentSystem: return "InconsistentSystem";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SemanticError: return "SemanticError";
    case ErrorCode::NonpositiveTime: return "NonpositiveTime";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code)
{
}

} // namespace ym
