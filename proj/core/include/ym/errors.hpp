#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ym {

enum class ErrorCode {
    NonPlanar,
    Disconnected,
    MalformedRotation,
    NotOnGraph,
    EmptyLoop,
    WrongDegree,
    UnknownName,
    AmbiguousPath,
    BaseMismatch,
    MissingSymbol,
    TriangularSolveFailed,
    StepTooLarge,
    EdgeNotOnUnbounded,
    EdgeMultiplicity,
    NotExtendedInvariant,
    GridTooCoarse,
    PatternMismatch,
    UnderdeterminedSystem,
    InconsistentSystem,
    NonConvergent,
    ParseError,
    SemanticError,
    NonpositiveTime,
    SizeMismatch,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace ym
