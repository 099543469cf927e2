#pragma once

#include <stdexcept>
#include <string>

namespace cpsforge {

enum class ErrorCode {
    DivisionByZero,
    Overflow,
    JetOrderExceeded,
    ComponentCount,
    NonDecomposable,
    NonTangent,
    UnsupportedTensorRank,
    UnsupportedMetric,
    MixedBoundaryCondition,
    Parse,
    UnknownSymbol,
    DegreeMismatch,
    NoFields,
    ShapeMismatch,
    CflViolation,
    SliceOutsideGrid,
    Numeric,
    Usage,
};

[[nodiscard]] const char* error_code_name(ErrorCode c);

// Single exception type for the library. `detail` carries the offending term
// (for NON_DECOMPOSABLE and similar) and `line`/`column` are set for parse errors.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {}, int line = 0, int column = 0)
        : std::runtime_error(message), code_(code), detail_(std::move(detail)), line_(line), column_(column)
    {
    }

    [[nodiscard]] ErrorCode code() const { return code_; }
    [[nodiscard]] const std::string& detail() const { return detail_; }
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    ErrorCode code_;
    std::string detail_;
    int line_;
    int column_;
};

} // namespace cpsforge
