#pragma once
#include <stdexcept>
#include <string>

namespace graphmem {

enum class ErrorCode {
    EmptyLabel,
    EmptyField,
    EmptyStatement,
    EmptyText,
    UnknownId,
    UnknownMember,
    MemberKindViolation,
    IoError,
    FormatError,
    DimensionMismatch,
    ProviderUnavailable,
    Timeout,
    TransportError,
    BudgetExhausted,
    MockMiss,
    ParseError,
    NoMatches,
    NoPath,
    MissingRawData,
    SchemaError,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace graphmem
