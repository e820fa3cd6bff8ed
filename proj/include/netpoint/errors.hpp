#pragma once

#include <stdexcept>
#include <string>

namespace netpoint {

/// Failure classes surfaced by the library. The CLI maps each class to a
/// distinct process exit code, so keep the enumeration stable.
enum class ErrorCode {
    invalid_input,
    degenerate_bearing,
    parse_error,
    schema_error,
    invariant_violation,
    divergence,
    io_error,
    eigensolver_failure,
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::degenerate_bearing: return "degenerate-bearing";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::schema_error: return "schema-error";
    case ErrorCode::invariant_violation: return "invariant-violation";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::eigensolver_failure: return "eigensolver-failure";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace netpoint
