#pragma once

#include <stdexcept>
#include <string>

namespace smperf {

enum class ErrorCode {
    contract_violation,
    not_psd,
    dimension,
    singular,
    integration,
    unsupported_constellation,
    framing,
    range,
    parameter,
    internal_consistency,
    config,
    io,
};

inline const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::contract_violation: return "contract violation";
    case ErrorCode::not_psd: return "matrix not positive semidefinite";
    case ErrorCode::dimension: return "dimension mismatch";
    case ErrorCode::singular: return "singular matrix";
    case ErrorCode::integration: return "integration failure";
    case ErrorCode::unsupported_constellation: return "unsupported constellation";
    case ErrorCode::framing: return "framing error";
    case ErrorCode::range: return "index out of range";
    case ErrorCode::parameter: return "invalid parameter";
    case ErrorCode::internal_consistency: return "internal consistency failure";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::io: return "i/o error";
    }
    return "unknown error";
}

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace smperf
