#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vodsim {

enum class ErrorCode {
    NonDivisible,
    BeforeStart,
    UnknownVideo,
    EmptyTable,
    UnknownLps,
    DuplicateClient,
    UnknownClient,
    ConfigInvalid,
    ConfigParse,
    SimulationFault,
    Usage,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace vodsim
