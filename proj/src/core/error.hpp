#pragma once

#include <stdexcept>
#include <string>

namespace evtk {

enum class ErrorCode {
    IoFailure,
    MissingDataset,
    BadShape,
    BadHeader,
    WrongColumnCount,
    UnknownClassId,
    UnsortedTimestamps,
    CoordinateOutOfBounds,
    InvalidValue,
    MissingRequiredArray,
    EmptyWindow,
    NeverSatisfied,
    DegenerateBox,
    BadConfig,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a machine-readable code plus a human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace evtk
