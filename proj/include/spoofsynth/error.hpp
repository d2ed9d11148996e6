#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spoofsynth {

enum class ErrorKind {
    DegenerateQuad,
    EmptyOutput,
    InvalidGrid,
    InvalidExtent,
    InvalidTheta,
    NotPlanar,
    NonPositiveDistance,
    BehindCamera,
    EmptyViewport,
    DegenerateCorners,
    SlotOutOfRange,
    IndivisibleRatio,
    EmptyPool,
    NonLiveExternal,
    OneClassOnly,
    MissingAttackType,
    InvalidInput,
    Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::DegenerateQuad: return "DegenerateQuad";
    case ErrorKind::EmptyOutput: return "EmptyOutput";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::InvalidExtent: return "InvalidExtent";
    case ErrorKind::InvalidTheta: return "InvalidTheta";
    case ErrorKind::NotPlanar: return "NotPlanar";
    case ErrorKind::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::EmptyViewport: return "EmptyViewport";
    case ErrorKind::DegenerateCorners: return "DegenerateCorners";
    case ErrorKind::SlotOutOfRange: return "SlotOutOfRange";
    case ErrorKind::IndivisibleRatio: return "IndivisibleRatio";
    case ErrorKind::EmptyPool: return "EmptyPool";
    case ErrorKind::NonLiveExternal: return "NonLiveExternal";
    case ErrorKind::OneClassOnly: return "OneClassOnly";
    case ErrorKind::MissingAttackType: return "MissingAttackType";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; }

    /// Same kind, message prefixed with `context`.
    Error with_context(const std::string& context) const { return Error(kind_, context + ": " + message_); }

private:
    ErrorKind kind_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

} // namespace spoofsynth
