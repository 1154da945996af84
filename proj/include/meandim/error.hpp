#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace meandim {

enum class ErrorCode {
    Infeasible,
    SizeOverflow,
    LengthMismatch,
    SegmentTooShort,
    CoverageError,
    BandOverflow,
    WindowMismatch,
    WindowExhausted,
    NyquistViolation,
    HypothesisViolation,
    InvalidArgument,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SegmentTooShort: return "SegmentTooShort";
    case ErrorCode::CoverageError: return "CoverageError";
    case ErrorCode::BandOverflow: return "BandOverflow";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::WindowExhausted: return "WindowExhausted";
    case ErrorCode::NyquistViolation: return "NyquistViolation";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library. `qualified()` yields "module.Code",
/// which is what the CLI reports.
class Error : public std::runtime_error {
public:
    Error(std::string_view module, ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(module) + "." + std::string(to_string(code)) + ": " + what),
          module_(module), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& module() const noexcept { return module_; }
    std::string qualified() const { return module_ + "." + std::string(to_string(code_)); }

private:
    std::string module_;
    ErrorCode code_;
};

} // namespace meandim
