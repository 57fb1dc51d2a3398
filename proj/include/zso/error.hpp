#ifndef ZSO_ERROR_HPP
#define ZSO_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zso {

enum class ErrorCode {
    MissingColumn,
    UnmappableLabel,
    EmptyDataset,
    MalformedCsv,
    DuplicateRowId,
    InvalidSchema,
    InvalidConfig,
    TemplateMissingPlaceholder,
    CacheCorrupt,
    LengthMismatch,
    UnknownRowAlignment,
    UndefinedMetric,
    MixedDatasets,
    TooFewReports,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnmappableLabel: return "UnmappableLabel";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::DuplicateRowId: return "DuplicateRowId";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TemplateMissingPlaceholder: return "TemplateMissingPlaceholder";
    case ErrorCode::CacheCorrupt: return "CacheCorrupt";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownRowAlignment: return "UnknownRowAlignment";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::MixedDatasets: return "MixedDatasets";
    case ErrorCode::TooFewReports: return "TooFewReports";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// CSV or cache line that could not be read; `line` is 1-based.
class LineError : public Error {
public:
    LineError(ErrorCode code, std::size_t line, const std::string& detail)
        : Error(code, "line " + std::to_string(line) + ": " + detail), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace zso

#endif // ZSO_ERROR_HPP
