#pragma once

#include <stdexcept>
#include <string>

namespace capt
{
    enum class ErrorCode
    {
        invalid_argument,
        dimension_mismatch,
        empty_input,
        radius_out_of_range,
        out_of_bounds,
        parse,
        io,
        format,
    };

    /// Every failure raised by the library carries one of the codes above;
    /// the C API maps them one-to-one onto capt_status values.
    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}

        [[nodiscard]] ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    /// Parse failure with the 1-based line it occurred on.
    class ParseError : public Error
    {
    public:
        ParseError(std::size_t line, const std::string &what)
          : Error(ErrorCode::parse, "line " + std::to_string(line) + ": " + what), line_(line)
        {
        }

        [[nodiscard]] std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };
}  // namespace capt
