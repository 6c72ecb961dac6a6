#ifndef RIEMOC_CORE_ERRORS_HPP
#define RIEMOC_CORE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riemoc {

// Error categories mirrored 1:1 by the C API status codes.
enum class ErrorCode {
    InvalidArgument,
    Parse,
    Eval,
    SingularMetric,
    BlowUp,
    Dimension,
    Io,
    Unsupported,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& msg)
        : Error(ErrorCode::Parse, msg), offset_(offset) {}

    // Byte offset into the source string.
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class EvalError : public Error {
public:
    explicit EvalError(const std::string& msg) : Error(ErrorCode::Eval, msg) {}
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) throw Error(code, msg);
}

} // namespace riemoc

#endif
