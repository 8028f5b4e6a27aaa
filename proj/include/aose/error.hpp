#ifndef AOSE_ERROR_HPP
#define AOSE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace aose {

enum class ErrorCode {
    InvalidArgument,
    ShapeMismatch,
    Parse,
    Io,
    NonFinite,
};

// Single exception type thrown by the core; the C API maps `code()` onto its
// status enum.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace aose

#endif // AOSE_ERROR_HPP
