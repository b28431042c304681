#ifndef SLICEMARL_IO_ERROR_HPP
#define SLICEMARL_IO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace slicemarl::io {

enum class ErrorKind { MissingFile, Malformed, UnknownKey, Constraint, Io, Coverage, Mismatch };

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::MissingFile: return "missing_file";
    case ErrorKind::Malformed: return "malformed";
    case ErrorKind::UnknownKey: return "unknown_key";
    case ErrorKind::Constraint: return "constraint";
    case ErrorKind::Io: return "io";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::Mismatch: return "mismatch";
    }
    return "?";
}

/// Error from config parsing, metric files or figure emission. `key()` is
/// the config key, file path or missing series the error is about.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string key, const std::string& what)
        : std::runtime_error(what), kind_(kind), key_(std::move(key)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& key() const noexcept { return key_; }

private:
    ErrorKind kind_;
    std::string key_;
};

} // namespace slicemarl::io

#endif // SLICEMARL_IO_ERROR_HPP
