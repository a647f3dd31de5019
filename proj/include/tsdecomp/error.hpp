#pragma once

#include <stdexcept>
#include <string>

namespace tsdecomp {

/// Broad failure classes. The CLI maps these onto exit codes.
enum class ErrorKind {
    Parameter,     ///< caller passed an argument outside an operation's precondition
    Data,          ///< input data is malformed, gapped or too short
    Degenerate,    ///< numerically degenerate input (zero variance, singular design)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_parameter(const std::string& msg) {
    throw Error(ErrorKind::Parameter, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
    throw Error(ErrorKind::Data, msg);
}
[[noreturn]] inline void throw_degenerate(const std::string& msg) {
    throw Error(ErrorKind::Degenerate, msg);
}

} // namespace tsdecomp
