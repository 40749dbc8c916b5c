#pragma once

#include <stdexcept>
#include <string>

namespace thermoharvest {

/// Base of every error the library throws. `kind()` is a stable tag used by the
/// CLI when it prints its single-line machine-parsable failure message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error("domain", w) {}
};

struct RangeError : Error {
    explicit RangeError(const std::string& w) : Error("range", w) {}
};

struct LookupError : Error {
    explicit LookupError(const std::string& w) : Error("lookup", w) {}
};

struct ArgumentError : Error {
    explicit ArgumentError(const std::string& w) : Error("argument", w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("config", w) {}
};

struct SingularSystemError : Error {
    explicit SingularSystemError(const std::string& w) : Error("singular", w) {}
};

struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& w) : Error("convergence", w) {}
};

struct ConditioningError : Error {
    explicit ConditioningError(const std::string& w) : Error("conditioning", w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error("io", w) {}
};

/// Re-raises `e` as the same error kind with `context` prefixed to the message.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
    const std::string msg = context + ": " + e.what();
    const auto& k = e.kind();
    if (k == "domain") throw DomainError(msg);
    if (k == "range") throw RangeError(msg);
    if (k == "lookup") throw LookupError(msg);
    if (k == "argument") throw ArgumentError(msg);
    if (k == "config") throw ConfigError(msg);
    if (k == "singular") throw SingularSystemError(msg);
    if (k == "convergence") throw ConvergenceError(msg);
    if (k == "conditioning") throw ConditioningError(msg);
    if (k == "io") throw IoError(msg);
    throw Error(k, msg);
}

}  // namespace thermoharvest
