#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qrg {

// Error with a stable machine-readable code ("OrderCapExceeded", "ParseError",
// ...) plus a human-readable message.  Codes are part of the CLI and report
// contract: they end up verbatim in JSON error records and exit diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& msg) {
    throw Error(std::move(code), msg);
}

inline void require(bool cond, const char* code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

} // namespace qrg
