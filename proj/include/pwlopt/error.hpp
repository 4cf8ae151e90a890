#ifndef PWLOPT_ERROR_HPP
#define PWLOPT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pwlopt {

// All recoverable failures carry a stable machine-readable code
// ("UnsortedBreakpoints", "DomainMismatch", ...) plus a human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const char* code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool cond, const char* code, const std::string& message) {
    if (!cond) fail(code, message);
}

}  // namespace pwlopt

#endif
