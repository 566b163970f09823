#pragma once
#include <stdexcept>
#include <string>

namespace emslab {

// Diagnostic categories. The CLI maps these one-to-one onto exit codes.
enum class ErrorCategory {
    argument = 2,    // bad argument value passed by a caller
    parse = 3,       // malformed input file
    validation = 4,  // well-formed input violating a domain invariant
    io = 5,          // filesystem failure
    shape = 6,       // tensor / checkpoint shape mismatch
    usage = 7,       // API called out of sequence
    divergence = 8,  // non-finite values during training
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory cat, const std::string& msg) {
    throw Error(cat, msg);
}

} // namespace emslab
