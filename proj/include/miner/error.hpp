#pragma once

#include <stdexcept>
#include <string>

namespace miner {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// File could not be opened or read.
struct IoError : Error {
    using Error::Error;
};

// Malformed input data; message names the offending line where known.
struct ParseError : Error {
    using Error::Error;
};

// A documented precondition or invariant was violated by the caller.
struct ContractViolation : Error {
    using Error::Error;
};

// Contrastive generation could not proceed (e.g. empty lexicon type).
struct AugmentError : Error {
    using Error::Error;
};

// Bad run configuration (unknown mode, missing path, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Non-finite loss/gradient/parameter; message names the offending tensor.
struct NumericError : Error {
    using Error::Error;
};

namespace detail {
[[noreturn]] void throw_contract(const char* file, int line, const std::string& msg);
}

} // namespace miner

#define MINER_CHECK(cond, msg)                                          \
    do {                                                                \
        if (!(cond)) ::miner::detail::throw_contract(__FILE__, __LINE__, (msg)); \
    } while (0)
