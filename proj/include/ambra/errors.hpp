#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ambra {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values (nonsensical orders, mismatched sample rates, ...).
struct InvalidArgument : Error {
    using Error::Error;
};

// A container file violates its format; carries the byte offset of the
// first offending field when known.
struct ParseError : Error {
    ParseError(const std::string& what, std::uint64_t offset)
        : Error(what + " (byte offset " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    explicit ParseError(const std::string& what) : Error(what), byte_offset(0) {}
    std::uint64_t byte_offset;
};

// Audio decoded fine but cannot be an ambisonic signal (e.g. the channel
// count is not a perfect square).
struct MalformedSignal : Error {
    using Error::Error;
};

// Container or codec outside the supported set.
struct UnsupportedFormat : Error {
    using Error::Error;
};

// Channel convention invalid for the request (e.g. FuMa above 3rd order).
struct UnsupportedConvention : Error {
    using Error::Error;
};

// Decoder design failed because the speaker layout is (numerically) rank
// deficient for the requested order.
struct IllConditionedLayout : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace ambra
