#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace swarm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid profile, search configuration or calibration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A precondition on an operation argument was violated.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Malformed binary or text input. offset() is the byte offset of the element
// that could not be decoded.
class FormatError : public Error {
public:
    FormatError(std::uint64_t offset, const std::string& what)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class BadMagicError : public FormatError {
public:
    using FormatError::FormatError;
};

class BadVersionError : public FormatError {
public:
    using FormatError::FormatError;
};

class TruncatedError : public FormatError {
public:
    using FormatError::FormatError;
};

// Embedding bridge failures. Each transport-level condition has its own type so
// callers can decide whether to retry.
class EmbeddingError : public Error {
public:
    using Error::Error;
};

class TransportError : public EmbeddingError {
public:
    using EmbeddingError::EmbeddingError;
};

class HandshakeError : public EmbeddingError {
public:
    using EmbeddingError::EmbeddingError;
};

class ResponseIdError : public EmbeddingError {
public:
    ResponseIdError(std::uint64_t expected, std::uint64_t received)
        : EmbeddingError("response id " + std::to_string(received) + " does not match request id " +
                         std::to_string(expected)),
          expected_(expected), received_(received) {}
    std::uint64_t expected() const noexcept { return expected_; }
    std::uint64_t received() const noexcept { return received_; }

private:
    std::uint64_t expected_;
    std::uint64_t received_;
};

class TimeoutError : public EmbeddingError {
public:
    using EmbeddingError::EmbeddingError;
};

}  // namespace swarm
