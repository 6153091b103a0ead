#pragma once

#include <stdexcept>
#include <string>

namespace catalia {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column) {}

    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    int line_;
    int column_;
};

class SortError : public Error {
public:
    using Error::Error;
};

class UnsupportedFeature : public Error {
public:
    using Error::Error;
};

class UnmappedVariable : public Error {
public:
    using Error::Error;
};

class OutOfBounds : public Error {
public:
    using Error::Error;
};

class MissingParameter : public Error {
public:
    using Error::Error;
};

class MissingDefinition : public Error {
public:
    using Error::Error;
};

class NonGroundApplication : public Error {
public:
    using Error::Error;
};

class ReplayMismatch : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    using Error::Error;
};

class BackendSpawnError : public BackendError {
public:
    using BackendError::BackendError;
};

class ProtocolError : public BackendError {
public:
    using BackendError::BackendError;
};

class ProofParseError : public BackendError {
public:
    using BackendError::BackendError;
};

class BackendModelUnsupported : public BackendError {
public:
    using BackendError::BackendError;
};

} // namespace catalia
