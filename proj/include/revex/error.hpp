#pragma once

#include <stdexcept>
#include <string>

namespace revex {

enum class ErrorKind {
    Validation,  // bad input data, config, or request
    NotFound,    // unknown path, entity, or missing index
    Runtime,     // I/O and everything else
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorKind::Validation, message) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& message)
        : Error(ErrorKind::NotFound, message) {}
};

class RuntimeError : public Error {
public:
    explicit RuntimeError(const std::string& message)
        : Error(ErrorKind::Runtime, message) {}
};

}  // namespace revex
