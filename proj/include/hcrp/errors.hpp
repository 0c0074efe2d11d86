#pragma once

#include <stdexcept>
#include <string>

namespace hcrp {

// Error categories map onto CLI exit codes: config -> 1, data -> 2, numeric -> 3.
class Error : public std::runtime_error {
public:
    explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
    virtual int exit_code() const { return 1; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 1; }
};

class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 2; }
};

class NumericError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

}  // namespace hcrp
