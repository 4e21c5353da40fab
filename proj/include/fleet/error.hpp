#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fleet {

// Base of every error raised by the simulator libraries.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionViolated : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string field, std::string reason)
        : Error(field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}

    // Dotted path of the offending field (e.g. "pool.first").
    const std::string& field() const noexcept { return field_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_;
    std::string reason_;
};

namespace net {

class DuplicateEndpoint : public Error {
public:
    using Error::Error;
};

class SchedulingInPast : public Error {
public:
    using Error::Error;
};

class MalformedPacket : public Error {
public:
    using Error::Error;
};

class UnsupportedProtocol : public Error {
public:
    using Error::Error;
};

}  // namespace net

namespace dhcp {

class LeaseFileCorrupt : public Error {
public:
    LeaseFileCorrupt(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace dhcp

namespace apps {

class UnknownModel : public Error {
public:
    using Error::Error;
};

class ModelExhausted : public Error {
public:
    using Error::Error;
};

}  // namespace apps

namespace device {

class NoActivityForIntent : public Error {
public:
    using Error::Error;
};

}  // namespace device

namespace driver {

class ConnectRefused : public Error {
public:
    using Error::Error;
};

}  // namespace driver

}  // namespace fleet
