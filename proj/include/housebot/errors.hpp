// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace housebot {

/// Invalid user configuration: bad preset names, catalog files, config files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure of the agent transport (timeouts, 5xx, refused connections).
/// Never used for well-formed but wrong model output.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A replayed episode diverged from its recording.
class ReplayMismatch : public std::runtime_error {
public:
    ReplayMismatch(std::size_t message_index, const std::string& what)
        : std::runtime_error(what), message_index_(message_index) {}

    std::size_t message_index() const noexcept { return message_index_; }

private:
    std::size_t message_index_;
};

/// The replay agent was asked for a reply after its recording ran out.
class ReplayExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed transcript or result files.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace housebot
