#pragma once

#include <stdexcept>
#include <string>

namespace shadowtail {

/// Error raised by any library module. `module()` names the subsystem that
/// failed so front ends can report it without parsing the message.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(std::move(module)), detail_(message) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string module_;
    std::string detail_;
};

} // namespace shadowtail
