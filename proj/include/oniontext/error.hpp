#pragma once

#include <stdexcept>
#include <string>

namespace oniontext {

// Pipeline error carrying the module that raised it. The CLI prints
// "<module>: <what>" and exits non-zero.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

}  // namespace oniontext
