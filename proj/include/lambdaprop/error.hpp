#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lambdaprop {

enum class ErrorKind {
    invalid_config,
    edge_amplitude_too_large,
    degenerate_angles,
    step_unstable,
    shock_detected,
    adiabaticity_horizon,
    io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace lambdaprop
