#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mechcert {

/// Raised when an argument lies outside the mathematical domain of an
/// operation. `parameter()` names the offending argument.
class DomainError : public std::domain_error {
public:
    DomainError(std::string parameter, const std::string& message)
        : std::domain_error(parameter + ": " + message), parameter_(std::move(parameter)) {}

    [[nodiscard]] const std::string& parameter() const noexcept { return parameter_; }

private:
    std::string parameter_;
};

namespace detail {

inline void require(bool condition, std::string_view parameter, std::string_view message) {
    if (!condition) {
        throw DomainError(std::string(parameter), std::string(message));
    }
}

}  // namespace detail
}  // namespace mechcert
