#pragma once

#include <stdexcept>
#include <string>

namespace ldb {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ratios of I^s/g(eps) blow up along the ladder
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientEvents : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedFamily : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
    ConfigError(std::string field, const std::string& msg)
        : std::runtime_error(field.empty() ? msg : field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

}  // namespace ldb
