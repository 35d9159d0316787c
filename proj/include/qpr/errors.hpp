#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qpr {

// Precondition or model-validity failure (bad parameters, empty input,
// unnormalized state, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A state or spectrum does not decay at the edge of its grid.
class truncation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Eigenvalues moved by more than the tolerance under grid refinement.
class resolution_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The continuous branch of the anharmonic level equation has no real root.
class level_breakdown_error : public domain_error {
public:
    level_breakdown_error(int level, const std::string& what)
        : domain_error(what), level_(level) {}
    int level() const noexcept { return level_; }

private:
    int level_;
};

// Malformed input text. line is 1-based; 0 when not tied to a line.
class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t line, const std::string& what)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Well-formed input that violates a data invariant (non-positive price, ...).
class validation_error : public std::runtime_error {
public:
    validation_error(std::size_t line, const std::string& what)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// File could not be opened, read or written.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qpr
