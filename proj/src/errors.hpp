#pragma once

#include <stdexcept>
#include <string>

namespace emtest {

// Data-dependent failure: input that is syntactically valid but unusable
// (too few points, all zeros, non-finite values, rank-deficient design).
class degenerate_data_error : public std::runtime_error {
public:
    explicit degenerate_data_error(const std::string& what)
        : std::runtime_error(what) {}
};

// Malformed numeric text input; carries the 1-based line it came from.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace emtest
