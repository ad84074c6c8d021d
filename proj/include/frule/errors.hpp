#pragma once

#include <stdexcept>
#include <string>

namespace frule {

// Every error the library raises derives from frule::error so front ends can
// separate data problems from programming mistakes (std::logic_error).
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class io_error : public error {
public:
    using error::error;
};

// Malformed CSV input; carries 1-based row/column coordinates (0 = unknown).
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t row, std::size_t column)
        : error(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class empty_input_error : public error {
public:
    using error::error;
};

class argument_error : public error {
public:
    using error::error;
};

class domain_error : public error {
public:
    using error::error;
};

class index_error : public error {
public:
    using error::error;
};

// Malformed model file; the message names the offending field path.
class format_error : public error {
public:
    using error::error;
};

class version_error : public error {
public:
    using error::error;
};

// A theorem-backed invariant did not hold at runtime.
class invariant_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace frule
