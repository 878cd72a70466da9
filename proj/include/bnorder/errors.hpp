#pragma once

#include <stdexcept>
#include <string>

namespace bnorder {

/// Malformed or inconsistent input data (CSV, network files, feature tables).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse failure at a specific location of a CSV body.
class ParseError : public DataError {
public:
    ParseError(std::size_t row, std::string column, const std::string& what)
        : DataError(what), row_(row), column_(std::move(column)) {}
    std::size_t row() const { return row_; }
    const std::string& column() const { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

/// A brute-force routine refused a domain above its size cap.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bnorder
