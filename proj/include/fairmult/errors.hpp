#pragma once

#include <stdexcept>
#include <string>

namespace fairmult {

// Malformed or inconsistent input data (CSV contents, distribution files,
// group/label encodings).  The CLI maps this to exit code 2; plain
// std::invalid_argument / std::runtime_error map to exit code 1.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairmult
