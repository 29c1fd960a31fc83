#pragma once

#include <stdexcept>
#include <string>

namespace crq {

/// Raised for violated preconditions and solver failures throughout the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crq
