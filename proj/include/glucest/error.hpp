#pragma once

#include <stdexcept>
#include <string>

namespace glucest {

// All library failures surface as this exception; the message carries the
// offending stage, feature or line.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace glucest
