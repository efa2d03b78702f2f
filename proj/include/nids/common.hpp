#pragma once

#include <stdexcept>
#include <string>

namespace nids {

// Data/stage errors thrown by every module. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nids
