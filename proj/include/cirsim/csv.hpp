#pragma once

#include <string>

namespace cirsim {

// "%.17g" in the C locale; every float written by the library goes through here.
std::string format_double(double value);

}  // namespace cirsim
