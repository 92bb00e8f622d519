#pragma once

#include <string>

namespace pwl {

/// Shortest round-trip decimal representation; "nan"/"inf"/"-inf" for non-finite.
std::string format_double(double value);

}  // namespace pwl
