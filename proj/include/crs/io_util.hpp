#pragma once

#include <functional>
#include <iosfwd>
#include <string>

namespace crs {

// Shortest text form that parses back to the same double ("%.17g" fallback
// trimmed via round-trip checks). Used everywhere a double is serialized so
// outputs are lossless and byte-stable.
std::string format_double(double v);

// Writes through a temporary file in the target directory and renames it into
// place, so consumers never observe partial output.
void atomic_write_file(const std::string& path, const std::function<void(std::ostream&)>& write);

}  // namespace crs
