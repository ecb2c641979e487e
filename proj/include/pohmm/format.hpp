#ifndef POHMM_FORMAT_HPP
#define POHMM_FORMAT_HPP

#include <charconv>
#include <string>

namespace pohmm {

/// Shortest decimal string that round-trips to the same double.  All file
/// formats and CSV output go through this, so serialization is bit-exact.
inline std::string format_double(double x) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, result.ptr);
}

} // namespace pohmm

#endif
