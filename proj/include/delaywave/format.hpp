// SPDX-License-Identifier: Apache-2.0

#ifndef DELAYWAVE_FORMAT_HPP
#define DELAYWAVE_FORMAT_HPP

#include <charconv>
#include <string>
#include <system_error>

namespace delaywave
{

// Shortest round-trip decimal representation, locale-independent.
inline std::string format_double(double value)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace delaywave

#endif  // DELAYWAVE_FORMAT_HPP
