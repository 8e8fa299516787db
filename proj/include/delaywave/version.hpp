// SPDX-License-Identifier: Apache-2.0

#ifndef DELAYWAVE_VERSION_HPP
#define DELAYWAVE_VERSION_HPP

namespace delaywave
{

inline constexpr const char* kVersion = "0.1.0";

}  // namespace delaywave

#endif  // DELAYWAVE_VERSION_HPP
