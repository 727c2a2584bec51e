// Copyright The smallscat Authors.
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <iostream>

#include "smallscat/types.hpp"

namespace smallscat
{

namespace
{
std::atomic<bool> warnings_enabled{true};
}

void warn(const std::string &message)
{
  if (warnings_enabled.load())
  {
    std::cerr << "warning: " << message << '\n';
  }
}

void set_warnings_enabled(bool enabled) { warnings_enabled.store(enabled); }

}  // namespace smallscat
