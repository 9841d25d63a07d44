// SPDX-License-Identifier: Apache-2.0
// ASCII AIGER ("aag") interchange for sealed graphs.
//
// Latches are written with an explicit "uninitialized" reset field (the latch
// literal itself); the reader accepts 0/1/self reset values and ignores them,
// since initial state always comes from the waveform. Vector signals round-trip
// through per-bit symbols "name[i]" and are re-grouped on read when complete.

#pragma once

#include <string>
#include <string_view>

#include "exsim/aig.hpp"

namespace exsim {

std::string write_aiger(const Aignet& g);
Aignet parse_aiger(std::string_view text);

} // namespace exsim
